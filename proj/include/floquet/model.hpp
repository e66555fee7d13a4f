#pragma once

#include <complex>
#include <map>
#include <vector>

#include "floquet/errors.hpp"

namespace floquet {

using cplx = std::complex<double>;

/// Static description of the lattice: hopping rate kappa (sets the unit
/// scale), modulation frequency omega, non-Hermiticity Delta of the drive
/// f(t) = cos(omega t) + i*Delta*sin(omega t), and a finite-support real
/// impurity profile V_n.
struct LatticeModel {
  double kappa = 1.0;
  double omega = 0.0;
  double delta = 0.0;
  std::map<int, double> potential;  // site index -> V_n, finitely many nonzero

  static LatticeModel single_impurity(double v0, double omega, double delta,
                                      double kappa = 1.0);

  void validate() const;  // throws ValidationError on kappa <= 0

  bool is_single_impurity() const;  // support is {0} (or empty)
  double v0() const;                // V at site 0 (0 if absent)
  double potential_at(int n) const;
  int support_min() const;  // 0 when the profile is empty
  int support_max() const;

  // Single-impurity couplings, energy units: Theta1 = (V0/2)(1+Delta),
  // Theta2 = (V0/2)(1-Delta). These multiply t_{alpha+1}, t_{alpha-1} in the
  // channel difference equation.
  double theta1_energy() const { return 0.5 * v0() * (1.0 + delta); }
  double theta2_energy() const { return 0.5 * v0() * (1.0 - delta); }

  // Dimensionless pair for the lattice recurrence over Floquet components:
  // Theta1 = (1+Delta)/2, Theta2 = (1-Delta)/2, multiplying V_n separately.
  // Distinct from the energy-units pair above; both conventions are used.
  double theta1() const { return 0.5 * (1.0 + delta); }
  double theta2() const { return 0.5 * (1.0 - delta); }
};

/// Band dispersion E(q) = 2*kappa*cos(q) for q in [-pi, pi).
double dispersion_energy(double q, const LatticeModel& model);

/// Inverse of the dispersion on the incidence branch: q in (0, pi) with
/// 2*kappa*cos(q) = E. Rejects energies on or outside the band edges.
double momentum_from_energy(double E, const LatticeModel& model);

enum class ChannelKind { Propagative, Evanescent };

/// One Floquet sideband: cos q_alpha = cos q + alpha*omega/(2*kappa).
/// Propagative channels have real q_alpha in [0, pi] and group velocity
/// v_g = 2*kappa*sin(q_alpha) >= 0; evanescent ones have Im(q_alpha) < 0.
struct Channel {
  int alpha = 0;
  double cos_q = 0.0;
  cplx q;
  cplx sin_q;  // sin(q_alpha) on the same branch as q
  ChannelKind kind = ChannelKind::Propagative;
  double v_g = 0.0;  // valid only when Propagative
};

struct ChannelSetOptions {
  double opening_tol = 1e-9;  // | 1 - |cos q_alpha| | below this is rejected
};

/// Channel family for one incidence energy, alpha in [-order, order].
struct ChannelSet {
  double q0 = 0.0;     // incidence Bloch momentum, in (0, pi)
  double energy = 0.0; // 2*kappa*cos(q0)
  int order = 0;
  std::vector<Channel> channels;  // ordered alpha = -order .. order

  const Channel& at(int alpha) const { return channels[size_t(alpha + order)]; }
  bool is_propagative(int alpha) const {
    return at(alpha).kind == ChannelKind::Propagative;
  }
  size_t size() const { return channels.size(); }
};

/// Builds the 2*order+1 channel records for incidence momentum q in (0, pi).
/// Throws ChannelOpeningError when q sits on a band edge or any sideband
/// lands on |cos q_alpha| = 1 within options.opening_tol.
ChannelSet build_channel_set(double q, const LatticeModel& model, int order,
                             const ChannelSetOptions& options = {});

/// Energies E = s*2*kappa - alpha*omega (s = +-1) falling inside the open
/// band (-2*kappa, 2*kappa) for |alpha| <= order: the channel-opening
/// singularities a spectral grid must avoid.
std::vector<double> channel_opening_energies(const LatticeModel& model,
                                             int order);

}  // namespace floquet
