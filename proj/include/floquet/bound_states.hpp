#pragma once

#include <string>
#include <vector>

#include "floquet/model.hpp"

namespace floquet {

/// Determinant of the truncated Floquet bound-state matrix, carried as
/// mantissa * 10^log10_scale so deep truncations cannot overflow. Zeros are
/// preserved exactly (mantissa = 0).
struct ScaledDeterminant {
  cplx mantissa{0.0, 0.0};
  double log10_scale = 0.0;

  cplx value() const;       // may overflow for very large truncations
  double log10_abs() const; // -inf at exact zeros
};

/// I_N(E) for the tridiagonal matrix
///   L_{a,b} = -(2 i kappa sin q_a) d_{a,b} + Theta1 d_{a,b-1} + Theta2 d_{a,b+1}
/// with 2*kappa*cos(q_a) = E + a*omega and the module-wide branch
/// Im(q_a) <= 0, evaluated by the three-term recurrence on leading principal
/// minors D_k = a_k D_{k-1} - Theta1*Theta2*D_{k-2}, rescaled every step.
/// n_amplitudes is the (odd) matrix size, centered on the a = 0 channel.
ScaledDeterminant determinant(cplx E, const LatticeModel& model,
                              int n_amplitudes);

enum class RootVerdict { Accepted, RejectedRealChannel, RejectedBandEdge };

std::string to_string(RootVerdict verdict);

struct CandidateRoot {
  cplx energy;
  double log10_abs_det = 0.0;
  RootVerdict verdict = RootVerdict::Accepted;
};

struct BoundStateSearchOptions {
  int n_amplitudes = 21;      // starting (odd) truncation
  int max_amplitudes = 87;    // stability-doubling cap
  double real_resolution = 1e-3;  // real-axis scan step, units of kappa
  int box_nx = 200;           // complex-plane winding grid
  int box_ny = 100;
  double branch_exclusion = 1e-6;  // radius around real-axis branch points
  bool stabilize = true;      // double truncation until the root set is stable
};

struct BoundStateReport {
  LatticeModel params;
  int n_amplitudes = 0;
  bool certified_regime = false;  // |Delta| <= 1 and omega <= 4*kappa
  std::vector<CandidateRoot> candidate_roots;
  bool no_bound_states = true;  // no candidate was Accepted
};

/// Locates roots of I_N(E) by a real-axis |I_N| minimum scan plus
/// argument-principle winding over the complex box, refines them by Newton
/// iteration, reconstructs the channel amplitudes B_a at each root and
/// screens them against the localization requirement Im(q_a) < 0. The
/// conclusion certifies the absence of Floquet bound states only inside the
/// regime |Delta| <= 1, omega <= 4*kappa.
BoundStateReport find_bound_states(const LatticeModel& model,
                                   const BoundStateSearchOptions& options = {});

}  // namespace floquet
