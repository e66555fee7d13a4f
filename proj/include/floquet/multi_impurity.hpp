#pragma once

#include <vector>

#include "floquet/model.hpp"
#include "floquet/single_impurity.hpp"

namespace floquet {

/// Floquet components Phi_alpha(n) on a finite site window [n_left, n_right]
/// that contains the impurity support plus a margin, together with the
/// transmission/reflection amplitudes extracted from the boundary matching.
/// Outside the window the field continues as
///   Phi_alpha(n) = delta_{alpha,0} e^{-i q_alpha n} + r_alpha e^{+i q_alpha n}
/// on the left and Phi_alpha(n) = t_alpha e^{-i q_alpha n} on the right.
struct FloquetField {
  ChannelSet channels;
  int n_left = 0;
  int n_right = 0;
  std::vector<std::vector<cplx>> phi;  // [alpha + order][n - n_left]
  std::vector<cplx> t;
  std::vector<cplx> r;
  double T_total = 0.0;
  double R_total = 0.0;

  const cplx& t_at(int alpha) const { return t[size_t(alpha + channels.order)]; }
  const cplx& r_at(int alpha) const { return r[size_t(alpha + channels.order)]; }
  const cplx& phi_at(int alpha, int n) const {
    return phi[size_t(alpha + channels.order)][size_t(n - n_left)];
  }
  int window_size() const { return n_right - n_left + 1; }
};

struct LatticeSolveOptions {
  int order = 20;       // starting channel truncation
  int max_order = 160;  // doubling cap
  int margin = 5;       // sites beyond the support on each side
  double convergence_tol = 1e-8;  // propagative amplitude stability
  double opening_tol = 1e-9;
  bool adaptive = true;
};

/// Solves the Floquet component recurrence
///   Omega_alpha Phi_alpha = H0 Phi_alpha
///                         + Theta1 H1 Phi_{alpha+1} + Theta2 H1 Phi_{alpha-1}
/// (Theta1 = (1+Delta)/2, Theta2 = (1-Delta)/2, H1 = diag V_n) as one sparse
/// linear system over (alpha, n), closing the window with the exact one-sided
/// outgoing/decaying boundary relations. Truncation and margin are doubled
/// together until every propagative t, r is stable to convergence_tol.
FloquetField solve_floquet_lattice(double q, const LatticeModel& model,
                                   const LatticeSolveOptions& options = {});

/// Delta = 1 recursive closed form: Phi_alpha = 0 for alpha >= 1, Phi_0 is
/// the incident Bloch wave, and Phi_alpha = (Omega_alpha - H0)^{-1} H1
/// Phi_{alpha+1} for alpha <= -1, with the resolvent applied on the window
/// under outgoing/decaying boundary conditions. Yields t_0 = 1, r_0 = 0.
FloquetField closed_form_multi_delta_one(double q, const LatticeModel& model,
                                         const LatticeSolveOptions& options = {});

}  // namespace floquet
