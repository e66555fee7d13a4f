#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floquet/model.hpp"
#include "floquet/tridiagonal.hpp"

namespace floquet {

/// Per-channel transmission/reflection amplitudes and flux totals for one
/// incidence momentum. r_alpha = t_alpha - delta_{alpha,0}; per-channel
/// probabilities T_alpha = (v_g_alpha / v_g_0) |t_alpha|^2 are defined for
/// propagative channels only, and the totals sum over those.
struct ScatteringAmplitudes {
  ChannelSet channels;
  std::vector<cplx> t;  // indexed alpha + order
  std::vector<cplx> r;
  double T_total = 0.0;
  double R_total = 0.0;
  bool near_singular = false;  // some propagative |sin q_alpha| < threshold

  const cplx& t_at(int alpha) const { return t[size_t(alpha + channels.order)]; }
  const cplx& r_at(int alpha) const { return r[size_t(alpha + channels.order)]; }
  std::optional<double> T_channel(int alpha) const;
  std::optional<double> R_channel(int alpha) const;
};

struct SolveOptions {
  int order = 40;       // starting channel truncation
  int max_order = 640;  // doubling cap for the convergence loop
  double convergence_tol = 1e-10;  // max |t(N) - t(2N)| allowed
  double opening_tol = 1e-9;
  double near_singular_tol = 1e-4;  // propagative |sin q_alpha| flag threshold
  double pivot_tol = 1e-14;
  bool adaptive = true;  // re-solve at 2N and check; false = single solve
};

/// Floquet channel matrix for a single oscillating impurity:
/// M_{a,b} = Theta1 d_{a,b-1} + Theta2 d_{a,b+1} - (2 i kappa sin q_a) d_{a,b}
/// with Theta1 = (V0/2)(1+Delta), Theta2 = (V0/2)(1-Delta), in banded layout.
Tridiagonal build_floquet_matrix(const ChannelSet& channels,
                                 const LatticeModel& model);

/// Solves M t = sigma, sigma_b = -(2 i kappa sin q) d_{b,0}, by the banded LU
/// solve; r from r_alpha = t_alpha - d_{alpha,0}. The truncation order is
/// doubled until amplitudes are stable to options.convergence_tol, up to
/// options.max_order (NoConvergence beyond).
ScatteringAmplitudes solve_amplitudes(double q, const LatticeModel& model,
                                      const SolveOptions& options = {});

/// Closed-form amplitudes at |Delta| = 1. For Delta = +1: t_alpha = 0 for
/// alpha >= 1, t_0 = 1, t_alpha = [V0 / (2 i kappa sin q_alpha)] t_{alpha+1}
/// for alpha <= -1. Delta = -1 is the mirrored recursion towards alpha >= 1.
ScatteringAmplitudes closed_form_delta_one(double q, const LatticeModel& model,
                                           const SolveOptions& options = {});

/// One spectral-scan row. Channel breakdown columns cover alpha in [-3, 3];
/// a disengaged (evanescent or out-of-range) channel stays empty.
struct SpectralRow {
  double energy = 0.0;
  double T = 0.0;
  double R = 0.0;
  std::string status;  // "ok", "near-singular", "error:<Kind>"
  std::array<std::optional<double>, 7> T_channels{};  // alpha = -3 .. 3
  std::array<std::optional<double>, 7> R_channels{};

  bool ok() const { return status == "ok" || status == "near-singular"; }
};

/// Uniform cell-centered grid of n_points energies on (e_min, e_max), with
/// points landing within 1e-6*kappa of a channel-opening singularity nudged
/// off it by that amount.
std::vector<double> spectral_grid(const LatticeModel& model, int n_points,
                                  double e_min, double e_max,
                                  int order = 40);

/// Scans energies in parallel; per-point solver errors land in the row
/// status instead of aborting the scan. Output order follows the input grid.
std::vector<SpectralRow> spectral_scan(const LatticeModel& model,
                                       std::span<const double> energies,
                                       const SolveOptions& options = {});

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  int n_points = 0;
};

/// Least-squares slope of log|t_{-1}| against log(E - E1) on a log-spaced
/// window (E1 + window_lo*kappa, E1 + window_hi*kappa], E1 = -2*kappa + omega.
/// Requires Delta = 1. The exponent contract is slope = -1/2.
ScalingFit singularity_scaling(const LatticeModel& model, int n_points = 25,
                               double window_lo = 1e-6, double window_hi = 0.1,
                               bool use_closed_form = false,
                               const SolveOptions& options = {});

}  // namespace floquet
