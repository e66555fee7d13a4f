#pragma once

#include <optional>
#include <vector>

#include "floquet/model.hpp"

namespace floquet {

/// Complex site amplitudes on the lattice window [-half_size, half_size]
/// at one instant, with norm bookkeeping P(t) = sum |c_n(t)|^2 / norm0.
struct WavefieldState {
  int half_size = 0;
  std::vector<cplx> c;  // size 2*half_size + 1, site n at index n + half_size
  double time = 0.0;
  double norm0 = 1.0;  // sum |c_n(0)|^2 reference

  // Packet geometry recorded by init_gaussian, used for the causality check.
  std::optional<int> packet_center;
  std::optional<double> packet_width;

  cplx& at(int n) { return c[size_t(n + half_size)]; }
  const cplx& at(int n) const { return c[size_t(n + half_size)]; }
  int size() const { return 2 * half_size + 1; }
  double total_probability() const;
  double norm() const { return total_probability() / norm0; }
};

/// Gaussian packet c_n(0) = exp[-(n-n0)^2/w^2] exp(-i q0 n), normalized to
/// unit total probability. Group velocity 2*kappa*sin(q0) moves it to the
/// right for q0 in (0, pi). Throws GeometryError when the packet overlaps
/// the impurity support (amplitude > 1e-6 on a V_n != 0 site, or
/// n0 + 3w not left of the support).
WavefieldState init_gaussian(int n0, double q0, double w, int half_size,
                             const LatticeModel& model);

struct PropagateOptions {
  double dt = 0.005;           // in 1/kappa; must satisfy dt <= 0.02/kappa
  double snapshot_stride = 0.5;  // 0 disables snapshot recording
  double boundary_tol = 1e-8;  // |c_{+-L}| ceiling (BoundaryBreach guard)
  bool step_check = false;     // re-run at dt/2 and compare final states
  double step_check_tol = 1e-6;
};

struct Trajectory {
  std::vector<double> snapshot_times;
  std::vector<std::vector<cplx>> snapshots;
  std::vector<double> norm_times;  // every step, t = 0 included
  std::vector<double> norms;       // P(t)
  WavefieldState final_state;
};

/// Integrates i dc_n/dt = kappa (c_{n+1} + c_{n-1}) + V_n f(t) c_n with
/// f(t) = cos(omega t) + i Delta sin(omega t), by fixed-step classical RK4
/// from state.time to state.time + t_end. Hard-wall boundaries; throws
/// BoundaryBreach when an edge amplitude exceeds options.boundary_tol and
/// StepTooLarge when the dt precondition or the optional halving check fails.
Trajectory propagate(const WavefieldState& state, const LatticeModel& model,
                     double t_end, const PropagateOptions& options = {});

/// Exact homogeneous-lattice propagator: multiplies each discrete momentum
/// component by exp(-i 2 kappa cos(q) t). The V = 0 reference ("absence of
/// the impurity") for invisibility comparisons; unitary up to roundoff.
WavefieldState free_propagate(const WavefieldState& initial,
                              const LatticeModel& model, double t);

struct InvisibilityMetric {
  double max_site_deviation = 0.0;      // max_n | |c_n| - |c_n_ref| |
  double residual_near_scatterer = 0.0; // sum_{|n| <= halfwidth} |c_n|^2
};

/// Compares a propagated state against a reference with the same geometry
/// and time.
InvisibilityMetric invisibility_metric(const WavefieldState& final_state,
                                       const WavefieldState& reference,
                                       int residual_halfwidth = 20);

/// Probability mass on sites n_min..n_max relative to the initial norm.
double probability_in_range(const WavefieldState& state, int n_min, int n_max);

}  // namespace floquet
