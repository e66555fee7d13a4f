#include "floquet/time_domain.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace floquet {

double WavefieldState::total_probability() const {
  double sum = 0.0;
  for (const cplx& v : c) sum += std::norm(v);
  return sum;
}

WavefieldState init_gaussian(int n0, double q0, double w, int half_size,
                             const LatticeModel& model) {
  if (w < 4.0) throw ValidationError("packet width w must be >= 4 sites");
  if (half_size < 8) throw ValidationError("lattice half-size too small");

  const bool has_impurity = [&] {
    for (const auto& [n, v] : model.potential)
      if (v != 0.0) return true;
    return false;
  }();
  if (has_impurity && !(n0 + 3.0 * w < model.support_min())) {
    std::ostringstream os;
    os << "packet (n0 = " << n0 << ", w = " << w
       << ") is not left of the impurity support starting at "
       << model.support_min();
    throw GeometryError(os.str());
  }

  WavefieldState state;
  state.half_size = half_size;
  state.c.assign(size_t(2 * half_size + 1), 0.0);
  state.packet_center = n0;
  state.packet_width = w;

  const cplx minus_i{0.0, -1.0};
  double total = 0.0;
  for (int n = -half_size; n <= half_size; ++n) {
    const double d = double(n - n0);
    const double envelope = std::exp(-d * d / (w * w));
    state.at(n) = envelope * std::exp(minus_i * (q0 * double(n)));
    total += envelope * envelope;
  }
  const double scale = 1.0 / std::sqrt(total);
  for (cplx& v : state.c) v *= scale;
  state.norm0 = 1.0;

  for (const auto& [n, v] : model.potential) {
    if (v == 0.0 || std::abs(n) > half_size) continue;
    if (std::abs(state.at(n)) > 1e-6) {
      std::ostringstream os;
      os << "initial packet amplitude " << std::abs(state.at(n))
         << " overlaps impurity site n = " << n;
      throw GeometryError(os.str());
    }
  }
  return state;
}

namespace {

// Split real/imaginary workspace for the RK4 stepper. The stencil
// i dc/dt = kappa (c+ + c-) + V f(t) c becomes, with c = x + i y and
// H c = X + i Y: dx/dt = Y, dy/dt = -X.
struct Workspace {
  std::vector<double> re, im;       // current state
  std::vector<double> kre, kim;     // stage derivative
  std::vector<double> tre, tim;     // stage input
  std::vector<double> are, aim;     // accumulated k1 + 2k2 + 2k3

  explicit Workspace(size_t m)
      : re(m), im(m), kre(m), kim(m), tre(m), tim(m), are(m), aim(m) {}
};

struct ImpuritySite {
  size_t idx;
  double v;
};

void derivative(const std::vector<double>& x, const std::vector<double>& y,
                std::vector<double>& dx, std::vector<double>& dy,
                double kappa, const std::vector<ImpuritySite>& sites,
                double f_re, double f_im) {
  const size_t m = x.size();
  const double* xr = x.data();
  const double* yr = y.data();
  double* dxr = dx.data();
  double* dyr = dy.data();

  // interior stencil (hard wall: missing neighbors are zero)
  dxr[0] = kappa * yr[1];
  dyr[0] = -kappa * xr[1];
  for (size_t n = 1; n + 1 < m; ++n) {
    const double hx = kappa * (xr[n + 1] + xr[n - 1]);
    const double hy = kappa * (yr[n + 1] + yr[n - 1]);
    dxr[n] = hy;
    dyr[n] = -hx;
  }
  dxr[m - 1] = kappa * yr[m - 2];
  dyr[m - 1] = -kappa * xr[m - 2];

  // impurity terms: H += V_n (f_re + i f_im) c_n on the support only
  for (const ImpuritySite& s : sites) {
    const double hx = s.v * (f_re * xr[s.idx] - f_im * yr[s.idx]);
    const double hy = s.v * (f_re * yr[s.idx] + f_im * xr[s.idx]);
    dxr[s.idx] += hy;
    dyr[s.idx] -= hx;
  }
}

Trajectory integrate(const WavefieldState& state, const LatticeModel& model,
                     double t_end, const PropagateOptions& options,
                     bool record) {
  const size_t m = state.c.size();
  Workspace ws(m);
  for (size_t i = 0; i < m; ++i) {
    ws.re[i] = state.c[i].real();
    ws.im[i] = state.c[i].imag();
  }

  std::vector<ImpuritySite> sites;
  for (const auto& [n, v] : model.potential) {
    if (v == 0.0) continue;
    if (std::abs(n) > state.half_size)
      throw GeometryError("impurity site outside the lattice window");
    sites.push_back({size_t(n + state.half_size), v});
  }

  const long n_steps = std::lround(std::ceil(t_end / options.dt - 1e-12));
  const double dt = t_end / double(n_steps);
  const long stride_steps =
      options.snapshot_stride > 0.0
          ? std::max(1L, std::lround(options.snapshot_stride / dt))
          : 0;

  Trajectory traj;
  auto record_norm = [&](double t) {
    if (!record) return;
    double sum = 0.0;
    for (size_t i = 0; i < m; ++i)
      sum += ws.re[i] * ws.re[i] + ws.im[i] * ws.im[i];
    traj.norm_times.push_back(t);
    traj.norms.push_back(sum / state.norm0);
  };
  auto record_snapshot = [&](double t) {
    if (!record || stride_steps == 0) return;
    std::vector<cplx> snap(m);
    for (size_t i = 0; i < m; ++i) snap[i] = cplx(ws.re[i], ws.im[i]);
    traj.snapshot_times.push_back(t);
    traj.snapshots.push_back(std::move(snap));
  };
  auto check_boundary = [&](double t) {
    const double tol2 = options.boundary_tol * options.boundary_tol;
    const double lo = ws.re[0] * ws.re[0] + ws.im[0] * ws.im[0];
    const double hi = ws.re[m - 1] * ws.re[m - 1] + ws.im[m - 1] * ws.im[m - 1];
    if (lo > tol2 || hi > tol2) {
      std::ostringstream os;
      os << "edge amplitude " << std::sqrt(std::max(lo, hi)) << " at t = " << t
         << " exceeds " << options.boundary_tol;
      throw BoundaryBreachError(os.str());
    }
  };

  record_norm(state.time);
  record_snapshot(state.time);
  check_boundary(state.time);

  const double drive_re_amp = 1.0;           // cos(omega t)
  const double drive_im_amp = model.delta;   // Delta sin(omega t)
  auto drive = [&](double t, double& f_re, double& f_im) {
    f_re = drive_re_amp * std::cos(model.omega * t);
    f_im = drive_im_amp * std::sin(model.omega * t);
  };

  double t = state.time;
  for (long step = 0; step < n_steps; ++step) {
    double f_re, f_im;

    // k1
    drive(t, f_re, f_im);
    derivative(ws.re, ws.im, ws.kre, ws.kim, model.kappa, sites, f_re, f_im);
    for (size_t i = 0; i < m; ++i) {
      ws.are[i] = ws.kre[i];
      ws.aim[i] = ws.kim[i];
      ws.tre[i] = ws.re[i] + 0.5 * dt * ws.kre[i];
      ws.tim[i] = ws.im[i] + 0.5 * dt * ws.kim[i];
    }
    // k2
    drive(t + 0.5 * dt, f_re, f_im);
    derivative(ws.tre, ws.tim, ws.kre, ws.kim, model.kappa, sites, f_re, f_im);
    for (size_t i = 0; i < m; ++i) {
      ws.are[i] += 2.0 * ws.kre[i];
      ws.aim[i] += 2.0 * ws.kim[i];
      ws.tre[i] = ws.re[i] + 0.5 * dt * ws.kre[i];
      ws.tim[i] = ws.im[i] + 0.5 * dt * ws.kim[i];
    }
    // k3
    derivative(ws.tre, ws.tim, ws.kre, ws.kim, model.kappa, sites, f_re, f_im);
    for (size_t i = 0; i < m; ++i) {
      ws.are[i] += 2.0 * ws.kre[i];
      ws.aim[i] += 2.0 * ws.kim[i];
      ws.tre[i] = ws.re[i] + dt * ws.kre[i];
      ws.tim[i] = ws.im[i] + dt * ws.kim[i];
    }
    // k4 and combine
    drive(t + dt, f_re, f_im);
    derivative(ws.tre, ws.tim, ws.kre, ws.kim, model.kappa, sites, f_re, f_im);
    const double sixth = dt / 6.0;
    for (size_t i = 0; i < m; ++i) {
      ws.re[i] += sixth * (ws.are[i] + ws.kre[i]);
      ws.im[i] += sixth * (ws.aim[i] + ws.kim[i]);
    }

    t = state.time + (step + 1) * dt;
    check_boundary(t);
    record_norm(t);
    if (stride_steps > 0 && ((step + 1) % stride_steps == 0))
      record_snapshot(t);
  }

  traj.final_state.half_size = state.half_size;
  traj.final_state.time = t;
  traj.final_state.norm0 = state.norm0;
  traj.final_state.packet_center = state.packet_center;
  traj.final_state.packet_width = state.packet_width;
  traj.final_state.c.resize(m);
  for (size_t i = 0; i < m; ++i)
    traj.final_state.c[i] = cplx(ws.re[i], ws.im[i]);
  return traj;
}

double max_state_difference(const WavefieldState& a, const WavefieldState& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.c.size(); ++i)
    worst = std::max(worst, std::abs(a.c[i] - b.c[i]));
  return worst;
}

}  // namespace

Trajectory propagate(const WavefieldState& state, const LatticeModel& model,
                     double t_end, const PropagateOptions& options) {
  model.validate();
  if (!(t_end > 0.0)) throw ValidationError("t_end must be > 0");
  if (options.dt <= 0.0 || options.dt > 0.02 / model.kappa) {
    std::ostringstream os;
    os << "dt = " << options.dt << " outside (0, 0.02/kappa]";
    throw StepTooLargeError(os.str());
  }
  if (state.packet_center && state.packet_width) {
    const double margin = double(state.half_size) -
                          std::abs(double(*state.packet_center)) -
                          3.0 * (*state.packet_width);
    if (!(t_end * 2.0 * model.kappa < margin)) {
      std::ostringstream os;
      os << "causality margin violated: t_end * 2 kappa = "
         << t_end * 2.0 * model.kappa << " >= L - |n0| - 3w = " << margin;
      throw ValidationError(os.str());
    }
  }

  Trajectory traj = integrate(state, model, t_end, options, true);

  if (options.step_check) {
    PropagateOptions halved = options;
    halved.dt = options.dt / 2.0;
    halved.step_check = false;
    const Trajectory fine = integrate(state, model, t_end, halved, false);
    const double diff = max_state_difference(traj.final_state, fine.final_state);
    if (diff > options.step_check_tol) {
      std::ostringstream os;
      os << "halving dt changes the final state by " << diff << " > "
         << options.step_check_tol;
      throw StepTooLargeError(os.str());
    }
  }
  return traj;
}

WavefieldState free_propagate(const WavefieldState& initial,
                              const LatticeModel& model, double t) {
  static std::mutex planner_mutex;  // FFTW planner is not thread-safe

  const int m = initial.size();
  WavefieldState out = initial;
  out.time = initial.time + t;

  std::vector<cplx> buf = initial.c;
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());

  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fwd = fftw_plan_dft_1d(m, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(m, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);

  const cplx minus_i{0.0, -1.0};
  for (int k = 0; k < m; ++k) {
    const double q = 2.0 * M_PI * double(k) / double(m);
    const double energy = 2.0 * model.kappa * std::cos(q);
    buf[size_t(k)] *= std::exp(minus_i * (energy * t)) / double(m);
  }
  fftw_execute(bwd);

  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  out.c = std::move(buf);
  return out;
}

InvisibilityMetric invisibility_metric(const WavefieldState& final_state,
                                       const WavefieldState& reference,
                                       int residual_halfwidth) {
  if (final_state.half_size != reference.half_size)
    throw ValidationError("invisibility metric: geometry mismatch");

  InvisibilityMetric metric;
  for (size_t i = 0; i < final_state.c.size(); ++i) {
    const double dev =
        std::abs(std::abs(final_state.c[i]) - std::abs(reference.c[i]));
    metric.max_site_deviation = std::max(metric.max_site_deviation, dev);
  }
  const int lo = std::max(-final_state.half_size, -residual_halfwidth);
  const int hi = std::min(final_state.half_size, residual_halfwidth);
  for (int n = lo; n <= hi; ++n)
    metric.residual_near_scatterer += std::norm(final_state.at(n));
  return metric;
}

double probability_in_range(const WavefieldState& state, int n_min, int n_max) {
  const int lo = std::max(-state.half_size, n_min);
  const int hi = std::min(state.half_size, n_max);
  double sum = 0.0;
  for (int n = lo; n <= hi; ++n) sum += std::norm(state.at(n));
  return sum / state.norm0;
}

}  // namespace floquet
