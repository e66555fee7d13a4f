#include "floquet/bound_states.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace floquet {

namespace {

constexpr cplx kImagUnit{0.0, 1.0};

// Bound-state branch: Im(q) <= 0 so that e^{-i q |n|} decays away from the
// impurity. Principal acos already lands there for Im(z) >= 0; the conjugate
// flip handles the lower half-plane (antiholomorphic twice = holomorphic on
// each open half-plane, cuts confined to the real axis).
cplx channel_momentum(cplx z) {
  cplx q = std::acos(z);
  if (q.imag() > 0.0) q = std::conj(q);
  return q;
}

cplx diagonal_entry(cplx E, int alpha, const LatticeModel& model) {
  const cplx z = (E + double(alpha) * model.omega) / (2.0 * model.kappa);
  return -2.0 * kImagUnit * model.kappa * std::sin(channel_momentum(z));
}

}  // namespace

cplx ScaledDeterminant::value() const {
  return mantissa * std::pow(10.0, log10_scale);
}

double ScaledDeterminant::log10_abs() const {
  const double m = std::abs(mantissa);
  if (m == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log10(m) + log10_scale;
}

ScaledDeterminant determinant(cplx E, const LatticeModel& model,
                              int n_amplitudes) {
  model.validate();
  if (n_amplitudes < 3 || n_amplitudes % 2 == 0)
    throw ValidationError("determinant truncation must be odd and >= 3");
  if (!model.is_single_impurity())
    throw ValidationError("bound-state determinant requires a single impurity");

  const int half = (n_amplitudes - 1) / 2;
  const double theta_product =
      model.theta1_energy() * model.theta2_energy();  // (V0^2/4)(1 - Delta^2)

  // Leading principal minors D_k = a_k D_{k-1} - Theta1 Theta2 D_{k-2},
  // rescaled each step so zeros survive and magnitudes stay bounded.
  cplx d_prev2{1.0, 0.0};  // D_{-1}
  cplx d_prev{0.0, 0.0};   // filled with D_0 below
  double log10_scale = 0.0;

  for (int k = 0; k < n_amplitudes; ++k) {
    const int alpha = k - half;
    const cplx a_k = diagonal_entry(E, alpha, model);
    const cplx d_k = (k == 0) ? a_k * d_prev2
                              : a_k * d_prev - theta_product * d_prev2;
    d_prev2 = d_prev;
    d_prev = d_k;
    const double mag = std::max(std::abs(d_prev), std::abs(d_prev2));
    if (mag > 0.0 && (mag > 1e50 || mag < 1e-50)) {
      d_prev /= mag;
      d_prev2 /= mag;
      log10_scale += std::log10(mag);
    }
  }

  ScaledDeterminant out;
  out.mantissa = d_prev;
  out.log10_scale = log10_scale;
  return out;
}

std::string to_string(RootVerdict verdict) {
  switch (verdict) {
    case RootVerdict::Accepted: return "Accepted";
    case RootVerdict::RejectedRealChannel: return "RejectedRealChannel";
    case RootVerdict::RejectedBandEdge: return "RejectedBandEdge";
  }
  return "unknown";
}

namespace {

struct Candidate {
  cplx energy;
};

// Newton refinement on the scaled determinant; derivative by central
// difference. Returns refined energy, or nullopt when the iteration leaves
// the neighborhood or stalls on a non-zero minimum.
std::optional<cplx> refine_root(cplx e0, const LatticeModel& model, int n,
                                double step_scale) {
  cplx e = e0;
  const double h = 1e-7 * std::max(1.0, std::abs(e0)) * model.kappa;
  for (int iter = 0; iter < 60; ++iter) {
    const ScaledDeterminant f = determinant(e, model, n);
    if (std::abs(f.mantissa) == 0.0) return e;  // exact zero
    const ScaledDeterminant fp = determinant(e + h, model, n);
    const ScaledDeterminant fm = determinant(e - h, model, n);
    // common scale: mantissas comparable after shifting to f's scale
    const double s1 = std::pow(10.0, fp.log10_scale - f.log10_scale);
    const double s2 = std::pow(10.0, fm.log10_scale - f.log10_scale);
    const cplx deriv = (fp.mantissa * s1 - fm.mantissa * s2) / (2.0 * h);
    if (std::abs(deriv) == 0.0) return std::nullopt;
    const cplx delta = f.mantissa / deriv;
    e -= delta;
    if (std::abs(e - e0) > 50.0 * step_scale) return std::nullopt;  // escaped
    if (std::abs(delta) < 1e-13 * std::max(1.0, std::abs(e))) {
      // Confirm an actual zero: the value must collapse relative to the
      // determinant one resolution step away.
      const ScaledDeterminant at = determinant(e, model, n);
      const ScaledDeterminant away =
          determinant(e + cplx(step_scale, step_scale), model, n);
      const double drop = at.log10_abs() - away.log10_abs();
      if (std::isinf(drop) || drop < -6.0) return e;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool near_any(cplx e, const std::vector<cplx>& list, double tol) {
  for (const cplx& x : list)
    if (std::abs(e - x) < tol) return true;
  return false;
}

// Channel amplitudes B_a at a root: null vector of the dense truncation,
// via SVD (robust against the near-defective band-edge cases).
Eigen::VectorXcd null_vector(cplx E, const LatticeModel& model, int n) {
  const int half = (n - 1) / 2;
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);
  const double theta1 = model.theta1_energy();
  const double theta2 = model.theta2_energy();
  for (int k = 0; k < n; ++k) {
    L(k, k) = diagonal_entry(E, k - half, model);
    if (k + 1 < n) L(k, k + 1) = theta1;
    if (k > 0) L(k, k - 1) = theta2;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(L, Eigen::ComputeFullV);
  return svd.matrixV().col(n - 1);
}

RootVerdict screen_root(cplx E, const LatticeModel& model, int n) {
  const int half = (n - 1) / 2;

  // Band-edge roots: some q_a in {0, +-pi}; the Floquet amplitude ansatz is
  // unbounded there, so the root never joins the quasi-energy spectrum.
  for (int alpha = -half; alpha <= half; ++alpha) {
    const cplx omega_alpha = E + double(alpha) * model.omega;
    if (std::abs(omega_alpha - 2.0 * model.kappa) < 1e-6 * model.kappa ||
        std::abs(omega_alpha + 2.0 * model.kappa) < 1e-6 * model.kappa)
      return RootVerdict::RejectedBandEdge;
  }

  const Eigen::VectorXcd b = null_vector(E, model, n);
  const double b_max = b.cwiseAbs().maxCoeff();
  for (int k = 0; k < n; ++k) {
    if (std::abs(b[k]) <= 1e-8 * b_max) continue;
    const int alpha = k - half;
    const cplx z = (E + double(alpha) * model.omega) / (2.0 * model.kappa);
    const cplx q = channel_momentum(z);
    if (std::abs(q.imag()) < 1e-8)  // real channel: delocalized component
      return RootVerdict::RejectedRealChannel;
  }
  return RootVerdict::Accepted;
}

std::vector<cplx> locate_roots(const LatticeModel& model, int n,
                               const BoundStateSearchOptions& options) {
  const int half = (n - 1) / 2;
  const double edge = 2.0 * model.kappa + half * model.omega;
  const double h = options.real_resolution * model.kappa;

  std::vector<cplx> roots;
  const double dedup_tol = 1e-6 * model.kappa;

  // Real-axis branch points E = -a*omega +- 2*kappa; excluded from
  // refinement neighborhoods, checked directly as determinant zeros.
  std::vector<double> branch_points;
  for (int alpha = -half; alpha <= half; ++alpha) {
    branch_points.push_back(-double(alpha) * model.omega + 2.0 * model.kappa);
    branch_points.push_back(-double(alpha) * model.omega - 2.0 * model.kappa);
  }
  for (double bp : branch_points) {
    const ScaledDeterminant f = determinant(cplx(bp, 0.0), model, n);
    if (std::abs(f.mantissa) < 1e-12 && !near_any(cplx(bp, 0.0), roots, dedup_tol))
      roots.emplace_back(bp, 0.0);
  }

  // Real-axis scan: flag local minima of log|I_N| that dip well below their
  // neighborhood, then Newton-refine.
  const long n_samples = std::lround((2.0 * edge) / h) + 1;
  std::vector<double> log_abs(size_t(n_samples));
  std::vector<double> energies(size_t(n_samples));
  for (long i = 0; i < n_samples; ++i) {
    const double e = -edge + double(i) * h;
    energies[size_t(i)] = e;
    log_abs[size_t(i)] = determinant(cplx(e, 0.0), model, n).log10_abs();
  }
  std::vector<cplx> cell_roots;
  for (long i = 1; i + 1 < n_samples; ++i) {
    const double v = log_abs[size_t(i)];
    if (std::isinf(v)) {  // exact zero on a sample
      if (!near_any(cplx(energies[size_t(i)], 0.0), roots, dedup_tol))
        roots.emplace_back(energies[size_t(i)], 0.0);
      continue;
    }
    if (v >= log_abs[size_t(i - 1)] || v > log_abs[size_t(i + 1)]) continue;
    const double drop =
        std::min(log_abs[size_t(i - 1)], log_abs[size_t(i + 1)]) - v;
    if (drop < 1.0) continue;  // shallow dip: not a zero
    const cplx e0(energies[size_t(i)], 0.0);
    bool excluded = false;
    for (double bp : branch_points)
      if (std::abs(e0.real() - bp) < options.branch_exclusion * model.kappa)
        excluded = true;
    if (excluded) continue;
    if (auto root = refine_root(e0, model, n, h)) {
      if (!near_any(*root, roots, dedup_tol)) {
        roots.push_back(*root);
        if (near_any(*root, cell_roots, h))
          throw ScanResolutionError(
              "two refined roots inside one real-axis scan cell; decrease "
              "real_resolution");
        cell_roots.push_back(*root);
      }
    }
  }

  // Complex-plane sweep: argument-principle winding per grid cell on each
  // open half-plane (the branch cuts sit on the real axis).
  for (double sign : {1.0, -1.0}) {
    const double im_lo = 1e-4 * model.kappa;
    const double im_hi = 2.0 * model.kappa;
    const int nx = options.box_nx, ny = options.box_ny;
    std::vector<double> args(size_t((nx + 1) * (ny + 1)));
    std::vector<bool> zero_flag(size_t((nx + 1) * (ny + 1)), false);
    auto arg_at = [&](int ix, int iy) -> double& {
      return args[size_t(iy * (nx + 1) + ix)];
    };
    for (int iy = 0; iy <= ny; ++iy) {
      const double im = sign * (im_lo + (im_hi - im_lo) * double(iy) / ny);
      for (int ix = 0; ix <= nx; ++ix) {
        const double re = -edge + 2.0 * edge * double(ix) / nx;
        const ScaledDeterminant f = determinant(cplx(re, im), model, n);
        zero_flag[size_t(iy * (nx + 1) + ix)] = (std::abs(f.mantissa) == 0.0);
        arg_at(ix, iy) = std::arg(f.mantissa);
      }
    }
    auto wrapped = [](double d) {
      while (d > M_PI) d -= 2.0 * M_PI;
      while (d < -M_PI) d += 2.0 * M_PI;
      return d;
    };
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        double winding = 0.0;
        winding += wrapped(arg_at(ix + 1, iy) - arg_at(ix, iy));
        winding += wrapped(arg_at(ix + 1, iy + 1) - arg_at(ix + 1, iy));
        winding += wrapped(arg_at(ix, iy + 1) - arg_at(ix + 1, iy + 1));
        winding += wrapped(arg_at(ix, iy) - arg_at(ix, iy + 1));
        if (std::abs(winding) < M_PI) continue;  // no enclosed zero
        const double re = -edge + 2.0 * edge * (ix + 0.5) / nx;
        const double im =
            sign * (im_lo + (im_hi - im_lo) * (iy + 0.5) / ny);
        if (auto root = refine_root(cplx(re, im), model, n,
                                    2.0 * edge / nx)) {
          if (!near_any(*root, roots, dedup_tol)) roots.push_back(*root);
        }
      }
    }
  }

  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

bool same_root_set(const std::vector<cplx>& a, const std::vector<cplx>& b,
                   double tol) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

BoundStateReport find_bound_states(const LatticeModel& model,
                                   const BoundStateSearchOptions& options) {
  model.validate();
  if (!model.is_single_impurity())
    throw ValidationError("bound-state search requires a single impurity");

  BoundStateReport report;
  report.params = model;
  report.certified_regime =
      std::abs(model.delta) <= 1.0 && model.omega <= 4.0 * model.kappa;

  int n = options.n_amplitudes;
  if (n % 2 == 0) ++n;
  std::vector<cplx> roots = locate_roots(model, n, options);
  if (options.stabilize) {
    while (true) {
      const int n_next = 2 * n + 1;
      if (n_next > options.max_amplitudes) break;
      const std::vector<cplx> finer = locate_roots(model, n_next, options);
      // Root sets gain band-edge points as the truncation widens; compare on
      // the shared window only.
      const double window = 2.0 * model.kappa + ((n - 1) / 2) * model.omega;
      std::vector<cplx> finer_in_window;
      for (cplx r : finer)
        if (std::abs(r.real()) <= window + 1e-9) finer_in_window.push_back(r);
      if (same_root_set(roots, finer_in_window, 1e-6 * model.kappa)) {
        roots = finer;
        n = n_next;
        break;
      }
      roots = finer;
      n = n_next;
    }
  }
  report.n_amplitudes = n;

  for (cplx root : roots) {
    CandidateRoot cand;
    cand.energy = root;
    cand.log10_abs_det = determinant(root, model, n).log10_abs();
    cand.verdict = screen_root(root, model, n);
    report.candidate_roots.push_back(cand);
    if (cand.verdict == RootVerdict::Accepted) report.no_bound_states = false;
  }
  return report;
}

}  // namespace floquet
