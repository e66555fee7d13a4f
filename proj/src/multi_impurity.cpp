#include "floquet/multi_impurity.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floquet {

namespace {

constexpr cplx kImagUnit{0.0, 1.0};

using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

struct Window {
  int n_left, n_right;
  int size() const { return n_right - n_left + 1; }
};

Window make_window(const LatticeModel& model, int margin) {
  return Window{model.support_min() - margin, model.support_max() + margin};
}

// Extracts t_alpha and r_alpha from the field at the innermost margin sites,
// where the one-sided asymptotic forms already hold; evaluating further out
// would amplify roundoff through the evanescent exponentials.
void extract_amplitudes(FloquetField& field, const LatticeModel& model,
                        int margin) {
  const int order = field.channels.order;
  const int n_t = field.n_right - margin;  // support_max
  const int n_r = field.n_left + margin;   // support_min
  field.t.assign(size_t(2 * order + 1), 0.0);
  field.r.assign(size_t(2 * order + 1), 0.0);
  const double q0 = field.channels.q0;
  for (int alpha = -order; alpha <= order; ++alpha) {
    const cplx qa = field.channels.at(alpha).q;
    field.t[size_t(alpha + order)] =
        field.phi_at(alpha, n_t) * std::exp(kImagUnit * qa * double(n_t));
    cplx left = field.phi_at(alpha, n_r);
    if (alpha == 0) left -= std::exp(-kImagUnit * q0 * double(n_r));
    field.r[size_t(alpha + order)] =
        left * std::exp(-kImagUnit * qa * double(n_r));
  }
  (void)model;
}

void fill_totals(FloquetField& field) {
  const double v_g0 = field.channels.at(0).v_g;
  field.T_total = 0.0;
  field.R_total = 0.0;
  for (const Channel& ch : field.channels.channels) {
    if (ch.kind != ChannelKind::Propagative) continue;
    const double ratio = ch.v_g / v_g0;
    field.T_total += ratio * std::norm(field.t_at(ch.alpha));
    field.R_total += ratio * std::norm(field.r_at(ch.alpha));
  }
}

FloquetField solve_once(double q, const LatticeModel& model, int order,
                        int margin, const LatticeSolveOptions& options) {
  FloquetField field;
  field.channels =
      build_channel_set(q, model, order, ChannelSetOptions{options.opening_tol});
  const Window win = make_window(model, margin);
  field.n_left = win.n_left;
  field.n_right = win.n_right;

  const int width = win.size();
  const int n_channels = 2 * order + 1;
  const auto index = [&](int ch, int col) { return ch * width + col; };

  std::vector<Triplet> triplets;
  triplets.reserve(size_t(n_channels) * size_t(width) * 5);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n_channels * width);

  const double kappa = model.kappa;
  const double theta1 = model.theta1();
  const double theta2 = model.theta2();

  for (int ch = 0; ch < n_channels; ++ch) {
    const int alpha = ch - order;
    const Channel& channel = field.channels.at(alpha);
    const cplx omega_alpha = field.channels.energy + alpha * model.omega;
    const cplx outgoing = std::exp(-kImagUnit * channel.q);

    for (int col = 0; col < width; ++col) {
      const int n = win.n_left + col;
      const int row = index(ch, col);
      const double v_n = model.potential_at(n);

      cplx diag = omega_alpha;
      if (col == 0 || col == width - 1) {
        // One-sided closure: the exterior site is eliminated through the
        // outgoing/decaying relation Phi(exterior) = e^{-i q_alpha} Phi(edge)
        // (+ the known incident term on the left, moved to the rhs).
        diag -= kappa * outgoing;
      }
      triplets.emplace_back(row, row, diag);
      if (col > 0) triplets.emplace_back(row, index(ch, col - 1), -kappa);
      if (col < width - 1) triplets.emplace_back(row, index(ch, col + 1), -kappa);

      if (v_n != 0.0) {
        if (ch + 1 < n_channels && theta1 != 0.0)
          triplets.emplace_back(row, index(ch + 1, col), -theta1 * v_n);
        if (ch - 1 >= 0 && theta2 != 0.0)
          triplets.emplace_back(row, index(ch - 1, col), -theta2 * v_n);
      }

      if (alpha == 0 && col == 0) {
        rhs[row] = 2.0 * kImagUnit * kappa * std::sin(q) *
                   std::exp(-kImagUnit * q * double(win.n_left));
      }
    }
  }

  SparseMatrix mat(n_channels * width, n_channels * width);
  mat.setFromTriplets(triplets.begin(), triplets.end());
  mat.makeCompressed();

  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(mat);
  lu.factorize(mat);
  if (lu.info() != Eigen::Success)
    throw SingularMatrixError("sparse Floquet lattice factorization failed");
  const Eigen::VectorXcd solution = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw SingularMatrixError("sparse Floquet lattice solve failed");

  field.phi.assign(size_t(n_channels), std::vector<cplx>(size_t(width)));
  for (int ch = 0; ch < n_channels; ++ch)
    for (int col = 0; col < width; ++col)
      field.phi[size_t(ch)][size_t(col)] = solution[index(ch, col)];

  extract_amplitudes(field, model, margin);
  fill_totals(field);
  return field;
}

// Largest propagative-amplitude change between two solutions, over the
// channels of the coarser one.
double propagative_difference(const FloquetField& coarse,
                              const FloquetField& fine) {
  double worst = 0.0;
  for (const Channel& ch : coarse.channels.channels) {
    if (ch.kind != ChannelKind::Propagative) continue;
    worst = std::max(worst, std::abs(coarse.t_at(ch.alpha) - fine.t_at(ch.alpha)));
    worst = std::max(worst, std::abs(coarse.r_at(ch.alpha) - fine.r_at(ch.alpha)));
  }
  return worst;
}

}  // namespace

FloquetField solve_floquet_lattice(double q, const LatticeModel& model,
                                   const LatticeSolveOptions& options) {
  model.validate();
  if (options.margin < 2) throw ValidationError("window margin must be >= 2");

  if (!options.adaptive)
    return solve_once(q, model, options.order, options.margin, options);

  int order = options.order;
  int margin = options.margin;
  FloquetField coarse = solve_once(q, model, order, margin, options);
  while (true) {
    if (2 * order > options.max_order) {
      std::ostringstream os;
      os << "lattice amplitudes not stable to " << options.convergence_tol
         << " at truncation cap " << options.max_order;
      throw NoConvergenceError(os.str());
    }
    FloquetField fine = solve_once(q, model, 2 * order, 2 * margin, options);
    if (propagative_difference(coarse, fine) <= options.convergence_tol)
      return fine;
    order *= 2;
    margin *= 2;
    coarse = std::move(fine);
  }
}

FloquetField closed_form_multi_delta_one(double q, const LatticeModel& model,
                                         const LatticeSolveOptions& options) {
  model.validate();
  if (std::abs(model.delta - 1.0) > 1e-12)
    throw ValidationError("multi-impurity closed form requires Delta = 1");
  if (options.margin < 2) throw ValidationError("window margin must be >= 2");

  FloquetField field;
  const int order = options.order;
  field.channels = build_channel_set(q, model, order,
                                     ChannelSetOptions{options.opening_tol});
  const Window win = make_window(model, options.margin);
  field.n_left = win.n_left;
  field.n_right = win.n_right;
  const int width = win.size();

  field.phi.assign(size_t(2 * order + 1), std::vector<cplx>(size_t(width), 0.0));

  // Elastic component: the incident Bloch wave, an exact eigenvector of H0.
  for (int col = 0; col < width; ++col)
    field.phi[size_t(order)][size_t(col)] =
        std::exp(-kImagUnit * q * double(win.n_left + col));

  // Downward cascade: (Omega_alpha - H0) Phi_alpha = H1 Phi_{alpha+1} with
  // outgoing/decaying closure at the window edges. Band edges of Omega_alpha
  // are channel openings and surface as singular pivots.
  for (int alpha = -1; alpha >= -order; --alpha) {
    const Channel& channel = field.channels.at(alpha);
    const cplx omega_alpha = field.channels.energy + alpha * model.omega;
    const cplx outgoing = std::exp(-kImagUnit * channel.q);

    Tridiagonal m(size_t(width));
    std::vector<cplx> rhs(size_t(width), 0.0);
    for (int col = 0; col < width; ++col) {
      const int n = win.n_left + col;
      cplx diag = omega_alpha;
      if (col == 0 || col == width - 1) diag -= model.kappa * outgoing;
      m.diag[size_t(col)] = diag;
      if (col > 0) m.sub[size_t(col)] = -model.kappa;
      if (col < width - 1) m.sup[size_t(col)] = -model.kappa;
      rhs[size_t(col)] =
          model.potential_at(n) * field.phi[size_t(alpha + 1 + order)][size_t(col)];
    }
    field.phi[size_t(alpha + order)] = solve_tridiagonal(m, std::move(rhs));
  }

  extract_amplitudes(field, model, options.margin);
  fill_totals(field);
  return field;
}

}  // namespace floquet
