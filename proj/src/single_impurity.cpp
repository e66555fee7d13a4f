#include "floquet/single_impurity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floquet/parallel.hpp"

namespace floquet {

namespace {

constexpr cplx kImagUnit{0.0, 1.0};

void fill_totals(ScatteringAmplitudes& amps, const LatticeModel& model,
                 double near_singular_tol) {
  const ChannelSet& set = amps.channels;
  const double v_g0 = set.at(0).v_g;
  amps.T_total = 0.0;
  amps.R_total = 0.0;
  amps.near_singular = false;
  for (const Channel& ch : set.channels) {
    if (ch.kind != ChannelKind::Propagative) continue;
    if (std::abs(ch.sin_q) < near_singular_tol) amps.near_singular = true;
    const double ratio = ch.v_g / v_g0;
    amps.T_total += ratio * std::norm(amps.t_at(ch.alpha));
    amps.R_total += ratio * std::norm(amps.r_at(ch.alpha));
  }
  (void)model;
}

void fill_reflections(ScatteringAmplitudes& amps) {
  const int order = amps.channels.order;
  amps.r = amps.t;
  amps.r[size_t(order)] -= 1.0;  // r_alpha = t_alpha - delta_{alpha,0}
}

ScatteringAmplitudes solve_at_order(double q, const LatticeModel& model,
                                    int order, const SolveOptions& options) {
  ScatteringAmplitudes amps;
  amps.channels =
      build_channel_set(q, model, order, ChannelSetOptions{options.opening_tol});
  const Tridiagonal m = build_floquet_matrix(amps.channels, model);

  std::vector<cplx> sigma(m.size(), 0.0);
  sigma[size_t(order)] =
      -2.0 * kImagUnit * model.kappa * std::sin(q);  // incidence drive
  amps.t = solve_tridiagonal(m, std::move(sigma), options.pivot_tol);
  fill_reflections(amps);
  fill_totals(amps, model, options.near_singular_tol);
  return amps;
}

double max_amplitude_difference(const ScatteringAmplitudes& coarse,
                                const ScatteringAmplitudes& fine) {
  const int order = coarse.channels.order;
  double worst = 0.0;
  for (int alpha = -order; alpha <= order; ++alpha)
    worst = std::max(worst, std::abs(coarse.t_at(alpha) - fine.t_at(alpha)));
  return worst;
}

}  // namespace

std::optional<double> ScatteringAmplitudes::T_channel(int alpha) const {
  if (std::abs(alpha) > channels.order) return std::nullopt;
  const Channel& ch = channels.at(alpha);
  if (ch.kind != ChannelKind::Propagative) return std::nullopt;
  return ch.v_g / channels.at(0).v_g * std::norm(t_at(alpha));
}

std::optional<double> ScatteringAmplitudes::R_channel(int alpha) const {
  if (std::abs(alpha) > channels.order) return std::nullopt;
  const Channel& ch = channels.at(alpha);
  if (ch.kind != ChannelKind::Propagative) return std::nullopt;
  return ch.v_g / channels.at(0).v_g * std::norm(r_at(alpha));
}

Tridiagonal build_floquet_matrix(const ChannelSet& channels,
                                 const LatticeModel& model) {
  if (!model.is_single_impurity())
    throw ValidationError(
        "Floquet channel matrix requires a single impurity at n = 0");
  const double theta1 = model.theta1_energy();
  const double theta2 = model.theta2_energy();
  const std::size_t m = channels.size();

  Tridiagonal out(m);
  for (std::size_t row = 0; row < m; ++row) {
    const Channel& ch = channels.channels[row];
    out.diag[row] = -2.0 * kImagUnit * model.kappa * ch.sin_q;
    if (row + 1 < m) out.sup[row] = theta1;  // couples to t_{alpha+1}
    if (row > 0) out.sub[row] = theta2;      // couples to t_{alpha-1}
  }
  return out;
}

ScatteringAmplitudes solve_amplitudes(double q, const LatticeModel& model,
                                      const SolveOptions& options) {
  if (!options.adaptive) return solve_at_order(q, model, options.order, options);

  int order = options.order;
  ScatteringAmplitudes coarse = solve_at_order(q, model, order, options);
  while (true) {
    if (2 * order > options.max_order) {
      std::ostringstream os;
      os << "amplitudes not stable to " << options.convergence_tol
         << " at truncation cap " << options.max_order;
      throw NoConvergenceError(os.str());
    }
    ScatteringAmplitudes fine = solve_at_order(q, model, 2 * order, options);
    if (max_amplitude_difference(coarse, fine) <= options.convergence_tol)
      return fine;
    order *= 2;
    coarse = std::move(fine);
  }
}

ScatteringAmplitudes closed_form_delta_one(double q, const LatticeModel& model,
                                           const SolveOptions& options) {
  if (std::abs(std::abs(model.delta) - 1.0) > 1e-12)
    throw ValidationError("closed form requires |Delta| = 1");
  if (!model.is_single_impurity())
    throw ValidationError("closed form requires a single impurity at n = 0");

  ScatteringAmplitudes amps;
  amps.channels = build_channel_set(q, model, options.order,
                                    ChannelSetOptions{options.opening_tol});
  const int order = options.order;
  const double v0 = model.v0();
  amps.t.assign(size_t(2 * order + 1), 0.0);
  amps.t[size_t(order)] = 1.0;  // elastic channel untouched

  if (model.delta > 0.0) {
    // Theta2 = 0: amplitudes cascade downward in alpha.
    for (int alpha = -1; alpha >= -order; --alpha) {
      const cplx denom =
          2.0 * kImagUnit * model.kappa * amps.channels.at(alpha).sin_q;
      amps.t[size_t(alpha + order)] = v0 / denom * amps.t[size_t(alpha + 1 + order)];
    }
  } else {
    // Delta = -1: Theta1 = 0, mirrored cascade upward in alpha.
    for (int alpha = 1; alpha <= order; ++alpha) {
      const cplx denom =
          2.0 * kImagUnit * model.kappa * amps.channels.at(alpha).sin_q;
      amps.t[size_t(alpha + order)] = v0 / denom * amps.t[size_t(alpha - 1 + order)];
    }
  }

  fill_reflections(amps);
  fill_totals(amps, model, options.near_singular_tol);
  return amps;
}

std::vector<double> spectral_grid(const LatticeModel& model, int n_points,
                                  double e_min, double e_max, int order) {
  if (n_points < 2) throw ValidationError("spectral grid needs >= 2 points");
  if (!(e_min < e_max)) throw ValidationError("spectral grid: e_min >= e_max");

  const std::vector<double> openings = channel_opening_energies(model, order);
  const double nudge = 1e-6 * model.kappa;
  const double step = (e_max - e_min) / n_points;

  std::vector<double> grid(size_t(n_points));
  for (int i = 0; i < n_points; ++i) {
    double e = e_min + (i + 0.5) * step;
    for (double s : openings) {
      if (std::abs(e - s) < nudge) {
        e = (e >= s) ? s + nudge : s - nudge;
        break;
      }
    }
    grid[size_t(i)] = e;
  }
  return grid;
}

std::vector<SpectralRow> spectral_scan(const LatticeModel& model,
                                       std::span<const double> energies,
                                       const SolveOptions& options) {
  std::vector<SpectralRow> rows(energies.size());
  parallel_for(energies.size(), [&](std::size_t i) {
    SpectralRow& row = rows[i];
    row.energy = energies[i];
    try {
      const double q = momentum_from_energy(row.energy, model);
      const ScatteringAmplitudes amps = solve_amplitudes(q, model, options);
      row.T = amps.T_total;
      row.R = amps.R_total;
      row.status = amps.near_singular ? "near-singular" : "ok";
      for (int alpha = -3; alpha <= 3; ++alpha) {
        row.T_channels[size_t(alpha + 3)] = amps.T_channel(alpha);
        row.R_channels[size_t(alpha + 3)] = amps.R_channel(alpha);
      }
    } catch (const Error& err) {
      row.status = "error:" + err.kind();
    }
  });
  return rows;
}

ScalingFit singularity_scaling(const LatticeModel& model, int n_points,
                               double window_lo, double window_hi,
                               bool use_closed_form,
                               const SolveOptions& options) {
  if (std::abs(model.delta - 1.0) > 1e-12)
    throw ValidationError("singularity scaling is defined for Delta = 1");
  if (n_points < 3) throw ValidationError("scaling fit needs >= 3 points");
  if (!(window_lo > 0.0) || !(window_lo < window_hi))
    throw ValidationError("scaling fit window must satisfy 0 < lo < hi");

  const double e1 = -2.0 * model.kappa + model.omega;  // alpha = -1 opening

  // log-spaced offsets in (window_lo, window_hi] * kappa above E1
  std::vector<double> log_x(size_t(n_points)), log_y(size_t(n_points));
  const double l0 = std::log(window_lo * model.kappa);
  const double l1 = std::log(window_hi * model.kappa);
  for (int i = 0; i < n_points; ++i) {
    const double offset = std::exp(l0 + (l1 - l0) * i / (n_points - 1));
    const double e = e1 + offset;
    const double q = momentum_from_energy(e, model);
    const ScatteringAmplitudes amps =
        use_closed_form ? closed_form_delta_one(q, model, options)
                        : solve_amplitudes(q, model, options);
    log_x[size_t(i)] = std::log(offset);
    log_y[size_t(i)] = std::log(std::abs(amps.t_at(-1)));
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n_points; ++i) {
    sx += log_x[size_t(i)];
    sy += log_y[size_t(i)];
    sxx += log_x[size_t(i)] * log_x[size_t(i)];
    sxy += log_x[size_t(i)] * log_y[size_t(i)];
  }
  const double denom = n_points * sxx - sx * sx;
  ScalingFit fit;
  fit.n_points = n_points;
  fit.slope = (n_points * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n_points;
  return fit;
}

}  // namespace floquet
