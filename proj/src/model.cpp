#include "floquet/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floquet {

LatticeModel LatticeModel::single_impurity(double v0, double omega,
                                           double delta, double kappa) {
  LatticeModel m;
  m.kappa = kappa;
  m.omega = omega;
  m.delta = delta;
  if (v0 != 0.0) m.potential[0] = v0;
  m.validate();
  return m;
}

void LatticeModel::validate() const {
  if (!(kappa > 0.0)) throw ValidationError("kappa must be > 0");
  if (omega < 0.0) throw ValidationError("omega must be >= 0");
}

bool LatticeModel::is_single_impurity() const {
  for (const auto& [n, v] : potential)
    if (n != 0 && v != 0.0) return false;
  return true;
}

double LatticeModel::v0() const { return potential_at(0); }

double LatticeModel::potential_at(int n) const {
  auto it = potential.find(n);
  return it == potential.end() ? 0.0 : it->second;
}

int LatticeModel::support_min() const {
  int lo = 0;
  for (const auto& [n, v] : potential)
    if (v != 0.0) lo = std::min(lo, n);
  return lo;
}

int LatticeModel::support_max() const {
  int hi = 0;
  for (const auto& [n, v] : potential)
    if (v != 0.0) hi = std::max(hi, n);
  return hi;
}

double dispersion_energy(double q, const LatticeModel& model) {
  return 2.0 * model.kappa * std::cos(q);
}

double momentum_from_energy(double E, const LatticeModel& model) {
  const double x = E / (2.0 * model.kappa);
  if (std::abs(x) >= 1.0)
    throw ChannelOpeningError(0, E, "energy on or outside the band edge");
  return std::acos(x);
}

namespace {

// Principal-branch complex arccos with the sign of the imaginary part
// flipped so that Im(q) < 0 for evanescent channels. Propagative channels
// come out real in [0, pi].
cplx branch_acos(double x) {
  cplx q = std::acos(cplx(x, 0.0));
  if (q.imag() > 0.0) q = std::conj(q);
  return q;
}

}  // namespace

ChannelSet build_channel_set(double q, const LatticeModel& model, int order,
                             const ChannelSetOptions& options) {
  model.validate();
  if (order < 1) throw ValidationError("channel truncation order must be >= 1");
  if (!(q > 0.0) || !(q < M_PI)) {
    std::ostringstream os;
    os << "incidence momentum q = " << q
       << " outside (0, pi): zero incident group velocity";
    throw ChannelOpeningError(0, dispersion_energy(q, model), os.str());
  }

  ChannelSet set;
  set.q0 = q;
  set.energy = dispersion_energy(q, model);
  set.order = order;
  set.channels.reserve(size_t(2 * order + 1));

  const double cos_q0 = std::cos(q);
  for (int alpha = -order; alpha <= order; ++alpha) {
    Channel ch;
    ch.alpha = alpha;
    ch.cos_q = cos_q0 + alpha * model.omega / (2.0 * model.kappa);
    if (std::abs(1.0 - std::abs(ch.cos_q)) < options.opening_tol) {
      std::ostringstream os;
      os << "channel alpha = " << alpha << " opens at E = " << set.energy
         << " (cos q_alpha = " << ch.cos_q << ")";
      throw ChannelOpeningError(alpha, set.energy, os.str());
    }
    ch.q = branch_acos(ch.cos_q);
    ch.sin_q = std::sin(ch.q);
    if (std::abs(ch.cos_q) <= 1.0) {
      ch.kind = ChannelKind::Propagative;
      ch.v_g = 2.0 * model.kappa * ch.sin_q.real();
    } else {
      ch.kind = ChannelKind::Evanescent;
      ch.v_g = 0.0;
    }
    set.channels.push_back(ch);
  }
  return set;
}

std::vector<double> channel_opening_energies(const LatticeModel& model,
                                             int order) {
  std::vector<double> out;
  const double edge = 2.0 * model.kappa;
  for (int alpha = -order; alpha <= order; ++alpha) {
    for (double s : {-edge, edge}) {
      const double e = s - alpha * model.omega;
      if (e > -edge && e < edge) out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            out.end());
  return out;
}

}  // namespace floquet
