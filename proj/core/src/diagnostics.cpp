#include "gni/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "gni/geometry.hpp"

namespace gni {

double energy(const MechanicalSystem& sys, const ChartPoint& q, const CotangentVec& p) {
  return 0.5 * cometric_norm_sq(sys.metric_at(q), p) + sys.V(q);
}

CotangentVec average_momentum(const MomentumRecord& rec) { return 0.5 * (rec.pre + rec.post); }

double section_violation(const MechanicalSystem& sys, const SymmetrySection& sec,
                         const ChartPoint& q) {
  if (sys.m == 0) return 0.0;
  return (sys.mu(q) * sec.generator_at(q)).lpNorm<Eigen::Infinity>();
}

double jnh(const MechanicalSystem&, const DiscreteLagrangian& Ld, const SymmetrySection& sec,
           const ChartPoint& q_prev, const ChartPoint& q_curr) {
  return legendre_plus(Ld, q_prev, q_curr).dot(sec.generator_at(q_curr));
}

double momentum_equation_residual(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                                  const SymmetrySection& sec, const ChartPoint& q_prev,
                                  const ChartPoint& q_curr, const ChartPoint& q_next) {
  const double lhs = jnh(sys, Ld, sec, q_curr, q_next) - jnh(sys, Ld, sec, q_prev, q_curr);
  const Vector dxi = sec.xi_of_q(q_next) - sec.xi_of_q(q_curr);
  const double rhs = legendre_plus(Ld, q_curr, q_next).dot(sec.generator(q_next, dxi));
  return lhs - rhs;
}

EnergyReport energy_report(const TrajectoryRecord& rec, bool use_post) {
  EnergyReport rep;
  rep.H.reserve(rec.rows.size());
  for (const auto& r : rec.rows) rep.H.push_back(use_post ? r.energy_post : r.energy);
  for (double e : rep.H) rep.max_drift = std::max(rep.max_drift, std::abs(e - rep.H.front()));
  return rep;
}

std::vector<double> momentum_map_series(const TrajectoryRecord& rec,
                                        const SymmetrySection& sec) {
  std::vector<double> out;
  out.reserve(rec.rows.size());
  for (const auto& r : rec.rows) out.push_back(r.p_post.dot(sec.generator_at(r.q)));
  return out;
}

}  // namespace gni
