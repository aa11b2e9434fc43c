#include "gni/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace gni {
namespace {

template <typename Get>
double max_over(const std::vector<TrajectoryRow>& rows, Get get) {
  double best = 0.0;
  for (const auto& r : rows) best = std::max(best, get(r));
  return best;
}

}  // namespace

double TrajectoryRecord::max_energy_drift() const {
  if (rows.empty()) return 0.0;
  const double h0 = rows.front().energy;
  return max_over(rows, [h0](const TrajectoryRow& r) { return std::abs(r.energy - h0); });
}

double TrajectoryRecord::max_energy_post_drift() const {
  if (rows.empty()) return 0.0;
  const double h0 = rows.front().energy_post;
  return max_over(rows,
                  [h0](const TrajectoryRow& r) { return std::abs(r.energy_post - h0); });
}

double TrajectoryRecord::max_constraint_residual() const {
  return max_over(rows, [](const TrajectoryRow& r) { return r.constraint_residual; });
}

double TrajectoryRecord::max_jump_residual() const {
  return max_over(rows, [](const TrajectoryRow& r) { return r.jump_residual; });
}

std::vector<ChartPoint> TrajectoryRecord::positions() const {
  std::vector<ChartPoint> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.q);
  return out;
}

}  // namespace gni
