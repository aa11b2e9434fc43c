#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gni/types.hpp"

namespace gni {

/// One sample of a discrete or continuous trajectory.
///
/// Momenta and multipliers are reported in the units of M(q) v: the raw
/// discrete Legendre transforms are multiplied by the discrete Lagrangian's
/// momentum_scale. energy is H(q_k, p_pre); energy_post is H(q_k, p_post).
struct TrajectoryRow {
  long k = 0;
  double t = 0.0;
  ChartPoint q;
  CotangentVec p_pre;
  CotangentVec p_post;
  CotangentVec p_avg;
  Vector lambda;
  double energy = 0.0;
  double energy_post = 0.0;
  double constraint_residual = 0.0;  // ||mu M^-1 p_avg||_inf
  double jump_residual = 0.0;        // ||p_pre - R^T p_post - h f||_inf (discrete methods)
};

struct TrajectoryRecord {
  std::string method;
  int n = 0;
  int m = 0;
  double h = 0.0;
  std::vector<TrajectoryRow> rows;

  double max_energy_drift() const;
  double max_energy_post_drift() const;
  double max_constraint_residual() const;
  double max_jump_residual() const;
  std::vector<ChartPoint> positions() const;
};

/// Invoked as each row is finalized, before the run returns. Lets callers
/// stream output and keep partial results when a later step fails.
using RowSink = std::function<void(const TrajectoryRow&)>;

}  // namespace gni
