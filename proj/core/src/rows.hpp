#pragma once

#include "gni/diagnostics.hpp"
#include "gni/geometry.hpp"
#include "gni/trajectory.hpp"

namespace gni::detail {

// Fills the derived columns of a discrete-method row from its momenta.
// f is the generalized force at q_k (zero vector if none), h the step.
inline TrajectoryRow discrete_row(const MechanicalSystem& sys, const ProjectorPair& pp, long k,
                                  double t, CotangentVec pre, CotangentVec post,
                                  const CotangentVec& f, double h) {
  TrajectoryRow row;
  row.k = k;
  row.t = t;
  row.q = pp.base;
  const Vector hf = h * f;
  if (sys.m > 0) {
    row.lambda = pp.C_inv * (pp.Z.transpose() * (post - pre + hf));
  } else {
    row.lambda = Vector::Zero(0);
  }
  row.p_avg = 0.5 * (pre + post);
  const Matrix M = sys.metric_at(row.q);
  row.energy = energy(sys, row.q, pre);
  row.energy_post = energy(sys, row.q, post);
  row.constraint_residual =
      sys.m > 0 ? (sys.mu(row.q) * M.llt().solve(row.p_avg)).lpNorm<Eigen::Infinity>() : 0.0;
  row.jump_residual = (pre - pp.R_mat.transpose() * post - hf).lpNorm<Eigen::Infinity>();
  row.p_pre = std::move(pre);
  row.p_post = std::move(post);
  return row;
}

}  // namespace gni::detail
