#pragma once

#include "gni/discretization.hpp"
#include "gni/system.hpp"
#include "gni/trajectory.hpp"

namespace gni {

/// (q_k, p~_k, lambda~_k) with mu(q_k) M^-1 p~_k = 0.
struct RattleState {
  ChartPoint q;
  CotangentVec p_tilde;
  Vector lambda_tilde;
  long k = 0;
  double t = 0.0;
};

/// One step of the nonholonomic RATTLE scheme for a constant mass matrix:
///
///   p_half  = p~_k - h/2 (V_q(q_k) + mu(q_k)^T lambda~_k)
///   q_k+1   = q_k + h M^-1 p_half
///   C(q_k+1) lambda~_k+1 = (2/h) mu(q_k+1) M^-1 (p_half - h/2 V_q(q_k+1))
///   p~_k+1  = p_half - h/2 (V_q(q_k+1) + mu(q_k+1)^T lambda~_k+1)
///
/// Throws std::invalid_argument for position-dependent metrics.
RattleState rattle_step(const MechanicalSystem& sys, const RattleState& state, double h);

/// p~_0 = M (q1 - q0)/h + h/2 V_q(q0), lambda~_0 = 0, i.e. the pre-momentum
/// of (q0, q1) in momentum units. Throws InadmissibleError if (q0, q1) is
/// not in M_0.
RattleState rattle_init(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                        const ChartPoint& q0, const ChartPoint& q1);

/// n_steps steps, n_steps + 1 rows. p_pre / p_post are p~ -/+ h/2 mu^T lambda~
/// (the pre- and post-momenta of the symmetric discretization) and lambda is
/// reported as h * lambda~.
TrajectoryRecord rattle_run(const MechanicalSystem& sys, const RattleState& init, double h,
                            long n_steps, const RowSink& sink = {});

}  // namespace gni
