#pragma once

#include <functional>
#include <string>

#include "gni/discretization.hpp"
#include "gni/gni_stepper.hpp"
#include "gni/system.hpp"
#include "gni/trajectory.hpp"

namespace gni {

struct ContinuousState {
  ChartPoint q;
  TangentVec v;
  double t = 0.0;
};

struct LdaSolution {
  TangentVec a;    // constrained acceleration
  Vector lambda;   // multipliers, reaction force mu^T lambda
};

/// Gamma^k_ij v^i v^j from the metric derivatives:
/// M^-1 (dM[v] v - 1/2 grad_q (v^T M v)).
TangentVec christoffel_contraction(const MechanicalSystem& sys, const ChartPoint& q,
                                   const TangentVec& v);

/// Lagrange-d'Alembert equations with lambda eliminated:
///   M a = -V_q - M Gamma(v, v) + mu^T lambda,   mu a + (Dmu[v]) v = 0.
LdaSolution lda_solve(const MechanicalSystem& sys, const ContinuousState& state);
TangentVec lda_rhs(const MechanicalSystem& sys, const ContinuousState& state);

ContinuousState rk4_step(const MechanicalSystem& sys, const ContinuousState& state, double h);

/// n classical RK4 steps of size h_ref; a row every record_every steps
/// (row 0 is the initial state). Rows carry p = M v in all momentum columns
/// and constraint_residual = ||mu v||_inf.
TrajectoryRecord rk4_run(const MechanicalSystem& sys, const ContinuousState& init, double h_ref,
                         long n, long record_every = 1, const RowSink& sink = {});

/// Time-h flow map of the reference solver using `substeps` RK4 steps.
ChartPoint reference_flow(const MechanicalSystem& sys, const ChartPoint& q0, const TangentVec& v0,
                          double h, int substeps);

/// Admissible v0 in D(q0) whose reference flow over time h best matches q1
/// (Gauss-Newton least squares over a basis of D(q0)).
TangentVec fit_initial_velocity(const MechanicalSystem& sys, const ChartPoint& q0,
                                const ChartPoint& q1, double h, int substeps);

/// Discrete constraint c(q0, q1) in R^m replacing the velocity constraint
/// in the DLA scheme. Must vanish on the diagonal.
struct DiscreteConstraint {
  std::function<Vector(const ChartPoint&, const ChartPoint&)> eval;
  std::string description;
};

/// mu((q0 + q1)/2) (q1 - q0)/h.
DiscreteConstraint midpoint_constraint(const MechanicalSystem& sys, double h);
/// mu(q0) (q1 - q0)/h.
DiscreteConstraint left_point_constraint(const MechanicalSystem& sys, double h);
/// Looks up "midpoint" or "left"; throws std::invalid_argument otherwise.
DiscreteConstraint discrete_constraint_by_name(const std::string& name,
                                               const MechanicalSystem& sys, double h);

/// Discrete Lagrange-d'Alembert step: solves
///   D1 L_d(q_k, q_k+1) + D2 L_d(q_k-1, q_k) = mu(q_k)^T lambda,  c(q_k, q_k+1) = 0
/// for (q_k+1, lambda) by Newton's method.
ChartPoint dla_step(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                    const DiscreteConstraint& dc, const ChartPoint& q_prev,
                    const ChartPoint& q_curr, const StepConfig& cfg);

TrajectoryRecord dla_run(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                         const DiscreteConstraint& dc, const GniState& init,
                         const StepConfig& cfg, long n_steps, const RowSink& sink = {});

}  // namespace gni
