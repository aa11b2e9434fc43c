#pragma once

#include <functional>

#include "gni/discretization.hpp"
#include "gni/system.hpp"
#include "gni/trajectory.hpp"

namespace gni {

struct StepConfig {
  double h = 0.0;
  double newton_tol = 1e-12;  // on the momentum-units residual, inf-norm
  int newton_max_iter = 50;

  /// Throws std::invalid_argument unless h > 0, newton_tol > 0, max_iter >= 1.
  void validate() const;
};

/// Two consecutive configurations (q_{k-1}, q_k); t is the time of q_k.
struct GniState {
  ChartPoint q_prev;
  ChartPoint q_curr;
  long k = 1;
  double t = 0.0;
};

/// Generalized force f(q_k, t_k) in the units of M(q) qdot / time. It enters
/// the discrete equations as (h / momentum_scale) * f.
using DiscreteForce = std::function<CotangentVec(const ChartPoint&, double)>;

/// Solves D1 L_d(q_k, q_k+1) + (P - Q)^*_{q_k} D2 L_d(q_k-1, q_k) + f_d = 0
/// for q_k+1 by Newton's method, starting from 2 q_k - q_k-1.
GniState gni_step(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                  const GniState& state, const StepConfig& cfg, const DiscreteForce& force = {});

/// n_steps steps from init; returns n_steps + 1 rows, starting at init.q_prev.
/// Row 0 has no incoming pair, so its post-momentum is taken as the
/// reflection of its pre-momentum (the jump relation solved backwards).
/// Step failures are rethrown with the step index attached.
TrajectoryRecord gni_run(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                         const GniState& init, const StepConfig& cfg, long n_steps,
                         const DiscreteForce& force = {}, const RowSink& sink = {});

/// Builds (q0, q1) whose pre-momentum equals the continuous momentum
/// M(q0) v0. Throws InadmissibleError if ||mu v0||_inf > 1e-10 ||v0||.
GniState initialize_from_velocity(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                                  const ChartPoint& q0, const TangentVec& v0,
                                  const StepConfig& cfg);

struct ManifoldCheck {
  bool member = false;
  double residual = 0.0;  // ||mu(q0) M(q0)^-1 p^-_{0,1}||_inf, raw L_d units
};

ManifoldCheck in_initial_manifold(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                                  const ChartPoint& q0, const ChartPoint& q1);

}  // namespace gni
