#include "gni/gni_stepper.hpp"

#include <cmath>
#include <stdexcept>

#include "gni/errors.hpp"
#include "gni/geometry.hpp"
#include "gni/newton.hpp"
#include "rows.hpp"

namespace gni {
namespace {

CotangentVec force_at(const DiscreteForce& force, const MechanicalSystem& sys,
                      const ChartPoint& q, double t) {
  return force ? force(q, t) : CotangentVec::Zero(sys.n);
}

// One step given precomputed projectors at q_curr.
ChartPoint solve_next(const DiscreteLagrangian& Ld,
                      const ProjectorPair& pp, const GniState& state, const StepConfig& cfg,
                      const CotangentVec& f) {
  const double s = Ld.momentum_scale;
  const ChartPoint& qk = state.q_curr;
  CotangentVec target = dual_reflection(pp, Ld.D2(state.q_prev, qk));
  if (f.size()) target += (cfg.h / s) * f;

  NewtonOptions opts;
  opts.tol = cfg.newton_tol;
  opts.max_iter = cfg.newton_max_iter;
  opts.residual_scale = s;

  auto residual = [&](const Vector& x) -> Vector { return Ld.D1(qk, x) + target; };
  auto jac = [&](const Vector& x) -> Matrix { return Ld.D12(qk, x); };
  return newton_solve(residual, jac, 2.0 * qk - state.q_prev, opts, "gni_step").x;
}

}  // namespace

void StepConfig::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("step size h must be > 0");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be > 0");
  if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be >= 1");
}

GniState gni_step(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                  const GniState& state, const StepConfig& cfg, const DiscreteForce& force) {
  cfg.validate();
  sys.check_point(state.q_prev);
  sys.check_point(state.q_curr);
  const ProjectorPair pp = projectors_at(sys, state.q_curr);
  const CotangentVec f = force ? force(state.q_curr, state.t) : CotangentVec();
  GniState next;
  next.q_prev = state.q_curr;
  next.q_curr = solve_next(Ld, pp, state, cfg, f);
  next.k = state.k + 1;
  next.t = state.t + cfg.h;
  return next;
}

TrajectoryRecord gni_run(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                         const GniState& init, const StepConfig& cfg, long n_steps,
                         const DiscreteForce& force, const RowSink& sink) {
  cfg.validate();
  if (n_steps < 0) throw std::invalid_argument("gni_run: n_steps must be >= 0");
  sys.check_point(init.q_prev);
  sys.check_point(init.q_curr);

  const double s = Ld.momentum_scale;
  const double h = cfg.h;
  TrajectoryRecord rec;
  rec.method = "gni";
  rec.n = sys.n;
  rec.m = sys.m;
  rec.h = h;
  rec.rows.reserve(static_cast<std::size_t>(n_steps) + 1);

  auto emit = [&](TrajectoryRow row) {
    if (sink) sink(row);
    rec.rows.push_back(std::move(row));
  };

  // First row: q_prev, whose incoming momentum is reconstructed from the jump.
  {
    const double t0 = init.t - h;
    const ProjectorPair pp0 = projectors_at(sys, init.q_prev);
    const CotangentVec f0 = force_at(force, sys, init.q_prev, t0);
    CotangentVec pre = -s * Ld.D1(init.q_prev, init.q_curr);
    CotangentVec post = dual_reflection(pp0, pre - h * f0);
    emit(detail::discrete_row(sys, pp0, init.k - 1, t0, std::move(pre), std::move(post), f0, h));
  }

  GniState state = init;
  for (long i = 0; i < n_steps; ++i) {
    try {
      const ProjectorPair pp = projectors_at(sys, state.q_curr);
      const CotangentVec f = force_at(force, sys, state.q_curr, state.t);
      ChartPoint q_next = solve_next(Ld, pp, state, cfg, force ? f : CotangentVec());

      CotangentVec pre = -s * Ld.D1(state.q_curr, q_next);
      CotangentVec post = s * Ld.D2(state.q_prev, state.q_curr);
      emit(detail::discrete_row(sys, pp, state.k, state.t, std::move(pre), std::move(post), f, h));

      state.q_prev = std::move(state.q_curr);
      state.q_curr = std::move(q_next);
      state.k += 1;
      state.t += h;
    } catch (const StepFailure& e) {
      throw StepFailure(std::string(e.what()) + " at step " + std::to_string(state.k),
                        e.residual(), state.k);
    } catch (const RegularityError& e) {
      throw RegularityError(std::string(e.what()) + " at step " + std::to_string(state.k));
    }
  }
  return rec;
}

GniState initialize_from_velocity(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                                  const ChartPoint& q0, const TangentVec& v0,
                                  const StepConfig& cfg) {
  cfg.validate();
  sys.check_point(q0);
  if (v0.size() != sys.n) throw std::invalid_argument("initialize_from_velocity: v0 dimension");
  if (sys.m > 0) {
    const double viol = (sys.mu(q0) * v0).lpNorm<Eigen::Infinity>();
    if (viol > 1e-10 * v0.norm()) {
      throw InadmissibleError("initial velocity violates the constraints (||mu v0|| = " +
                              std::to_string(viol) + ")");
    }
  }
  const double s = Ld.momentum_scale;
  const CotangentVec p0 = sys.metric_at(q0) * v0 / s;

  NewtonOptions opts;
  opts.tol = cfg.newton_tol;
  opts.max_iter = cfg.newton_max_iter;
  opts.residual_scale = s;
  auto residual = [&](const Vector& x) -> Vector { return -Ld.D1(q0, x) - p0; };
  auto jac = [&](const Vector& x) -> Matrix { return -Ld.D12(q0, x); };

  GniState st;
  st.q_prev = q0;
  st.q_curr =
      newton_solve(residual, jac, q0 + cfg.h * v0, opts, "initialize_from_velocity").x;
  st.k = 1;
  st.t = cfg.h;
  return st;
}

ManifoldCheck in_initial_manifold(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                                  const ChartPoint& q0, const ChartPoint& q1) {
  ManifoldCheck out;
  if (sys.m == 0) {
    out.member = true;
    return out;
  }
  const CotangentVec p = legendre_minus(Ld, q0, q1);
  out.residual =
      (sys.mu(q0) * sys.metric_at(q0).llt().solve(p)).lpNorm<Eigen::Infinity>();
  out.member = out.residual <= 1e-10 * (1.0 + p.lpNorm<Eigen::Infinity>());
  return out;
}

}  // namespace gni
