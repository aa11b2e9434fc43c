#include "gni/rattle.hpp"

#include <stdexcept>

#include "gni/errors.hpp"
#include "gni/geometry.hpp"
#include "gni/gni_stepper.hpp"
#include "rows.hpp"

namespace gni {
namespace {

void require_constant_metric(const MechanicalSystem& sys) {
  if (!sys.constant_metric) {
    throw std::invalid_argument(sys.name + ": RATTLE scheme requires a constant mass matrix");
  }
}

CotangentVec constraint_force(const Matrix& mu, const Vector& lambda, Eigen::Index n) {
  if (mu.rows() == 0) return CotangentVec::Zero(n);
  return mu.transpose() * lambda;
}

}  // namespace

RattleState rattle_step(const MechanicalSystem& sys, const RattleState& state, double h) {
  require_constant_metric(sys);
  if (!(h > 0.0)) throw std::invalid_argument("rattle_step: h must be > 0");
  sys.check_point(state.q);

  const Matrix M = sys.metric_at(state.q);
  const Eigen::LLT<Matrix> Mllt(M);
  const Eigen::Index n = sys.n;

  const Matrix mu0 = sys.mu(state.q);
  const CotangentVec p_half =
      state.p_tilde -
      0.5 * h * (sys.V_q(state.q) + constraint_force(mu0, state.lambda_tilde, n));

  RattleState next;
  next.q = state.q + h * Mllt.solve(p_half);
  next.k = state.k + 1;
  next.t = state.t + h;

  const CotangentVec Vq1 = sys.V_q(next.q);
  const CotangentVec free_part = p_half - 0.5 * h * Vq1;
  if (sys.m > 0) {
    const Matrix C = gram_matrix(sys, next.q);
    const Matrix mu1 = sys.mu(next.q);
    next.lambda_tilde = C.llt().solve((2.0 / h) * (mu1 * Mllt.solve(free_part)));
    next.p_tilde = free_part - 0.5 * h * (mu1.transpose() * next.lambda_tilde);
  } else {
    next.lambda_tilde = Vector::Zero(0);
    next.p_tilde = free_part;
  }
  return next;
}

RattleState rattle_init(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                        const ChartPoint& q0, const ChartPoint& q1) {
  require_constant_metric(sys);
  sys.check_point(q0);
  sys.check_point(q1);
  const ManifoldCheck chk = in_initial_manifold(sys, Ld, q0, q1);
  if (!chk.member) {
    throw InadmissibleError("rattle_init: (q0, q1) is not in M_0 (residual " +
                            std::to_string(chk.residual) + ")");
  }
  RattleState st;
  st.q = q0;
  st.p_tilde = Ld.momentum_scale * legendre_minus(Ld, q0, q1);
  st.lambda_tilde = Vector::Zero(sys.m);
  st.k = 0;
  st.t = 0.0;
  return st;
}

TrajectoryRecord rattle_run(const MechanicalSystem& sys, const RattleState& init, double h,
                            long n_steps, const RowSink& sink) {
  require_constant_metric(sys);
  if (n_steps < 0) throw std::invalid_argument("rattle_run: n_steps must be >= 0");
  TrajectoryRecord rec;
  rec.method = "rattle";
  rec.n = sys.n;
  rec.m = sys.m;
  rec.h = h;
  rec.rows.reserve(static_cast<std::size_t>(n_steps) + 1);

  const CotangentVec no_force = CotangentVec::Zero(sys.n);
  auto emit = [&](const RattleState& st) {
    const ProjectorPair pp = projectors_at(sys, st.q);
    const CotangentVec half_kick = 0.5 * h * constraint_force(pp.mu, st.lambda_tilde, sys.n);
    TrajectoryRow row = detail::discrete_row(sys, pp, st.k, st.t, st.p_tilde - half_kick,
                                             st.p_tilde + half_kick, no_force, h);
    if (sink) sink(row);
    rec.rows.push_back(std::move(row));
  };

  RattleState st = init;
  emit(st);
  for (long i = 0; i < n_steps; ++i) {
    st = rattle_step(sys, st, h);
    emit(st);
  }
  return rec;
}

}  // namespace gni
