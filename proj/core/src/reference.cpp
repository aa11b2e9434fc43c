#include "gni/reference.hpp"

#include <stdexcept>

#include "gni/diagnostics.hpp"
#include "gni/errors.hpp"
#include "gni/finite_difference.hpp"
#include "gni/geometry.hpp"
#include "gni/newton.hpp"
#include "rows.hpp"

namespace gni {

TangentVec christoffel_contraction(const MechanicalSystem& sys, const ChartPoint& q,
                                   const TangentVec& v) {
  if (sys.constant_metric) return TangentVec::Zero(sys.n);
  Vector rhs = Vector::Zero(sys.n);
  for (int i = 0; i < sys.n; ++i) {
    const Matrix dMi = sys.metric_derivative(q, i);
    rhs += v[i] * (dMi * v);          // (dM[v]) v
    rhs[i] -= 0.5 * v.dot(dMi * v);   // -1/2 d/dq^i (v^T M v)
  }
  return sys.metric_at(q).llt().solve(rhs);
}

LdaSolution lda_solve(const MechanicalSystem& sys, const ContinuousState& state) {
  sys.check_point(state.q);
  const Matrix M = sys.metric_at(state.q);
  const Eigen::LLT<Matrix> llt(M);
  LdaSolution sol;
  sol.a = -llt.solve(sys.V_q(state.q)) - christoffel_contraction(sys, state.q, state.v);
  if (sys.m == 0) {
    sol.lambda = Vector::Zero(0);
    return sol;
  }
  const Matrix mu = sys.mu(state.q);
  const Matrix Z = llt.solve(mu.transpose());
  const Matrix C = mu * Z;
  const Matrix dmu = fd::directional([&sys](const Vector& x) { return sys.mu(x); }, state.q,
                                     state.v);
  Eigen::LLT<Matrix> cllt(0.5 * (C + C.transpose()));
  if (cllt.info() != Eigen::Success) {
    throw RankDeficiencyError(sys.name + ": Gram matrix is singular at q = " +
                                  format_point(state.q),
                              state.q);
  }
  sol.lambda = cllt.solve(-(mu * sol.a + dmu * state.v));
  sol.a += Z * sol.lambda;
  return sol;
}

TangentVec lda_rhs(const MechanicalSystem& sys, const ContinuousState& state) {
  return lda_solve(sys, state).a;
}

ContinuousState rk4_step(const MechanicalSystem& sys, const ContinuousState& s, double h) {
  auto acc = [&](const ChartPoint& q, const TangentVec& v) {
    return lda_rhs(sys, ContinuousState{q, v, 0.0});
  };
  const TangentVec k1q = s.v;
  const TangentVec k1v = acc(s.q, s.v);
  const TangentVec k2q = s.v + 0.5 * h * k1v;
  const TangentVec k2v = acc(s.q + 0.5 * h * k1q, k2q);
  const TangentVec k3q = s.v + 0.5 * h * k2v;
  const TangentVec k3v = acc(s.q + 0.5 * h * k2q, k3q);
  const TangentVec k4q = s.v + h * k3v;
  const TangentVec k4v = acc(s.q + h * k3q, k4q);
  ContinuousState out;
  out.q = s.q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  out.v = s.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  out.t = s.t + h;
  return out;
}

namespace {

TrajectoryRow continuous_row(const MechanicalSystem& sys, const ContinuousState& s, long k) {
  TrajectoryRow row;
  row.k = k;
  row.t = s.t;
  row.q = s.q;
  row.p_pre = sys.metric_at(s.q) * s.v;
  row.p_post = row.p_pre;
  row.p_avg = row.p_pre;
  row.lambda = lda_solve(sys, s).lambda;
  row.energy = energy(sys, s.q, row.p_pre);
  row.energy_post = row.energy;
  row.constraint_residual = sys.m > 0 ? (sys.mu(s.q) * s.v).lpNorm<Eigen::Infinity>() : 0.0;
  return row;
}

}  // namespace

TrajectoryRecord rk4_run(const MechanicalSystem& sys, const ContinuousState& init, double h_ref,
                         long n, long record_every, const RowSink& sink) {
  if (!(h_ref > 0.0)) throw std::invalid_argument("rk4_run: h_ref must be > 0");
  if (n < 0 || record_every < 1) throw std::invalid_argument("rk4_run: bad step counts");
  TrajectoryRecord rec;
  rec.method = "reference";
  rec.n = sys.n;
  rec.m = sys.m;
  rec.h = h_ref * static_cast<double>(record_every);

  auto emit = [&](const ContinuousState& s, long k) {
    TrajectoryRow row = continuous_row(sys, s, k);
    if (sink) sink(row);
    rec.rows.push_back(std::move(row));
  };
  ContinuousState s = init;
  emit(s, 0);
  for (long i = 1; i <= n; ++i) {
    s = rk4_step(sys, s, h_ref);
    // t accumulated from the index to avoid drift in the sample times
    s.t = init.t + static_cast<double>(i) * h_ref;
    if (i % record_every == 0) emit(s, i / record_every);
  }
  return rec;
}

ChartPoint reference_flow(const MechanicalSystem& sys, const ChartPoint& q0, const TangentVec& v0,
                          double h, int substeps) {
  ContinuousState s{q0, v0, 0.0};
  const double dt = h / substeps;
  for (int i = 0; i < substeps; ++i) s = rk4_step(sys, s, dt);
  return s.q;
}

TangentVec fit_initial_velocity(const MechanicalSystem& sys, const ChartPoint& q0,
                                const ChartPoint& q1, double h, int substeps) {
  sys.check_point(q0);
  sys.check_point(q1);
  const Eigen::Index n = sys.n;
  Matrix B;
  if (sys.m == 0) {
    B = Matrix::Identity(n, n);
  } else {
    Eigen::HouseholderQR<Matrix> qr(sys.mu(q0).transpose());
    const Matrix Qfull = qr.householderQ() * Matrix::Identity(n, n);
    B = Qfull.rightCols(n - sys.m);
  }
  Vector c = B.transpose() * ((q1 - q0) / h);
  auto G = [&](const Vector& coeffs) -> Vector {
    return reference_flow(sys, q0, B * coeffs, h, substeps) - q1;
  };
  for (int it = 0; it < 50; ++it) {
    const Matrix J = fd::jacobian(G, c);
    const Vector dc = J.colPivHouseholderQr().solve(G(c));
    c -= dc;
    if (dc.lpNorm<Eigen::Infinity>() <= 1e-13 * std::max(1.0, c.lpNorm<Eigen::Infinity>())) break;
  }
  return B * c;
}

DiscreteConstraint midpoint_constraint(const MechanicalSystem& sys, double h) {
  DiscreteConstraint dc;
  dc.description = "mu((q0+q1)/2) (q1-q0)/h";
  dc.eval = [sys, h](const ChartPoint& q0, const ChartPoint& q1) -> Vector {
    return sys.mu(0.5 * (q0 + q1)) * (q1 - q0) / h;
  };
  return dc;
}

DiscreteConstraint left_point_constraint(const MechanicalSystem& sys, double h) {
  DiscreteConstraint dc;
  dc.description = "mu(q0) (q1-q0)/h";
  dc.eval = [sys, h](const ChartPoint& q0, const ChartPoint& q1) -> Vector {
    return sys.mu(q0) * (q1 - q0) / h;
  };
  return dc;
}

DiscreteConstraint discrete_constraint_by_name(const std::string& name,
                                               const MechanicalSystem& sys, double h) {
  if (name == "midpoint") return midpoint_constraint(sys, h);
  if (name == "left") return left_point_constraint(sys, h);
  throw std::invalid_argument("unknown discrete constraint '" + name +
                              "' (expected midpoint or left)");
}

ChartPoint dla_step(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                    const DiscreteConstraint& dc, const ChartPoint& q_prev,
                    const ChartPoint& q_curr, const StepConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = sys.n;
  const Eigen::Index m = sys.m;
  const double s = Ld.momentum_scale;
  const CotangentVec incoming = Ld.D2(q_prev, q_curr);
  const Matrix mu = sys.mu(q_curr);

  auto F = [&](const Vector& z) -> Vector {
    const Vector x = z.head(n);
    Vector r(n + m);
    Vector bal = Ld.D1(q_curr, x) + incoming;
    if (m > 0) bal -= mu.transpose() * z.tail(m);
    r.head(n) = s * bal;  // momentum units, like the constraint rows (velocities)
    if (m > 0) r.tail(m) = dc.eval(q_curr, x);
    return r;
  };
  auto J = [&](const Vector& z) -> Matrix {
    const Vector x = z.head(n);
    Matrix jac = Matrix::Zero(n + m, n + m);
    jac.topLeftCorner(n, n) = s * Ld.D12(q_curr, x);
    if (m > 0) {
      jac.topRightCorner(n, m) = -s * mu.transpose();
      jac.bottomLeftCorner(m, n) =
          fd::jacobian([&](const Vector& y) { return dc.eval(q_curr, y); }, x);
    }
    return jac;
  };
  Vector z0 = Vector::Zero(n + m);
  z0.head(n) = 2.0 * q_curr - q_prev;

  NewtonOptions opts;
  opts.tol = cfg.newton_tol;
  opts.max_iter = cfg.newton_max_iter;
  return newton_solve(F, J, z0, opts, "dla_step").x.head(n);
}

TrajectoryRecord dla_run(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                         const DiscreteConstraint& dc, const GniState& init,
                         const StepConfig& cfg, long n_steps, const RowSink& sink) {
  cfg.validate();
  if (n_steps < 0) throw std::invalid_argument("dla_run: n_steps must be >= 0");
  const double s = Ld.momentum_scale;
  const double h = cfg.h;
  TrajectoryRecord rec;
  rec.method = "dla";
  rec.n = sys.n;
  rec.m = sys.m;
  rec.h = h;
  const CotangentVec no_force = CotangentVec::Zero(sys.n);

  auto emit = [&](TrajectoryRow row) {
    if (sink) sink(row);
    rec.rows.push_back(std::move(row));
  };
  {
    const ProjectorPair pp0 = projectors_at(sys, init.q_prev);
    CotangentVec pre = -s * Ld.D1(init.q_prev, init.q_curr);
    CotangentVec post = pre;
    emit(detail::discrete_row(sys, pp0, init.k - 1, init.t - h, std::move(pre), std::move(post),
                              no_force, h));
  }
  GniState st = init;
  for (long i = 0; i < n_steps; ++i) {
    ChartPoint q_next;
    try {
      q_next = dla_step(sys, Ld, dc, st.q_prev, st.q_curr, cfg);
    } catch (const StepFailure& e) {
      throw StepFailure(std::string(e.what()) + " at step " + std::to_string(st.k), e.residual(),
                        st.k);
    }
    const ProjectorPair pp = projectors_at(sys, st.q_curr);
    CotangentVec pre = -s * Ld.D1(st.q_curr, q_next);
    CotangentVec post = s * Ld.D2(st.q_prev, st.q_curr);
    emit(detail::discrete_row(sys, pp, st.k, st.t, std::move(pre), std::move(post), no_force, h));
    st.q_prev = std::move(st.q_curr);
    st.q_curr = std::move(q_next);
    st.k += 1;
    st.t += h;
  }
  return rec;
}

}  // namespace gni
