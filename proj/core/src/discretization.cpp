#include "gni/discretization.hpp"

#include <stdexcept>

#include "gni/finite_difference.hpp"

namespace gni {
namespace {

void require_positive_step(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("discrete Lagrangian: step h must be > 0");
}

void require_spd(const Matrix& M) {
  if (M.rows() != M.cols() || (M - M.transpose()).lpNorm<Eigen::Infinity>() >
                                  1e-12 * std::max(1.0, M.lpNorm<Eigen::Infinity>())) {
    throw std::invalid_argument("discrete Lagrangian: mass matrix must be symmetric");
  }
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("discrete Lagrangian: mass matrix must be positive definite");
  }
}

}  // namespace

CotangentVec DiscreteLagrangian::D1(const ChartPoint& q0, const ChartPoint& q1) const {
  if (d1) return d1(q0, q1);
  return fd::gradient([&](const Vector& x) { return eval(x, q1); }, q0);
}

CotangentVec DiscreteLagrangian::D2(const ChartPoint& q0, const ChartPoint& q1) const {
  if (d2) return d2(q0, q1);
  return fd::gradient([&](const Vector& x) { return eval(q0, x); }, q1);
}

Matrix DiscreteLagrangian::D12(const ChartPoint& q0, const ChartPoint& q1) const {
  if (d12) return d12(q0, q1);
  return fd::jacobian([&](const Vector& x) { return D1(q0, x); }, q1);
}

MomentumRecord MomentumRecord::from(CotangentVec pre, CotangentVec post) {
  MomentumRecord r;
  r.avg = 0.5 * (pre + post);
  r.pre = std::move(pre);
  r.post = std::move(post);
  return r;
}

CotangentVec legendre_minus(const DiscreteLagrangian& Ld, const ChartPoint& q0,
                            const ChartPoint& q1) {
  return -Ld.D1(q0, q1);
}

CotangentVec legendre_plus(const DiscreteLagrangian& Ld, const ChartPoint& q0,
                           const ChartPoint& q1) {
  return Ld.D2(q0, q1);
}

DiscreteLagrangian make_symmetric_mechanical(const Matrix& M, const Potential& V, double h) {
  require_positive_step(h);
  require_spd(M);

  auto value = V.value;
  CovectorField grad = V.gradient;
  if (!grad && value) {
    grad = [value](const ChartPoint& q) { return fd::gradient(value, q); };
  }
  const Eigen::Index n = M.rows();
  auto Vq = [grad, n](const ChartPoint& q) -> CotangentVec {
    return grad ? grad(q) : CotangentVec::Zero(n);
  };

  DiscreteLagrangian Ld;
  Ld.step_h = h;
  Ld.momentum_scale = 1.0;
  Ld.eval = [M, h, value](const ChartPoint& q0, const ChartPoint& q1) {
    const Vector dq = q1 - q0;
    double pot = 0.0;
    if (value) pot = value(q0) + value(q1);
    return dq.dot(M * dq) / (2.0 * h) - 0.5 * h * pot;
  };
  Ld.d1 = [M, h, Vq](const ChartPoint& q0, const ChartPoint& q1) -> CotangentVec {
    return -M * (q1 - q0) / h - 0.5 * h * Vq(q0);
  };
  Ld.d2 = [M, h, Vq](const ChartPoint& q0, const ChartPoint& q1) -> CotangentVec {
    return M * (q1 - q0) / h - 0.5 * h * Vq(q1);
  };
  Ld.d12 = [M, h](const ChartPoint&, const ChartPoint&) -> Matrix { return -M / h; };
  return Ld;
}

DiscreteLagrangian make_symmetric_mechanical(const MechanicalSystem& sys, double h) {
  if (!sys.constant_metric) {
    throw std::invalid_argument(sys.name +
                                ": symmetric mechanical discretization needs a constant metric");
  }
  Potential V;
  V.value = sys.potential;
  V.gradient = sys.potential_grad;
  return make_symmetric_mechanical(sys.metric(ChartPoint::Zero(sys.n)), V, h);
}

DiscreteLagrangian make_scaled_quadratic(const Matrix& M, double h) {
  require_positive_step(h);
  require_spd(M);
  const double inv_h2 = 1.0 / (h * h);

  DiscreteLagrangian Ld;
  Ld.step_h = h;
  Ld.momentum_scale = h;
  Ld.eval = [M, inv_h2](const ChartPoint& q0, const ChartPoint& q1) {
    const Vector dq = q1 - q0;
    return 0.5 * inv_h2 * dq.dot(M * dq);
  };
  Ld.d1 = [M, inv_h2](const ChartPoint& q0, const ChartPoint& q1) -> CotangentVec {
    return -inv_h2 * (M * (q1 - q0));
  };
  Ld.d2 = [M, inv_h2](const ChartPoint& q0, const ChartPoint& q1) -> CotangentVec {
    return inv_h2 * (M * (q1 - q0));
  };
  Ld.d12 = [M, inv_h2](const ChartPoint&, const ChartPoint&) -> Matrix { return -inv_h2 * M; };
  return Ld;
}

DiscreteLagrangian make_midpoint_metric(MatrixField metric, double h,
                                        MatrixFieldPartial metric_partial) {
  require_positive_step(h);
  MatrixFieldPartial dM = metric_partial;
  if (!dM) {
    dM = [metric](const ChartPoint& q, int i) { return fd::partial(metric, q, i); };
  }
  // d/dq0 and d/dq1 share the term 1/4 (v^T dM_i v) from the midpoint.
  auto midpoint_term = [dM](const ChartPoint& qm, const Vector& v) {
    CotangentVec g(qm.size());
    for (Eigen::Index i = 0; i < qm.size(); ++i) {
      g[i] = 0.25 * v.dot(dM(qm, static_cast<int>(i)) * v);
    }
    return g;
  };

  DiscreteLagrangian Ld;
  Ld.step_h = h;
  Ld.momentum_scale = h;
  Ld.eval = [metric, h](const ChartPoint& q0, const ChartPoint& q1) {
    const Vector v = (q1 - q0) / h;
    return 0.5 * v.dot(metric(0.5 * (q0 + q1)) * v);
  };
  Ld.d1 = [metric, h, midpoint_term](const ChartPoint& q0,
                                     const ChartPoint& q1) -> CotangentVec {
    const Vector v = (q1 - q0) / h;
    const ChartPoint qm = 0.5 * (q0 + q1);
    return -(metric(qm) * v) / h + midpoint_term(qm, v);
  };
  Ld.d2 = [metric, h, midpoint_term](const ChartPoint& q0,
                                     const ChartPoint& q1) -> CotangentVec {
    const Vector v = (q1 - q0) / h;
    const ChartPoint qm = 0.5 * (q0 + q1);
    return (metric(qm) * v) / h + midpoint_term(qm, v);
  };
  return Ld;
}

}  // namespace gni
