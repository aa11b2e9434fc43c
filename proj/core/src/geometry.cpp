#include "gni/geometry.hpp"

#include <stdexcept>

#include "gni/errors.hpp"

namespace gni {
namespace {

Eigen::LLT<Matrix> factor_metric(const MechanicalSystem& sys, const ChartPoint& q) {
  Eigen::LLT<Matrix> llt(sys.projector_metric_at(q));
  if (llt.info() != Eigen::Success) {
    throw RankDeficiencyError(
        sys.name + ": metric is not positive definite at q = " + format_point(q), q);
  }
  return llt;
}

struct GramData {
  Matrix mu;
  Matrix Z;
  Matrix C;
  Matrix L;  // Cholesky factor of the projector metric
  Matrix B;  // L^-1 mu^T
};

GramData gram_data(const MechanicalSystem& sys, const ChartPoint& q) {
  sys.check_point(q);
  GramData g;
  g.mu = sys.mu(q);
  if (g.mu.rows() != sys.m || g.mu.cols() != sys.n) {
    throw std::invalid_argument(sys.name + ": constraint matrix has wrong shape");
  }
  if (sys.m == 0) {
    g.Z = Matrix::Zero(sys.n, 0);
    g.C = Matrix::Zero(0, 0);
    return g;
  }
  const auto llt_M = factor_metric(sys, q);
  g.L = llt_M.matrixL();
  g.B = llt_M.matrixL().solve(g.mu.transpose());
  g.Z = llt_M.matrixU().solve(g.B);
  Matrix C = g.mu * g.Z;
  g.C = 0.5 * (C + C.transpose());

  Eigen::LLT<Matrix> llt(g.C);
  if (llt.info() != Eigen::Success) {
    throw RankDeficiencyError(
        sys.name + ": Gram matrix is singular at q = " + format_point(q), q);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g.C, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kGramConditionLimit) {
    throw RankDeficiencyError(sys.name + ": Gram matrix condition number " +
                                  std::to_string(hi / lo) + " at q = " + format_point(q),
                              q);
  }
  return g;
}

// Classical Gram-Schmidt with one reorthogonalization pass.
Matrix orthonormal_basis(const Matrix& B) {
  Matrix U = B;
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      if (j > 0) U.col(j) -= U.leftCols(j) * (U.leftCols(j).transpose() * U.col(j));
    }
    U.col(j) /= U.col(j).norm();
  }
  return U;
}

}  // namespace

Matrix gram_matrix(const MechanicalSystem& sys, const ChartPoint& q) {
  return gram_data(sys, q).C;
}

ProjectorPair projectors_at(const MechanicalSystem& sys, const ChartPoint& q) {
  GramData g = gram_data(sys, q);
  const Eigen::Index n = sys.n;
  ProjectorPair pp;
  pp.base = q;
  if (sys.m == 0) {
    pp.C_inv = Matrix::Zero(0, 0);
    pp.Q_mat = Matrix::Zero(n, n);
  } else {
    pp.C_inv = g.C.llt().solve(Matrix::Identity(sys.m, sys.m));
    // Q = L^-T U U^T L^T with U an orthonormal basis of range(B), which
    // avoids the squared conditioning of C near rank drops.
    const Matrix U = orthonormal_basis(g.B);
    pp.Q_mat = g.L.transpose().triangularView<Eigen::Upper>().solve(U * (U.transpose() * g.L.transpose()));
  }
  pp.P_mat = Matrix::Identity(n, n) - pp.Q_mat;
  pp.R_mat = pp.P_mat - pp.Q_mat;
  pp.Z = std::move(g.Z);
  pp.mu = std::move(g.mu);
  return pp;
}

CotangentVec dual_reflection(const ProjectorPair& pp, const CotangentVec& p) {
  if (p.size() != pp.R_mat.rows()) {
    throw std::invalid_argument("dual_reflection: covector dimension mismatch");
  }
  return pp.R_mat.transpose() * p;
}

double cometric_norm_sq(const Matrix& M, const CotangentVec& p) {
  return p.dot(M.llt().solve(p));
}

}  // namespace gni
