#pragma once

#include "gni/system.hpp"
#include "gni/types.hpp"

namespace gni {

/// Metric-orthogonal projectors at a configuration point.
///
/// Q projects TQ onto D-perp along D, P = Id - Q projects onto D, and
/// R = P - Q is the reflection through D. Dual maps act on covectors by the
/// coordinate transpose.
struct ProjectorPair {
  ChartPoint base;
  Matrix Q_mat;
  Matrix P_mat;
  Matrix R_mat;
  Matrix C_inv;  // m x m inverse Gram matrix C_ab
  Matrix Z;      // n x m, columns are the gradient fields Z^a = M^-1 mu^a
  Matrix mu;     // m x n constraint rows at base
};

/// Condition number above which the Gram matrix is treated as singular.
inline constexpr double kGramConditionLimit = 1e12;

/// C = mu M^-1 mu^T. Throws RankDeficiencyError when the Cholesky
/// factorization fails or cond(C) exceeds kGramConditionLimit.
Matrix gram_matrix(const MechanicalSystem& sys, const ChartPoint& q);

ProjectorPair projectors_at(const MechanicalSystem& sys, const ChartPoint& q);

/// R^T p, the dual reflection (P - Q)^* applied to a covector at pp.base.
CotangentVec dual_reflection(const ProjectorPair& pp, const CotangentVec& p);

/// p^T M^-1 p through a Cholesky solve.
double cometric_norm_sq(const Matrix& M, const CotangentVec& p);

}  // namespace gni
