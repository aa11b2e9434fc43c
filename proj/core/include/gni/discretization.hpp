#pragma once

#include <functional>

#include "gni/system.hpp"
#include "gni/types.hpp"

namespace gni {

using PairScalar = std::function<double(const ChartPoint&, const ChartPoint&)>;
using PairCovector = std::function<CotangentVec(const ChartPoint&, const ChartPoint&)>;
using PairMatrix = std::function<Matrix(const ChartPoint&, const ChartPoint&)>;

/// Two-point discrete Lagrangian L_d(q0, q1).
///
/// d1, d2 and d12 are optional closed forms; the accessors fall back to
/// central differences of eval (d1, d2) or of D1 in its second slot (D12).
///
/// momentum_scale s records the normalization: s * L_d approximates the
/// action over one step. Forms that carry the overall factor h have s = 1;
/// forms written without it (velocity-squared sums over h^2) have s = h.
/// Trajectory records multiply momenta and multipliers by s so that every
/// method reports them in the units of M(q) v.
struct DiscreteLagrangian {
  PairScalar eval;
  PairCovector d1;
  PairCovector d2;
  PairMatrix d12;
  double step_h = 0.0;
  double momentum_scale = 1.0;

  CotangentVec D1(const ChartPoint& q0, const ChartPoint& q1) const;
  CotangentVec D2(const ChartPoint& q0, const ChartPoint& q1) const;
  /// Jacobian of D1(q0, .) at q1.
  Matrix D12(const ChartPoint& q0, const ChartPoint& q1) const;
};

/// Pre-, post- and average momenta at one configuration point.
struct MomentumRecord {
  CotangentVec pre;   // p^-_{k,k+1}
  CotangentVec post;  // p^+_{k-1,k}
  CotangentVec avg;   // (pre + post) / 2

  static MomentumRecord from(CotangentVec pre, CotangentVec post);
};

/// p^- = -D1 L_d(q0, q1), based at q0.
CotangentVec legendre_minus(const DiscreteLagrangian& Ld, const ChartPoint& q0,
                            const ChartPoint& q1);
/// p^+ = D2 L_d(q0, q1), based at q1.
CotangentVec legendre_plus(const DiscreteLagrangian& Ld, const ChartPoint& q0,
                           const ChartPoint& q1);

struct Potential {
  ScalarField value;         // empty means V = 0
  CovectorField gradient;    // empty means finite differences of value
};

/// L_d = (1/2h) dq^T M dq - (h/2)(V(q0) + V(q1)) for constant SPD M.
/// Throws std::invalid_argument if M is not SPD or h <= 0.
DiscreteLagrangian make_symmetric_mechanical(const Matrix& M, const Potential& V, double h);

/// L_d = 1/(2h^2) dq^T M dq, the kinetic form without the overall h
/// (momentum_scale = h).
DiscreteLagrangian make_scaled_quadratic(const Matrix& M, double h);

/// L_d = 1/2 v^T M(q_mid) v with v = (q1 - q0)/h and q_mid the midpoint.
/// The metric is only evaluated at the midpoint, so coordinates it does not
/// depend on are unaffected by the substitution. momentum_scale = h.
DiscreteLagrangian make_midpoint_metric(MatrixField metric, double h,
                                        MatrixFieldPartial metric_partial = {});

/// Symmetric mechanical discretization of a constant-metric system.
DiscreteLagrangian make_symmetric_mechanical(const MechanicalSystem& sys, double h);

}  // namespace gni
