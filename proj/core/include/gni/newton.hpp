#pragma once

#include <functional>
#include <string>

#include "gni/types.hpp"

namespace gni {

struct NewtonOptions {
  double tol = 1e-12;      // on residual_scale * ||F||_inf
  int max_iter = 50;
  double residual_scale = 1.0;
};

struct NewtonResult {
  Vector x;
  double residual = 0.0;   // scaled, as compared against tol
  int iterations = 0;
};

/// Newton's method for F(x) = 0. An empty jacobian means central finite
/// differences of F.
///
/// Converges when the scaled residual drops to tol, or when the update is
/// at rounding level (||dx||_inf <= 16 eps max(1, ||x||_inf)); the latter
/// covers residuals whose floor is set by cancellation in F itself.
/// Throws StepFailure after max_iter iterations and RegularityError when the
/// Jacobian's reciprocal condition estimate falls below 1e-14.
NewtonResult newton_solve(const std::function<Vector(const Vector&)>& F,
                          const std::function<Matrix(const Vector&)>& jacobian,
                          Vector x0, const NewtonOptions& opts, const std::string& what);

}  // namespace gni
