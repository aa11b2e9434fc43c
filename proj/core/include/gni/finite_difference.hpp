#pragma once

#include <functional>

#include "gni/types.hpp"

namespace gni::fd {

/// Central-difference step (machine epsilon)^(1/3) * max(1, |x|).
double step_for(double x);

Vector gradient(const std::function<double(const Vector&)>& f, const Vector& x);

/// Jacobian of F: R^n -> R^k, returned as a k x n matrix.
Matrix jacobian(const std::function<Vector(const Vector&)>& F, const Vector& x);

/// Derivative of a matrix-valued field along coordinate i.
Matrix partial(const std::function<Matrix(const Vector&)>& F, const Vector& x, int i);

/// Directional derivative d/ds F(x + s*dir) at s = 0, matrix valued.
Matrix directional(const std::function<Matrix(const Vector&)>& F, const Vector& x,
                   const Vector& dir);

}  // namespace gni::fd
