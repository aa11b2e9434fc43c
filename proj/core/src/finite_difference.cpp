#include "gni/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gni::fd {

double step_for(double x) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * std::max(1.0, std::abs(x));
}

Vector gradient(const std::function<double(const Vector&)>& f, const Vector& x) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double e = step_for(x[j]);
    xp[j] = x[j] + e;
    const double fp = f(xp);
    xp[j] = x[j] - e;
    const double fm = f(xp);
    xp[j] = x[j];
    g[j] = (fp - fm) / (2.0 * e);
  }
  return g;
}

Matrix jacobian(const std::function<Vector(const Vector&)>& F, const Vector& x) {
  Vector xp = x;
  Matrix J;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double e = step_for(x[j]);
    xp[j] = x[j] + e;
    const Vector fp = F(xp);
    xp[j] = x[j] - e;
    const Vector fm = F(xp);
    xp[j] = x[j];
    if (j == 0) J.resize(fp.size(), x.size());
    J.col(j) = (fp - fm) / (2.0 * e);
  }
  return J;
}

Matrix partial(const std::function<Matrix(const Vector&)>& F, const Vector& x, int i) {
  Vector xp = x;
  const double e = step_for(x[i]);
  xp[i] = x[i] + e;
  Matrix fp = F(xp);
  xp[i] = x[i] - e;
  fp -= F(xp);
  return fp / (2.0 * e);
}

Matrix directional(const std::function<Matrix(const Vector&)>& F, const Vector& x,
                   const Vector& dir) {
  const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
  const double dnorm = dir.lpNorm<Eigen::Infinity>();
  if (dnorm == 0.0) return Matrix::Zero(F(x).rows(), F(x).cols());
  const double e = step_for(scale) / dnorm;
  return (F(x + e * dir) - F(x - e * dir)) / (2.0 * e);
}

}  // namespace gni::fd
