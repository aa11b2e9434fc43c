#include "gni/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gni/errors.hpp"
#include "gni/finite_difference.hpp"

namespace gni {

NewtonResult newton_solve(const std::function<Vector(const Vector&)>& F,
                          const std::function<Matrix(const Vector&)>& jacobian,
                          Vector x0, const NewtonOptions& opts, const std::string& what) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  NewtonResult res;
  res.x = std::move(x0);
  Eigen::PartialPivLU<Matrix> lu;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const Vector r = F(res.x);
    res.residual = opts.residual_scale * r.lpNorm<Eigen::Infinity>();
    res.iterations = it;
    if (!std::isfinite(res.residual)) break;
    if (res.residual <= opts.tol) {
      // One chord step with the last factorization, kept only if it helps.
      if (it > 0 && res.residual > 0.0) {
        const Vector x = res.x - lu.solve(r);
        const double polished = opts.residual_scale * F(x).lpNorm<Eigen::Infinity>();
        if (polished < res.residual) {
          res.x = x;
          res.residual = polished;
        }
      }
      return res;
    }
    if (it == opts.max_iter) break;

    const Matrix J = jacobian ? jacobian(res.x) : fd::jacobian(F, res.x);
    lu.compute(J);
    // rcond() misses exactly zero pivots, so check the pivots as well.
    const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (!(lu.rcond() > 1e-14) || !(pivots.minCoeff() > 1e-14 * pivots.maxCoeff())) {
      throw RegularityError(what + ": singular Newton Jacobian at " + format_point(res.x));
    }
    const Vector dx = lu.solve(r);
    res.x -= dx;
    const double floor = 16.0 * eps * std::max(1.0, res.x.lpNorm<Eigen::Infinity>());
    if (dx.lpNorm<Eigen::Infinity>() <= floor) {
      res.residual = opts.residual_scale * F(res.x).lpNorm<Eigen::Infinity>();
      res.iterations = it + 1;
      return res;
    }
  }
  throw StepFailure(what + ": Newton did not converge (residual " +
                        std::to_string(res.residual) + ")",
                    res.residual);
}

}  // namespace gni
