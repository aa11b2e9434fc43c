#pragma once

#include <stdexcept>
#include <string>

#include "gni/types.hpp"

namespace gni {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Gram matrix (or the metric) failed its Cholesky factorization or is
/// too ill conditioned to invert reliably.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, ChartPoint point)
      : Error(what), point_(std::move(point)) {}
  const ChartPoint& point() const noexcept { return point_; }

 private:
  ChartPoint point_;
};

/// Singular Newton Jacobian: the discrete Lagrangian is not regular here.
class RegularityError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration did not converge.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double residual, long step = -1)
      : Error(what), residual_(residual), step_(step) {}
  double residual() const noexcept { return residual_; }
  long step() const noexcept { return step_; }

 private:
  double residual_;
  long step_;
};

/// Initial data violates the constraints or is outside M_0.
class InadmissibleError : public Error {
 public:
  using Error::Error;
};

std::string format_point(const Vector& v);

}  // namespace gni
