#include "gni/system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gni/errors.hpp"
#include "gni/finite_difference.hpp"

namespace gni {

std::string format_point(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

Matrix MechanicalSystem::metric_at(const ChartPoint& q) const { return metric(q); }

Matrix MechanicalSystem::metric_derivative(const ChartPoint& q, int i) const {
  if (constant_metric) return Matrix::Zero(n, n);
  if (metric_partial) return metric_partial(q, i);
  return fd::partial(metric, q, i);
}

Matrix MechanicalSystem::projector_metric_at(const ChartPoint& q) const {
  return projector_metric ? projector_metric(q) : metric(q);
}

double MechanicalSystem::V(const ChartPoint& q) const {
  return potential ? potential(q) : 0.0;
}

CotangentVec MechanicalSystem::V_q(const ChartPoint& q) const {
  if (potential_grad) return potential_grad(q);
  if (potential) return fd::gradient(potential, q);
  return CotangentVec::Zero(n);
}

Matrix MechanicalSystem::mu(const ChartPoint& q) const {
  if (m == 0 || !constraints) return Matrix::Zero(0, n);
  return constraints(q);
}

void MechanicalSystem::check_point(const ChartPoint& q) const {
  if (q.size() != n) {
    throw std::invalid_argument(name + ": expected a point with " + std::to_string(n) +
                                " coordinates, got " + std::to_string(q.size()));
  }
  if (!q.allFinite()) {
    throw std::invalid_argument(name + ": non-finite coordinates " + format_point(q));
  }
}

}  // namespace gni
