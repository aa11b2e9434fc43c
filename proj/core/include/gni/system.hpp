#pragma once

#include <functional>
#include <map>
#include <string>

#include "gni/types.hpp"

namespace gni {

using MatrixField = std::function<Matrix(const ChartPoint&)>;
/// Partial derivative of a matrix field with respect to coordinate i.
using MatrixFieldPartial = std::function<Matrix(const ChartPoint&, int)>;
using ScalarField = std::function<double(const ChartPoint&)>;
using CovectorField = std::function<CotangentVec(const ChartPoint&)>;

/// Mechanical Lagrangian L = 1/2 v^T M(q) v - V(q) with linear velocity
/// constraints mu(q) v = 0.
struct MechanicalSystem {
  std::string name;
  int n = 0;
  int m = 0;

  MatrixField metric;
  MatrixFieldPartial metric_partial;  // optional; finite differences otherwise
  bool constant_metric = false;

  ScalarField potential;          // optional; zero otherwise
  CovectorField potential_grad;   // optional; zero otherwise

  MatrixField constraints;        // m x n, rows are the one-forms mu^a

  // Optional metric used only to build the projectors. Empty means the
  // kinetic-energy metric.
  MatrixField projector_metric;

  std::map<std::string, double> params;

  Matrix metric_at(const ChartPoint& q) const;
  Matrix metric_derivative(const ChartPoint& q, int i) const;
  Matrix projector_metric_at(const ChartPoint& q) const;
  double V(const ChartPoint& q) const;
  CotangentVec V_q(const ChartPoint& q) const;
  Matrix mu(const ChartPoint& q) const;

  /// Throws std::invalid_argument if q does not have n finite entries.
  void check_point(const ChartPoint& q) const;
};

}  // namespace gni
