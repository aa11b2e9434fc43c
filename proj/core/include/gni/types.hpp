#pragma once

#include <Eigen/Dense>

namespace gni {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// All dynamics is chart based: points, velocities and momenta are coordinate
// n-vectors. The aliases name the role a vector plays at a base point.
using ChartPoint = Vector;
using TangentVec = Vector;
using CotangentVec = Vector;

}  // namespace gni
