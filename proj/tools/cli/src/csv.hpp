#pragma once

#include <ostream>
#include <string>

#include "gni/trajectory.hpp"

namespace gni::cli {

/// Shortest decimal text with 17 significant digits.
std::string format_real(double x);

/// Streams trajectory rows as CSV:
/// t, q[0..n), p_pre[0..n), p_post[0..n), p_avg[0..n), lambda[0..m), energy,
/// constraint_residual.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, int n, int m);
  void header();
  void row(const TrajectoryRow& r);
  /// Marker line after which no further rows follow.
  void failed(const std::string& message);

 private:
  std::ostream& out_;
  int n_;
  int m_;
};

}  // namespace gni::cli
