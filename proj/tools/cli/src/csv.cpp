#include "csv.hpp"

#include <cstdio>

namespace gni::cli {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, int n, int m) : out_(out), n_(n), m_(m) {}

void CsvWriter::header() {
  out_ << "t";
  for (const char* block : {"q", "p_pre", "p_post", "p_avg"})
    for (int i = 0; i < n_; ++i) out_ << ',' << block << '[' << i << ']';
  for (int a = 0; a < m_; ++a) out_ << ",lambda[" << a << ']';
  out_ << ",energy,constraint_residual\n";
}

void CsvWriter::row(const TrajectoryRow& r) {
  out_ << format_real(r.t);
  for (const Vector* v : {&r.q, &r.p_pre, &r.p_post, &r.p_avg})
    for (Eigen::Index i = 0; i < v->size(); ++i) out_ << ',' << format_real((*v)[i]);
  for (Eigen::Index a = 0; a < r.lambda.size(); ++a) out_ << ',' << format_real(r.lambda[a]);
  out_ << ',' << format_real(r.energy) << ',' << format_real(r.constraint_residual) << '\n';
}

void CsvWriter::failed(const std::string& message) {
  std::string flat = message;
  for (char& c : flat)
    if (c == '\n') c = ' ';
  out_ << "# FAILED: " << flat << '\n';
  out_.flush();
}

}  // namespace gni::cli
