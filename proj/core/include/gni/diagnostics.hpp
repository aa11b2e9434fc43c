#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gni/discretization.hpp"
#include "gni/system.hpp"
#include "gni/trajectory.hpp"

namespace gni {

/// A section q -> xi(q) of the Lie algebra bundle g^D together with the
/// infinitesimal generator xi_Q(q) of the acting group.
struct SymmetrySection {
  std::string name;
  int g_dim = 0;
  std::function<Vector(const ChartPoint&)> xi_of_q;
  std::function<TangentVec(const ChartPoint&, const Vector&)> generator;

  TangentVec generator_at(const ChartPoint& q) const { return generator(q, xi_of_q(q)); }
};

struct EnergyReport {
  std::vector<double> H;
  double max_drift = 0.0;
};

/// H(q, p) = 1/2 p^T M(q)^-1 p + V(q).
double energy(const MechanicalSystem& sys, const ChartPoint& q, const CotangentVec& p);

CotangentVec average_momentum(const MomentumRecord& rec);

/// ||mu(q) generator(q, xi(q))||_inf; zero when the section lies in D.
double section_violation(const MechanicalSystem& sys, const SymmetrySection& sec,
                         const ChartPoint& q);

/// Discrete nonholonomic momentum map <D2 L_d(q_prev, q_curr), xi_Q(q_curr)>
/// with xi = sec.xi_of_q(q_curr). Raw L_d normalization.
double jnh(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
           const SymmetrySection& sec, const ChartPoint& q_prev, const ChartPoint& q_curr);

/// J(q_k, q_k+1) - J(q_k-1, q_k) - <D2 L_d(q_k, q_k+1), (xi_k+1 - xi_k)_Q(q_k+1)>.
double momentum_equation_residual(const MechanicalSystem& sys, const DiscreteLagrangian& Ld,
                                  const SymmetrySection& sec, const ChartPoint& q_prev,
                                  const ChartPoint& q_curr, const ChartPoint& q_next);

/// Energies along a record, pre-momentum based unless use_post.
EnergyReport energy_report(const TrajectoryRecord& rec, bool use_post = false);

/// <p_post_k, xi_Q(q_k)> per row, in the record's momentum units.
std::vector<double> momentum_map_series(const TrajectoryRecord& rec, const SymmetrySection& sec);

}  // namespace gni
