#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gni/errors.hpp"
#include "gni/gni_stepper.hpp"
#include "gni/models.hpp"
#include "gni/reference.hpp"
#include "oracles.hpp"
#include "random_systems.hpp"

using namespace gni;

namespace {

StepConfig config(double h) {
  StepConfig cfg;
  cfg.h = h;
  return cfg;
}

double inf(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(Lda, AtRestWithoutPotential) {
  for (const std::string name : {"particle", "snakeboard", "sleigh"}) {
    const auto md = make_model(name);
    const ContinuousState st{md.defaults.q0, Vector::Zero(md.system.n), 0.0};
    EXPECT_LE(inf(lda_rhs(md.system, st)), 1e-15) << name;
  }
}

TEST(Lda, ParticleEquationsOfMotion) {
  const auto sys = make_particle();
  std::mt19937 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vector q = gni::testing::random_vector(rng, 3);
    const double vx = std::normal_distribution<double>()(rng);
    const double vy = std::normal_distribution<double>()(rng);
    const Vector v{{vx, vy, q[1] * vx}};
    const auto sol = lda_solve(sys, ContinuousState{q, v, 0.0});
    const Vector& a = sol.a;
    EXPECT_NEAR(a[0] + q[1] * a[2], 0.0, 1e-12);
    EXPECT_NEAR(a[1], 0.0, 1e-12);
    // Time derivative of zdot - y xdot = 0.
    EXPECT_NEAR(a[2] - q[1] * a[0] - vy * vx, 0.0, 1e-8 * (1 + vx * vx + vy * vy));
    // Reaction force is mu^T lambda.
    EXPECT_LE(inf(a - sys.mu(q).transpose() * sol.lambda), 1e-12);
  }
}

TEST(Lda, ConstraintTangencyOnRandomSystems) {
  // d/dt (mu(q) v) = mu a + (Dmu[v]) v, with mu(q) = A + B diag(sin q) and
  // its derivative taken analytically.
  std::mt19937 rng(2020);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 5)(rng);
    const int m = std::uniform_int_distribution<int>(1, n - 1)(rng);
    const Matrix M = gni::testing::random_spd(rng, n);
    const Matrix A = gni::testing::random_matrix(rng, m, n) + 3.0 * Matrix::Identity(m, n);
    const Matrix B = 0.3 * gni::testing::random_matrix(rng, m, n);
    MechanicalSystem sys;
    sys.name = "tangency";
    sys.n = n;
    sys.m = m;
    sys.metric = [M](const ChartPoint&) { return M; };
    sys.constant_metric = true;
    sys.constraints = [A, B](const ChartPoint& q) {
      return Matrix(A + B * q.array().sin().matrix().asDiagonal());
    };
    sys.potential = [](const ChartPoint& q) { return 0.5 * q.squaredNorm(); };
    sys.potential_grad = [](const ChartPoint& q) -> CotangentVec { return q; };

    const Vector q = 0.5 * gni::testing::random_vector(rng, n);
    const Vector v = gni::testing::random_admissible_velocity(rng, sys, q);
    const Matrix dmu = B * (q.array().cos() * v.array()).matrix().asDiagonal();
    const TangentVec acc = lda_rhs(sys, ContinuousState{q, v, 0.0});
    EXPECT_LE(inf(sys.mu(q) * acc + dmu * v), 1e-10 * (1 + v.squaredNorm() + inf(q)));
  }
}

TEST(Lda, SleighMatchesBodyFrameEquations) {
  // Forward speed u and angular rate w obey udot = a w^2,
  // wdot = -m a u w / (I + m a^2).
  const double m = 1.2, I = 0.7, a = 0.3;
  const auto sys = make_sleigh(m, I, a);
  std::mt19937 rng(9);
  std::normal_distribution<double> N;
  for (int i = 0; i < 40; ++i) {
    const double th = 3 * N(rng), u = N(rng), w = N(rng);
    const Vector q{{N(rng), N(rng), th}};
    const Vector v{{u * std::cos(th), u * std::sin(th), w}};
    const double ud = a * w * w;
    const double wd = -m * a * u * w / (I + m * a * a);
    const Vector expected{{ud * std::cos(th) - u * w * std::sin(th),
                           ud * std::sin(th) + u * w * std::cos(th), wd}};
    EXPECT_LE(inf(lda_rhs(sys, ContinuousState{q, v, 0.0}) - expected), 1e-8);
  }
}

TEST(Lda, SleighAccelerationMatchesDifferencedTrajectory) {
  const auto sys = make_sleigh(1.0, 1.0, 0.2);
  const double th = 0.4;
  const ContinuousState st{Vector{{0.1, 0.2, th}}, Vector{{std::cos(th), std::sin(th), 0.8}}, 0.0};
  auto central = [&](double d) {
    const auto fwd = rk4_step(sys, st, d);
    const auto bwd = rk4_step(sys, st, -d);
    return Vector((fwd.v - bwd.v) / (2 * d));
  };
  const double d = 1e-2;
  const Vector richardson = (4.0 * central(d / 2) - central(d)) / 3.0;
  EXPECT_LE(inf(lda_rhs(sys, st) - richardson), 1e-8);
}

TEST(Lda, ChristoffelVanishesForConstantMetric) {
  const auto sys = make_particle();
  EXPECT_EQ(christoffel_contraction(sys, Vector::Zero(3), Vector{{1.0, 2.0, 3.0}}),
            Vector::Zero(3));
}

TEST(Rk4, FreeParticleIsExact) {
  const auto md = make_model("free");
  const auto rec = rk4_run(md.system, ContinuousState{Vector{{0.5}}, Vector{{-1.5}}, 0.0}, 0.01,
                           1000, 10);
  ASSERT_EQ(rec.rows.size(), 101u);
  for (const auto& r : rec.rows) EXPECT_NEAR(r.q[0], 0.5 - 1.5 * r.t, 1e-12);
  EXPECT_EQ(rec.method, "reference");
}

TEST(Rk4, ParticleEnergyErrorIsFourthOrder) {
  const auto sys = make_particle();
  const ContinuousState init{Vector{{0.0, 0.5, 0.0}}, Vector{{1.0, 1.0, 0.5}}, 0.0};
  const double T = 20.0;
  double err[2];
  const double hs[2] = {0.2, 0.1};
  for (int i = 0; i < 2; ++i) {
    const long n = std::lround(T / hs[i]);
    const auto rec = rk4_run(sys, init, hs[i], n, n);
    err[i] = std::abs(rec.rows.back().energy - rec.rows.front().energy);
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 3.8);
}

TEST(Rk4, ConstraintDriftIsSmall) {
  const auto sys = make_particle();
  const ContinuousState init{Vector{{0.0, 0.5, 0.0}}, Vector{{1.0, 1.0, 0.5}}, 0.0};
  const auto rec = rk4_run(sys, init, 1e-3, 10000, 100);
  EXPECT_LE(rec.max_constraint_residual(), 1e-10);
}

TEST(Rk4, RejectsBadArguments) {
  const auto sys = make_particle();
  const ContinuousState init{Vector::Zero(3), Vector::Zero(3), 0.0};
  EXPECT_THROW(rk4_run(sys, init, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(rk4_run(sys, init, 0.1, 10, 0), std::invalid_argument);
}

TEST(ShootingFit, RecoversVelocity) {
  const auto sys = make_sleigh(1.0, 1.0, 0.2);
  const Vector q0 = Vector::Zero(3);
  const Vector v_true{{-2.0, 0.0, 0.6}};
  const double h = 0.1;
  const Vector q1 = reference_flow(sys, q0, v_true, h, 100);
  const Vector v = fit_initial_velocity(sys, q0, q1, h, 100);
  EXPECT_LE(inf(v - v_true), 1e-9);
  EXPECT_LE(inf(sys.mu(q0) * v), 1e-14);
}

TEST(DiscreteConstraints, VanishOnDiagonalAndNamed) {
  const auto sys = make_sleigh(1.0, 1.0, 0.2);
  const Vector q{{0.3, 0.1, 0.9}};
  for (const std::string name : {"midpoint", "left"}) {
    const auto dc = discrete_constraint_by_name(name, sys, 0.1);
    EXPECT_EQ(inf(dc.eval(q, q)), 0.0);
    EXPECT_FALSE(dc.description.empty());
  }
  EXPECT_THROW(discrete_constraint_by_name("trapezoid", sys, 0.1), std::invalid_argument);
}

TEST(DiscreteConstraints, SleighForms) {
  const auto sys = make_sleigh(1.0, 1.0, 0.2);
  const double h = 0.1;
  const Vector q1{{0.3, 0.1, 0.9}}, q2{{0.35, 0.2, 1.1}};
  const double tm = 0.5 * (q1[2] + q2[2]);
  const double mid = ((q2[0] - q1[0]) * std::sin(tm) - (q2[1] - q1[1]) * std::cos(tm)) / h;
  const double left = ((q2[0] - q1[0]) * std::sin(q1[2]) - (q2[1] - q1[1]) * std::cos(q1[2])) / h;
  EXPECT_NEAR(midpoint_constraint(sys, h).eval(q1, q2)[0], mid, 1e-14);
  EXPECT_NEAR(left_point_constraint(sys, h).eval(q1, q2)[0], left, 1e-14);
}

TEST(Dla, ParticleSharesFirstTwoEquationsWithGni) {
  const auto md = make_model("particle");
  const double h = 0.05;
  const auto Ld = md.lagrangian(h);
  const auto dc = midpoint_constraint(md.system, h);
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector q0 = gni::testing::random_vector(rng, 3);
    const Vector q1 = q0 + h * gni::testing::random_vector(rng, 3);
    const Vector q2 = dla_step(md.system, Ld, dc, q0, q1, config(h));
    EXPECT_NEAR((q2[0] - 2 * q1[0] + q0[0]) + q1[1] * (q2[2] - 2 * q1[2] + q0[2]), 0.0, 1e-12);
    EXPECT_NEAR(q2[1] - 2 * q1[1] + q0[1], 0.0, 1e-12);
    EXPECT_NEAR((q2[2] - q1[2]) - 0.5 * (q2[1] + q1[1]) * (q2[0] - q1[0]), 0.0, 1e-12);
  }
}

TEST(Dla, UnconstrainedEqualsDiscreteEulerLagrange) {
  const auto md = make_model("oscillator");
  const double h = 0.05;
  const auto Ld = md.lagrangian(h);
  const auto init = initialize_from_velocity(md.system, Ld, Vector{{1.0}}, Vector{{0.2}},
                                             config(h));
  const auto dc = midpoint_constraint(md.system, h);
  const auto a = dla_run(md.system, Ld, dc, init, config(h), 300);
  const auto b = gni_run(md.system, Ld, init, config(h), 300);
  EXPECT_EQ(a.method, "dla");
  for (std::size_t k = 0; k < a.rows.size(); ++k)
    ASSERT_NEAR(a.rows[k].q[0], b.rows[k].q[0], 1e-13) << k;
}

TEST(Dla, SleighSatisfiesDiscreteConstraint) {
  const auto md = make_model("sleigh");
  const double h = 0.1;
  const auto Ld = md.lagrangian(h);
  const GniState init{md.defaults.q0, *md.defaults.q1, 1, h};
  for (const std::string name : {"midpoint", "left"}) {
    const auto dc = discrete_constraint_by_name(name, md.system, h);
    const auto rec = dla_run(md.system, Ld, dc, init, config(h), 150);
    ASSERT_EQ(rec.rows.size(), 151u);
    // The first pair is initial data; every computed pair satisfies c = 0.
    for (std::size_t k = 1; k + 1 < rec.rows.size(); ++k)
      ASSERT_LE(inf(dc.eval(rec.rows[k].q, rec.rows[k + 1].q)), 1e-12) << name << " " << k;
  }
}

TEST(Dla, SleighTracksReference) {
  const auto md = make_model("sleigh");
  const double h = 0.1;
  const auto Ld = md.lagrangian(h);
  const GniState init{md.defaults.q0, *md.defaults.q1, 1, h};
  const auto rec = dla_run(md.system, Ld, midpoint_constraint(md.system, h), init, config(h), 150);
  const Vector v0 = fit_initial_velocity(md.system, md.defaults.q0, *md.defaults.q1, h, 100);
  const auto ref = rk4_run(md.system, ContinuousState{md.defaults.q0, v0, 0.0}, h / 100, 15000,
                           100);
  double worst = 0.0;
  for (std::size_t k = 0; k < rec.rows.size(); ++k)
    worst = std::max(worst, (rec.rows[k].q - ref.rows[k].q).norm());
  EXPECT_LT(worst, 0.1);
}
