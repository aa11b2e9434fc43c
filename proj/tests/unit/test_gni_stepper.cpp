#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gni/errors.hpp"
#include "gni/geometry.hpp"
#include "gni/gni_stepper.hpp"
#include "gni/models.hpp"
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

// Random admissible start for a model with |v| of order one.
GniState random_start(std::mt19937& rng, const Model& md, const DiscreteLagrangian& Ld,
                      const StepConfig& cfg) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vector q0(md.system.n);
  for (int i = 0; i < md.system.n; ++i) q0[i] = U(rng);
  const Vector v0 = gni::testing::random_admissible_velocity(rng, md.system, q0);
  return initialize_from_velocity(md.system, Ld, q0, v0, cfg);
}

}  // namespace

TEST(GniStep, UnconstrainedFreeParticleMovesUniformly) {
  const auto md = make_model("free");
  const double h = 0.1;
  const auto Ld = md.lagrangian(h);
  GniState st{Vector{{0.0}}, Vector{{h}}, 1, h};
  const auto next = gni_step(md.system, Ld, st, config(h));
  EXPECT_NEAR(next.q_curr[0], 2 * h, 1e-15);
  EXPECT_EQ(next.q_prev, st.q_curr);
  EXPECT_EQ(next.k, 2);
  EXPECT_NEAR(next.t, 2 * h, 1e-15);
}

TEST(GniStep, ParticleMatchesScalarLinearEquations) {
  const auto md = make_model("particle");
  std::mt19937 rng(61);
  for (double h : {0.1, 0.01}) {
    const auto Ld = md.lagrangian(h);
    for (int trial = 0; trial < 50; ++trial) {
      const Vector q0 = gni::testing::random_vector(rng, 3);
      const Vector q1 = q0 + h * gni::testing::random_vector(rng, 3);
      const auto next = gni_step(md.system, Ld, GniState{q0, q1, 1, h}, config(h));
      const Vector oracle = gni::testing::particle_step_linear_solve(q0, q1);
      EXPECT_LE(inf(next.q_curr - oracle), 1e-12) << "h=" << h << " trial " << trial;
    }
  }
}

TEST(GniStep, SnakeboardMatchesMatrixUpdate) {
  const auto md = make_model("snakeboard");
  const auto& p = md.system.params;
  std::mt19937 rng(13);
  const double h = 0.01;
  const auto Ld = md.lagrangian(h);
  const Matrix M = md.system.metric_at(Vector::Zero(5));
  for (int trial = 0; trial < 50; ++trial) {
    const Vector q0 = gni::testing::random_vector(rng, 5);
    const Vector q1 = q0 + h * gni::testing::random_vector(rng, 5);
    const Matrix Q = gni::testing::snakeboard_Q_closed_form(p.at("m"), p.at("J"), p.at("J1"),
                                                            p.at("r"), q1[2], q1[4]);
    const Matrix A = Matrix::Identity(5, 5) - 2.0 * M.inverse() * Q.transpose() * M;
    const Vector oracle = A * (q1 - q0) + q1;
    const auto next = gni_step(md.system, Ld, GniState{q0, q1, 1, h}, config(h));
    EXPECT_LE(inf(next.q_curr - oracle), 1e-12) << "trial " << trial;
  }
}

TEST(GniStep, ConstantMidpointMetricReproducesQuadraticForm) {
  const auto md = make_model("particle");
  const double h = 0.02;
  const Matrix M = Matrix::Identity(3, 3);
  const auto quad = make_scaled_quadratic(M, h);
  const auto mid = make_midpoint_metric([M](const ChartPoint&) { return M; }, h);
  const auto init = initialize_from_velocity(md.system, quad, Vector::Zero(3),
                                             Vector{{1.0, 1.0, 0.0}}, config(h));
  const auto a = gni_run(md.system, quad, init, config(h), 200);
  const auto b = gni_run(md.system, mid, init, config(h), 200);
  for (std::size_t k = 0; k < a.rows.size(); ++k)
    ASSERT_LE(inf(a.rows[k].q - b.rows[k].q), 1e-11) << k;
}

TEST(GniRun, RecordShapeAndRowContents) {
  const auto md = make_model("particle");
  const double h = 0.01;
  const auto Ld = md.lagrangian(h);
  const auto init = initialize_from_velocity(md.system, Ld, Vector::Zero(3),
                                             Vector{{1.0, 1.0, 0.0}}, config(h));
  std::vector<TrajectoryRow> streamed;
  const auto rec = gni_run(md.system, Ld, init, config(h), 25, {},
                           [&](const TrajectoryRow& r) { streamed.push_back(r); });
  ASSERT_EQ(rec.rows.size(), 26u);
  ASSERT_EQ(streamed.size(), 26u);
  EXPECT_EQ(rec.method, "gni");
  EXPECT_EQ(rec.rows[0].q, init.q_prev);
  EXPECT_EQ(rec.rows[1].q, init.q_curr);
  EXPECT_EQ(rec.rows[0].t, 0.0);
  for (std::size_t k = 0; k < rec.rows.size(); ++k) {
    const auto& r = rec.rows[k];
    EXPECT_EQ(r.k, static_cast<long>(k));
    EXPECT_NEAR(r.t, k * h, 1e-13);
    EXPECT_EQ(r.p_avg, 0.5 * (r.p_pre + r.p_post));
    EXPECT_EQ(streamed[k].q, r.q);
  }
  // Initial pre-momentum equals the continuous momentum M v0.
  EXPECT_LE(inf(rec.rows[0].p_pre - Vector{{1.0, 1.0, 0.0}}), 1e-12);
}

TEST(GniRun, MultipliersSolveReactionBalance) {
  // post - pre = mu^T lambda in physical units; solve it independently by
  // least squares on the transposed constraint matrix.
  for (const std::string name : {"particle", "snakeboard", "sleigh"}) {
    const auto md = make_model(name);
    const double h = md.defaults.h;
    const auto Ld = md.lagrangian(h);
    GniState init;
    if (md.defaults.q1) {
      init = GniState{md.defaults.q0, *md.defaults.q1, 1, h};
    } else {
      init = initialize_from_velocity(md.system, Ld, md.defaults.q0, *md.defaults.v0, config(h));
    }
    const auto rec = gni_run(md.system, Ld, init, config(h), 40);
    for (const auto& r : rec.rows) {
      const Matrix muT = md.system.mu(r.q).transpose();
      const Vector lam = muT.colPivHouseholderQr().solve(r.p_post - r.p_pre);
      EXPECT_LE(inf(r.lambda - lam), 1e-9 * (1 + inf(lam))) << name;
      EXPECT_LE(inf(muT * r.lambda - (r.p_post - r.p_pre)), 1e-9 * (1 + inf(r.p_pre))) << name;
    }
  }
}

TEST(GniRun, ZeroVelocityStaysPut) {
  for (const auto& name : model_names()) {
    const auto md = make_model(name);
    if (name == "oscillator") continue;  // nonzero potential force
    const double h = md.defaults.h;
    const auto Ld = md.lagrangian(h);
    const Vector q0 = md.defaults.q0;
    const auto rec = gni_run(md.system, Ld, GniState{q0, q0, 1, h}, config(h), 20);
    for (const auto& r : rec.rows) {
      EXPECT_LE(inf(r.q - q0), 1e-15) << name;
      EXPECT_LE(inf(r.p_pre), 1e-15) << name;
    }
  }
}

// Structural properties over random admissible starts on the models where
// the energy theorem applies.
TEST(GniProperties, JumpAverageConstraintAndEnergy) {
  std::mt19937 rng(2718);
  for (const std::string name : {"particle", "snakeboard"}) {
    const auto md = make_model(name);
    const double h = 0.01;
    const auto cfg = config(h);
    const auto Ld = md.lagrangian(h);
    for (int trial = 0; trial < 10; ++trial) {
      const auto init = random_start(rng, md, Ld, cfg);
      const auto rec = gni_run(md.system, Ld, init, cfg, 500);
      const double H0 = rec.rows[0].energy;
      const auto pp0 = projectors_at(md.system, rec.rows[0].q);
      for (const auto& r : rec.rows) {
        ASSERT_LE(r.jump_residual, 10 * cfg.newton_tol) << name << " k=" << r.k;
        ASSERT_LE(r.constraint_residual, 10 * cfg.newton_tol) << name << " k=" << r.k;
        ASSERT_LE(std::abs(r.energy - H0), 1e-10 * (1 + std::abs(H0))) << name << " k=" << r.k;
        const auto pp = projectors_at(md.system, r.q);
        ASSERT_LE(inf(pp.Q_mat.transpose() * r.p_avg), 10 * cfg.newton_tol);
        ASSERT_LE(inf(pp.P_mat.transpose() * r.p_pre - r.p_avg), 1e-10);
      }
      (void)pp0;
    }
  }
}

TEST(GniProperties, AverageConstraintOnSleighAndForcedSnakeboard) {
  const auto cfg_sl = config(0.1);
  const auto sl = make_model("sleigh");
  const auto rec_sl = gni_run(sl.system, sl.lagrangian(0.1),
                              GniState{sl.defaults.q0, *sl.defaults.q1, 1, 0.1}, cfg_sl, 150);
  EXPECT_LE(rec_sl.max_constraint_residual(), 10 * cfg_sl.newton_tol);
  EXPECT_LE(rec_sl.max_jump_residual(), 10 * cfg_sl.newton_tol);

  const auto sb = make_model("snakeboard");
  const double h = 0.01;
  const auto Ld = sb.lagrangian(h);
  const auto init = initialize_from_velocity(sb.system, Ld, sb.defaults.q0, *sb.defaults.v0,
                                             config(h));
  const auto rec = gni_run(sb.system, Ld, init, config(h), 1000,
                           snakeboard_control_force(SnakeboardControls{}));
  EXPECT_LE(rec.max_constraint_residual(), 10 * config(h).newton_tol);
  EXPECT_LE(rec.max_jump_residual(), 10 * config(h).newton_tol);
  // The controls do work, so the energy changes.
  EXPECT_GT(rec.max_energy_drift(), 1e-3);
}

TEST(GniProperties, Reversibility) {
  std::mt19937 rng(31);
  for (const std::string name : {"particle", "snakeboard", "sleigh"}) {
    const auto md = make_model(name);
    const double h = md.defaults.h;
    const auto Ld = md.lagrangian(h);
    const auto cfg = config(h);
    GniState init = name == "sleigh" ? GniState{md.defaults.q0, *md.defaults.q1, 1, h}
                                     : random_start(rng, md, Ld, cfg);
    std::vector<ChartPoint> fwd{init.q_prev, init.q_curr};
    GniState st = init;
    for (int i = 0; i < 100; ++i) {
      st = gni_step(md.system, Ld, st, cfg);
      fwd.push_back(st.q_curr);
    }
    GniState back{fwd[fwd.size() - 1], fwd[fwd.size() - 2], 1, h};
    for (int i = 0; i < 100; ++i) {
      back = gni_step(md.system, Ld, back, cfg);
      const std::size_t idx = fwd.size() - 3 - static_cast<std::size_t>(i);
      ASSERT_LE(inf(back.q_curr - fwd[idx]), 1e-9) << name << " step " << i;
    }
  }
}

TEST(GniProperties, UnconstrainedMatchesStormerVerlet) {
  const auto md = make_model("oscillator");
  const double h = 0.05;
  const auto Ld = md.lagrangian(h);
  const auto init = initialize_from_velocity(md.system, Ld, Vector{{1.0}}, Vector{{0.0}},
                                             config(h));
  const auto rec = gni_run(md.system, Ld, init, config(h), 1000);
  const auto sv = gni::testing::stormer_verlet_oscillator(1.0, 1.0, 1.0, 0.0, h, 1000);
  for (std::size_t k = 0; k < rec.rows.size(); ++k)
    ASSERT_NEAR(rec.rows[k].q[0], sv[k], 1e-12) << k;
}

TEST(Initialization, ParticleClosedForm) {
  const auto md = make_model("particle");
  const double h = 0.01;
  const auto st = initialize_from_velocity(md.system, md.lagrangian(h), Vector::Zero(3),
                                           Vector{{1.0, 0.0, 0.0}}, config(h));
  EXPECT_LE(inf(st.q_curr - Vector{{h, 0.0, 0.0}}), 1e-15);
  EXPECT_EQ(st.q_prev, Vector::Zero(3));
  EXPECT_EQ(st.k, 1);
  EXPECT_DOUBLE_EQ(st.t, h);
}

TEST(Initialization, ZeroVelocity) {
  const auto md = make_model("snakeboard");
  const Vector q0 = md.defaults.q0;
  const auto st = initialize_from_velocity(md.system, md.lagrangian(0.01), q0, Vector::Zero(5),
                                           config(0.01));
  EXPECT_LE(inf(st.q_curr - q0), 1e-15);
}

TEST(Initialization, SymmetricFormWithPotential) {
  // q1 = q0 + h v0 - h^2/2 M^-1 V_q(q0) for a constant metric.
  std::mt19937 rng(4);
  auto sys = gni::testing::random_constant_mass_system(rng, 4, 2);
  const double h = 0.03;
  const auto Ld = make_symmetric_mechanical(sys, h);
  const Vector q0 = 0.2 * gni::testing::random_vector(rng, 4);
  const Vector v0 = gni::testing::random_admissible_velocity(rng, sys, q0);
  const auto st = initialize_from_velocity(sys, Ld, q0, v0, config(h));
  const Matrix M = sys.metric_at(q0);
  const Vector expected = q0 + h * v0 - 0.5 * h * h * M.inverse() * sys.V_q(q0);
  EXPECT_LE(inf(st.q_curr - expected), 1e-14);
  EXPECT_TRUE(in_initial_manifold(sys, Ld, st.q_prev, st.q_curr).member);
}

TEST(Initialization, SleighPairInInitialManifold) {
  const auto md = make_model("sleigh");
  const auto Ld = md.lagrangian(0.1);
  const Vector q0{{0.0, 0.0, 0.4}};
  const Vector v0{{std::cos(0.4), std::sin(0.4), 0.7}};
  const auto st = initialize_from_velocity(md.system, Ld, q0, v0, config(0.1));
  const auto chk = in_initial_manifold(md.system, Ld, st.q_prev, st.q_curr);
  EXPECT_TRUE(chk.member);
  EXPECT_LE(chk.residual, 1e-12);
  EXPECT_LE(inf(0.1 * legendre_minus(Ld, st.q_prev, st.q_curr) - md.system.metric_at(q0) * v0),
            1e-12);
}

TEST(Initialization, RejectsInadmissibleVelocity) {
  const auto md = make_model("particle");
  EXPECT_THROW(initialize_from_velocity(md.system, md.lagrangian(0.01), Vector::Zero(3),
                                        Vector{{0.0, 0.0, 1.0}}, config(0.01)),
               InadmissibleError);
  EXPECT_THROW(initialize_from_velocity(md.system, md.lagrangian(0.01), Vector::Zero(3),
                                        Vector{{1.0, 0.0}}, config(0.01)),
               std::invalid_argument);
}

TEST(InitialManifold, ParticleOffManifoldPair) {
  const auto md = make_model("particle");
  const double h = 0.01;
  const auto chk = in_initial_manifold(md.system, md.lagrangian(h), Vector{{0.0, 1.0, 0.0}},
                                       Vector{{h, 1.0, 0.0}});
  EXPECT_FALSE(chk.member);
  EXPECT_NEAR(chk.residual, 1.0 / h, 1e-9);
}

TEST(InitialManifold, UnconstrainedAlwaysMember) {
  const auto md = make_model("free");
  EXPECT_TRUE(in_initial_manifold(md.system, md.lagrangian(0.1), Vector{{0.0}}, Vector{{5.0}})
                  .member);
}

TEST(GniErrors, InvalidConfig) {
  const auto md = make_model("particle");
  const auto Ld = md.lagrangian(0.01);
  const GniState st{Vector::Zero(3), Vector::Zero(3), 1, 0.01};
  StepConfig cfg = config(0.0);
  EXPECT_THROW(gni_step(md.system, Ld, st, cfg), std::invalid_argument);
  cfg = config(0.01);
  cfg.newton_tol = 0.0;
  EXPECT_THROW(gni_step(md.system, Ld, st, cfg), std::invalid_argument);
  EXPECT_THROW(gni_step(md.system, Ld, GniState{Vector::Zero(2), Vector::Zero(3), 1, 0.0},
                        config(0.01)),
               std::invalid_argument);
}

TEST(GniErrors, RankDeficiencyAtDegenerateSnakeboardConfiguration) {
  const auto md = make_model("snakeboard");
  const Vector q{{0.0, 0.0, 0.3, 0.0, M_PI / 2}};
  EXPECT_THROW(gni_step(md.system, md.lagrangian(0.01), GniState{q, q, 1, 0.01}, config(0.01)),
               RankDeficiencyError);
}

TEST(GniErrors, NonConvergenceReportsStep) {
  const auto md = make_model("sleigh");
  const double h = 0.1;
  StepConfig cfg = config(h);
  cfg.newton_max_iter = 1;
  try {
    gni_run(md.system, md.lagrangian(h), GniState{md.defaults.q0, *md.defaults.q1, 1, h}, cfg,
            10);
    FAIL() << "expected StepFailure";
  } catch (const StepFailure& e) {
    EXPECT_EQ(e.step(), 1);
    EXPECT_GT(e.residual(), 0.0);
    EXPECT_NE(std::string(e.what()).find("at step 1"), std::string::npos);
  }
}

TEST(GniErrors, SingularMixedDerivativeIsRegularityError) {
  MechanicalSystem sys;
  sys.name = "degenerate";
  sys.n = 2;
  sys.m = 0;
  sys.metric = [](const ChartPoint&) { return Matrix(Matrix::Identity(2, 2)); };
  sys.constant_metric = true;
  DiscreteLagrangian Ld;
  Ld.eval = [](const ChartPoint& a, const ChartPoint& b) { return 0.5 * std::pow(b[0] - a[0], 2) + a[1]; };
  Ld.d1 = [](const ChartPoint& a, const ChartPoint& b) -> CotangentVec {
    return Vector{{a[0] - b[0], 1.0}};
  };
  Ld.d2 = [](const ChartPoint& a, const ChartPoint& b) -> CotangentVec {
    return Vector{{b[0] - a[0], 0.0}};
  };
  Ld.d12 = [](const ChartPoint&, const ChartPoint&) {
    Matrix J = Matrix::Zero(2, 2);
    J(0, 0) = -1.0;
    return J;
  };
  Ld.step_h = 0.1;
  const GniState st{Vector{{0.0, 0.0}}, Vector{{0.1, 0.3}}, 1, 0.1};
  EXPECT_THROW(gni_run(sys, Ld, st, config(0.1), 3), RegularityError);
}
