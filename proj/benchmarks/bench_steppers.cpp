#include <benchmark/benchmark.h>

#include "gni/geometry.hpp"
#include "gni/gni_stepper.hpp"
#include "gni/models.hpp"
#include "gni/rattle.hpp"

using namespace gni;

namespace {

GniState default_start(const Model& md, const DiscreteLagrangian& Ld, const StepConfig& cfg) {
  if (md.defaults.q1) return GniState{md.defaults.q0, *md.defaults.q1, 1, cfg.h};
  return initialize_from_velocity(md.system, Ld, md.defaults.q0, *md.defaults.v0, cfg);
}

void BM_GniStep(benchmark::State& state, const char* model) {
  const auto md = make_model(model);
  StepConfig cfg;
  cfg.h = md.defaults.h;
  const auto Ld = md.lagrangian(cfg.h);
  GniState st = default_start(md, Ld, cfg);
  const GniState start = st;
  long k = 0;
  for (auto _ : state) {
    st = gni_step(md.system, Ld, st, cfg);
    benchmark::DoNotOptimize(st.q_curr.data());
    if (++k == 1000) {
      st = start;
      k = 0;
    }
  }
}
BENCHMARK_CAPTURE(BM_GniStep, particle, "particle");
BENCHMARK_CAPTURE(BM_GniStep, snakeboard, "snakeboard");
BENCHMARK_CAPTURE(BM_GniStep, sleigh, "sleigh");

void BM_RattleStep(benchmark::State& state) {
  const auto md = make_model("particle");
  StepConfig cfg;
  cfg.h = md.defaults.h;
  const auto Ld = md.lagrangian(cfg.h);
  const GniState pair = default_start(md, Ld, cfg);
  const RattleState start = rattle_init(md.system, Ld, pair.q_prev, pair.q_curr);
  RattleState st = start;
  long k = 0;
  for (auto _ : state) {
    st = rattle_step(md.system, st, cfg.h);
    benchmark::DoNotOptimize(st.q.data());
    if (++k == 1000) {
      st = start;
      k = 0;
    }
  }
}
BENCHMARK(BM_RattleStep);

void BM_Projectors(benchmark::State& state, const char* model) {
  const auto md = make_model(model);
  const ChartPoint q = md.defaults.q0;
  for (auto _ : state) {
    auto pp = projectors_at(md.system, q);
    benchmark::DoNotOptimize(pp.Q_mat.data());
  }
}
BENCHMARK_CAPTURE(BM_Projectors, particle, "particle");
BENCHMARK_CAPTURE(BM_Projectors, snakeboard, "snakeboard");
BENCHMARK_CAPTURE(BM_Projectors, sleigh, "sleigh");

}  // namespace
BENCHMARK_MAIN();
