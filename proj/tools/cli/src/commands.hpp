#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "gni/gni_stepper.hpp"
#include "gni/models.hpp"
#include "gni/trajectory.hpp"

namespace gni::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Fully resolved settings for one trajectory.
struct RunSpec {
  Model model;
  std::string method = "gni";  // gni, rattle, dla, reference
  double h = 0.0;
  long steps = 0;
  ChartPoint q0;
  std::optional<TangentVec> v0;
  std::optional<ChartPoint> q1;
  std::string dla_constraint;
  std::optional<SnakeboardControls> controls;
  int ref_refine = 100;
  StepConfig step;
};

/// Validates a run configuration. Throws ConfigError.
RunSpec resolve_run_spec(const Config& cfg);

/// Runs the spec; rows are streamed to sink as they are produced.
/// Numerical failures propagate as gni::Error subclasses.
TrajectoryRecord execute(const RunSpec& spec, const RowSink& sink = {});

int cmd_run(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_convergence(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_list_models(const Config& cfg, std::ostream& out, std::ostream& err);

/// Entry point without the program name; returns the exit status.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gni::cli
