#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "gni/diagnostics.hpp"
#include "gni/errors.hpp"
#include "gni/rattle.hpp"
#include "gni/reference.hpp"

namespace gni::cli {
namespace {

using json = nlohmann::ordered_json;

const std::set<std::string> kRunKeys = {
    "model", "method", "h", "steps", "q0", "v0", "q1", "dla_constraint", "force.amp_psi",
    "force.amp_phi", "force.omega", "output", "summary", "ref_refine", "newton_tol",
    "newton_max_iter"};

void check_keys(const Config& cfg, const std::set<std::string>& extra, const std::string& cmd) {
  for (const auto& [k, v] : cfg.values()) {
    if (kRunKeys.count(k) || extra.count(k) || k.rfind("params.", 0) == 0) continue;
    throw ConfigError(cmd + ": unknown key '" + k + "'");
  }
}

bool is_numerical(const std::exception& e) {
  return dynamic_cast<const StepFailure*>(&e) || dynamic_cast<const RegularityError*>(&e) ||
         dynamic_cast<const RankDeficiencyError*>(&e);
}

// Output target: a file, or the given stream for "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw ConfigError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

GniState discrete_init(const RunSpec& spec, const DiscreteLagrangian& Ld) {
  if (spec.v0) return initialize_from_velocity(spec.model.system, Ld, spec.q0, *spec.v0, spec.step);
  return GniState{spec.q0, *spec.q1, 1, spec.h};
}

TangentVec continuous_velocity(const RunSpec& spec) {
  if (spec.v0) return *spec.v0;
  return fit_initial_velocity(spec.model.system, spec.q0, *spec.q1, spec.h, spec.ref_refine);
}

void check_dims(const RunSpec& spec) {
  const int n = spec.model.system.n;
  auto check = [&](const Vector& v, const char* key) {
    if (v.size() != n)
      throw ConfigError(std::string(key) + ": expected " + std::to_string(n) + " components for model " +
                        spec.model.name + ", got " + std::to_string(v.size()));
  };
  check(spec.q0, "q0");
  if (spec.v0) check(*spec.v0, "v0");
  if (spec.q1) check(*spec.q1, "q1");
}

json stats_json(const TrajectoryRecord& rec, const Model& md) {
  json j;
  j["rows"] = rec.rows.size();
  if (rec.rows.empty()) return j;
  j["t_final"] = rec.rows.back().t;
  j["max_energy_drift"] = rec.max_energy_drift();
  j["max_energy_post_drift"] = rec.max_energy_post_drift();
  j["max_constraint_residual"] = rec.max_constraint_residual();
  if (rec.method != "reference") j["max_jump_residual"] = rec.max_jump_residual();
  j["initial_energy"] = rec.rows.front().energy;
  json maps = json::object();
  for (const auto& sec : md.sections) {
    const auto series = momentum_map_series(rec, sec);
    double var = 0.0;
    for (double v : series) var = std::max(var, std::abs(v - series.front()));
    maps[sec.name] = {{"initial", series.front()}, {"final", series.back()}, {"max_variation", var}};
  }
  j["momentum_maps"] = maps;
  return j;
}

void write_json(const json& j, const std::string& path, std::ostream& fallback) {
  Sink s(path, fallback);
  s.get() << j.dump(2) << '\n';
}

std::string summary_path(const Config& cfg) { return cfg.get_string("summary", "-"); }

// Summary goes to stdout unless the trajectory already does.
std::ostream& summary_stream(const Config& cfg, std::ostream& out, std::ostream& err) {
  const std::string o = cfg.get_string("output", "-");
  return (o == "-" && summary_path(cfg) == "-") ? err : out;
}

struct MethodToken {
  std::string label;
  std::string method;
  std::string constraint;
};

MethodToken parse_method_token(const std::string& tok, const std::string& default_constraint) {
  MethodToken mt;
  const auto colon = tok.find(':');
  mt.method = tok.substr(0, colon);
  if (colon != std::string::npos) mt.constraint = tok.substr(colon + 1);
  if (mt.method != "gni" && mt.method != "rattle" && mt.method != "dla")
    throw ConfigError("methods: unknown method '" + tok + "'");
  if (mt.method == "dla") {
    if (mt.constraint.empty()) mt.constraint = default_constraint;
    if (mt.constraint.empty())
      throw ConfigError("methods: dla needs a constraint (dla:<name> or dla_constraint)");
    mt.label = "dla-" + mt.constraint;
  } else {
    if (!mt.constraint.empty()) throw ConfigError("methods: only dla takes a constraint suffix");
    mt.label = mt.method;
  }
  return mt;
}

RunSpec with_method(RunSpec spec, const MethodToken& mt) {
  spec.method = mt.method;
  spec.dla_constraint = mt.method == "dla" ? mt.constraint : "";
  return spec;
}

}  // namespace

RunSpec resolve_run_spec(const Config& cfg) {
  RunSpec spec;
  const std::string name = cfg.require_string("model");
  try {
    spec.model = make_model(name, cfg.numbers_with_prefix("params"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  spec.method = cfg.get_string("method", "gni");
  if (spec.method != "gni" && spec.method != "rattle" && spec.method != "dla" &&
      spec.method != "reference")
    throw ConfigError("method must be one of gni, rattle, dla, reference (got '" + spec.method + "')");

  spec.h = cfg.get_double("h").value_or(spec.model.defaults.h);
  if (!(spec.h > 0.0)) throw ConfigError("h must be > 0");
  const auto steps = cfg.get_long("steps");
  if (!steps) throw ConfigError("missing required key 'steps'");
  if (*steps < 1) throw ConfigError("steps must be >= 1");
  spec.steps = *steps;

  spec.q0 = cfg.get_vector("q0").value_or(spec.model.defaults.q0);
  const auto v0 = cfg.get_vector("v0");
  const auto q1 = cfg.get_vector("q1");
  if (v0 && q1) throw ConfigError("give either v0 or q1, not both");
  if (v0) {
    spec.v0 = v0;
  } else if (q1) {
    spec.q1 = q1;
  } else if (spec.model.defaults.v0) {
    spec.v0 = spec.model.defaults.v0;
  } else {
    if (cfg.has("q0")) throw ConfigError("q0 given without v0 or q1");
    spec.q1 = spec.model.defaults.q1;
  }
  if (!spec.v0 && !spec.q1) throw ConfigError("no initial velocity (v0) or second point (q1)");
  check_dims(spec);

  spec.dla_constraint = cfg.get_string("dla_constraint");
  if (spec.method == "dla") {
    if (spec.dla_constraint.empty()) throw ConfigError("method=dla requires dla_constraint");
    if (spec.dla_constraint != "midpoint" && spec.dla_constraint != "left")
      throw ConfigError("dla_constraint must be midpoint or left");
  } else if (!spec.dla_constraint.empty()) {
    throw ConfigError("dla_constraint is only valid with method=dla");
  }

  const auto force = cfg.numbers_with_prefix("force");
  if (!force.empty()) {
    if (!spec.model.supports_force)
      throw ConfigError("model " + spec.model.name + " takes no control force");
    if (spec.method != "gni") throw ConfigError("control forces are only supported with method=gni");
    SnakeboardControls c;
    for (const auto& [k, v] : force) {
      if (k == "amp_psi") c.amp_psi = v;
      else if (k == "amp_phi") c.amp_phi = v;
      else if (k == "omega") c.omega = v;
    }
    spec.controls = c;
  }

  const long refine = cfg.get_long("ref_refine").value_or(100);
  if (refine < 1) throw ConfigError("ref_refine must be >= 1");
  spec.ref_refine = static_cast<int>(refine);
  spec.step.h = spec.h;
  spec.step.newton_tol = cfg.get_double("newton_tol").value_or(1e-12);
  spec.step.newton_max_iter = static_cast<int>(cfg.get_long("newton_max_iter").value_or(50));
  if (!(spec.step.newton_tol > 0.0)) throw ConfigError("newton_tol must be > 0");
  if (spec.step.newton_max_iter < 1) throw ConfigError("newton_max_iter must be >= 1");
  if (spec.method == "rattle" && !spec.model.system.constant_metric)
    throw ConfigError("method=rattle requires a constant mass matrix; model " + spec.model.name +
                      " has a position-dependent metric");
  return spec;
}

TrajectoryRecord execute(const RunSpec& spec, const RowSink& sink) {
  const auto& sys = spec.model.system;
  if (spec.method == "reference") {
    const ContinuousState init{spec.q0, continuous_velocity(spec), 0.0};
    if (sys.m > 0 && (sys.mu(init.q) * init.v).lpNorm<Eigen::Infinity>() > 1e-10 * (1 + init.v.norm()))
      throw InadmissibleError("initial velocity violates the constraints");
    return rk4_run(sys, init, spec.h / spec.ref_refine, spec.steps * spec.ref_refine,
                   spec.ref_refine, sink);
  }
  const DiscreteLagrangian Ld = spec.model.lagrangian(spec.h);
  const GniState init = discrete_init(spec, Ld);
  if (spec.method == "gni") {
    DiscreteForce f;
    if (spec.controls) f = snakeboard_control_force(*spec.controls);
    return gni_run(sys, Ld, init, spec.step, spec.steps, f, sink);
  }
  if (spec.method == "rattle") {
    const RattleState rs = rattle_init(sys, Ld, init.q_prev, init.q_curr);
    return rattle_run(sys, rs, spec.h, spec.steps, sink);
  }
  const auto dc = discrete_constraint_by_name(spec.dla_constraint, sys, spec.h);
  return dla_run(sys, Ld, dc, init, spec.step, spec.steps, sink);
}

int cmd_run(const Config& cfg, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  try {
    check_keys(cfg, {}, "run");
    spec = resolve_run_spec(cfg);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::unique_ptr<Sink> csv_sink;
  try {
    csv_sink = std::make_unique<Sink>(cfg.get_string("output", "-"), out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  CsvWriter csv(csv_sink->get(), spec.model.system.n, spec.model.system.m);
  csv.header();

  TrajectoryRecord partial;
  partial.method = spec.method;
  partial.n = spec.model.system.n;
  partial.m = spec.model.system.m;
  partial.h = spec.h;
  auto sink = [&](const TrajectoryRow& r) {
    csv.row(r);
    partial.rows.push_back(r);
  };

  json summary;
  summary["command"] = "run";
  summary["model"] = spec.model.name;
  summary["method"] = spec.method;
  summary["h"] = spec.h;
  summary["steps"] = spec.steps;
  if (spec.method == "dla") summary["dla_constraint"] = spec.dla_constraint;
  json params = json::object();
  for (const auto& [k, v] : spec.model.system.params) params[k] = v;
  summary["params"] = params;

  int status = kExitOk;
  try {
    if (spec.q1 && spec.method != "reference") {
      const auto chk = in_initial_manifold(spec.model.system, spec.model.lagrangian(spec.h),
                                           spec.q0, *spec.q1);
      summary["initial_manifold"] = {{"member", chk.member}, {"residual", chk.residual}};
    }
    execute(spec, sink);
    csv_sink->get().flush();
    summary["status"] = "ok";
  } catch (const InadmissibleError& e) {
    csv.failed(e.what());
    err << "error: " << e.what() << '\n';
    summary["status"] = "failed";
    summary["error"] = e.what();
    status = kExitConfig;
  } catch (const std::invalid_argument& e) {
    csv.failed(e.what());
    err << "error: " << e.what() << '\n';
    summary["status"] = "failed";
    summary["error"] = e.what();
    status = kExitConfig;
  } catch (const Error& e) {
    csv.failed(e.what());
    err << "numerical failure: " << e.what() << '\n';
    summary["status"] = "failed";
    summary["error"] = e.what();
    if (auto* sf = dynamic_cast<const StepFailure*>(&e)) {
      summary["failed_step"] = sf->step();
      summary["last_residual"] = sf->residual();
    }
    status = is_numerical(e) ? kExitNumerical : kExitConfig;
  }
  const json stats = stats_json(partial, spec.model);
  for (const auto& [k, v] : stats.items()) summary[k] = v;
  try {
    write_json(summary, summary_path(cfg), summary_stream(cfg, out, err));
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return status;
}

int cmd_convergence(const Config& cfg, std::ostream& out, std::ostream& err) {
  RunSpec base;
  std::vector<double> hs;
  double T = 0.0;
  try {
    check_keys(cfg, {"h_list", "t_final"}, "convergence");
    Config c = cfg;
    if (!c.has("steps")) c.set("steps", "1");
    base = resolve_run_spec(c);
    if (base.method == "reference") throw ConfigError("convergence: method must be a discrete scheme");
    if (base.controls) throw ConfigError("convergence: control forces are not supported");
    for (const auto& s : cfg.get_list("h_list")) hs.push_back(parse_double(s, "h_list"));
    if (hs.size() < 2) throw ConfigError("h_list needs at least two step sizes");
    for (double h : hs)
      if (!(h > 0.0)) throw ConfigError("h_list entries must be > 0");
    std::sort(hs.begin(), hs.end(), std::greater<>());
    const auto t = cfg.get_double("t_final");
    if (!t || !(*t > 0.0)) throw ConfigError("convergence requires t_final > 0");
    T = *t;
    for (double h : hs) {
      const double r = T / h;
      if (std::abs(r - std::round(r)) > 1e-9 * r)
        throw ConfigError("t_final must be an integer multiple of every h in h_list");
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const double h_ref = hs.back() / base.ref_refine;
  try {
    // Every discrete run starts from the same continuous data (q0, v0).
    const TangentVec v0 = continuous_velocity(base);
    base.v0 = v0;
    base.q1.reset();

    auto reference_end = std::async(std::launch::async, [&] {
      const long n = std::lround(T / h_ref);
      ContinuousState s{base.q0, v0, 0.0};
      for (long i = 0; i < n; ++i) s = rk4_step(base.model.system, s, h_ref);
      return s.q;
    });
    std::vector<std::future<ChartPoint>> runs;
    for (double h : hs) {
      RunSpec spec = base;
      spec.h = h;
      spec.step.h = h;
      spec.steps = std::lround(T / h);
      runs.push_back(std::async(std::launch::async, [spec] {
        const auto rec = execute(spec);
        // Row k sits at t = k h; the final state is the last row.
        return rec.rows.back().q;
      }));
    }
    const ChartPoint q_ref = reference_end.get();
    std::vector<double> errs;
    for (auto& f : runs) errs.push_back((f.get() - q_ref).norm());

    const double floor = 1e-12 * (1.0 + q_ref.lpNorm<Eigen::Infinity>());
    std::vector<std::string> orders{"-"};
    json jorders = json::array();
    for (std::size_t i = 1; i < hs.size(); ++i) {
      if (errs[i - 1] <= floor || errs[i] <= floor) {
        orders.push_back("n/a");
        jorders.push_back("n/a");
      } else {
        const double p = std::log(errs[i - 1] / errs[i]) / std::log(hs[i - 1] / hs[i]);
        orders.push_back(format_real(p));
        jorders.push_back(p);
      }
    }

    Sink table_sink(cfg.get_string("output", "-"), out);
    std::ostream& os = table_sink.get();
    os << "h,steps,error,order\n";
    for (std::size_t i = 0; i < hs.size(); ++i)
      os << format_real(hs[i]) << ',' << std::lround(T / hs[i]) << ',' << format_real(errs[i]) << ','
         << orders[i] << '\n';

    json summary;
    summary["command"] = "convergence";
    summary["model"] = base.model.name;
    summary["method"] = base.method;
    if (base.method == "dla") summary["dla_constraint"] = base.dla_constraint;
    summary["t_final"] = T;
    summary["reference_h"] = h_ref;
    summary["h"] = hs;
    summary["error"] = errs;
    summary["order"] = jorders;
    summary["status"] = "ok";
    write_json(summary, summary_path(cfg), summary_stream(cfg, out, err));
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InadmissibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return is_numerical(e) ? kExitNumerical : kExitConfig;
  }
  return kExitOk;
}

int cmd_compare(const Config& cfg, std::ostream& out, std::ostream& err) {
  RunSpec base;
  std::vector<MethodToken> methods;
  try {
    check_keys(cfg, {"methods"}, "compare");
    if (cfg.has("method")) throw ConfigError("compare: use 'methods', not 'method'");
    Config c;
    for (const auto& [k, v] : cfg.values())
      if (k != "dla_constraint" && k != "methods") c.set(k, v);
    base = resolve_run_spec(c);
    if (base.controls) throw ConfigError("compare: control forces are not supported");
    const std::string dc = cfg.get_string("dla_constraint", "midpoint");
    auto toks = cfg.get_list("methods");
    if (toks.empty()) toks = {"gni", "dla"};
    for (const auto& t : toks) methods.push_back(parse_method_token(t, dc));
    for (const auto& mt : methods)
      if (mt.method == "rattle" && !base.model.system.constant_metric)
        throw ConfigError("rattle requires a constant mass matrix");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const std::string prefix = cfg.get_string("output");
  json summary;
  summary["command"] = "compare";
  summary["model"] = base.model.name;
  summary["h"] = base.h;
  summary["steps"] = base.steps;
  summary["reference_h"] = base.h / base.ref_refine;
  int status = kExitOk;
  try {
    RunSpec ref_spec = base;
    ref_spec.method = "reference";
    auto ref_future = std::async(std::launch::async, [ref_spec] { return execute(ref_spec); });
    std::vector<std::future<TrajectoryRecord>> futures;
    for (const auto& mt : methods) {
      const RunSpec spec = with_method(base, mt);
      futures.push_back(std::async(std::launch::async, [spec] { return execute(spec); }));
    }
    const TrajectoryRecord ref = ref_future.get();

    json per = json::object();
    std::vector<std::vector<double>> errors;
    std::vector<TrajectoryRecord> recs;
    for (std::size_t i = 0; i < methods.size(); ++i) {
      recs.push_back(futures[i].get());
      const auto& rec = recs.back();
      std::vector<double> e;
      double sq = 0.0, mx = 0.0;
      for (std::size_t k = 0; k < rec.rows.size() && k < ref.rows.size(); ++k) {
        const double d = (rec.rows[k].q - ref.rows[k].q).norm();
        e.push_back(d);
        sq += d * d;
        mx = std::max(mx, d);
      }
      const double rms = e.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(e.size()));
      json j = stats_json(rec, base.model);
      j["rms_error"] = rms;
      j["max_error"] = mx;
      j["final_error"] = e.empty() ? 0.0 : e.back();
      per[methods[i].label] = j;
      errors.push_back(std::move(e));
    }
    summary["reference"] = stats_json(ref, base.model);
    summary["methods"] = per;

    if (!prefix.empty() && prefix != "-") {
      auto dump = [&](const TrajectoryRecord& rec, const std::string& label) {
        Sink s(prefix + "." + label + ".csv", out);
        CsvWriter w(s.get(), rec.n, rec.m);
        w.header();
        for (const auto& r : rec.rows) w.row(r);
      };
      dump(ref, "reference");
      for (std::size_t i = 0; i < methods.size(); ++i) dump(recs[i], methods[i].label);
      Sink s(prefix + ".errors.csv", out);
      std::ostream& os = s.get();
      os << "t";
      for (const auto& mt : methods) os << ",error_" << mt.label;
      os << '\n';
      for (std::size_t k = 0; k < ref.rows.size(); ++k) {
        os << format_real(ref.rows[k].t);
        for (const auto& e : errors) os << ',' << (k < e.size() ? format_real(e[k]) : "");
        os << '\n';
      }
    }
    summary["status"] = "ok";
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InadmissibleError& e) {
    err << "error: " << e.what() << '\n';
    summary["status"] = "failed";
    summary["error"] = e.what();
    status = kExitConfig;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    summary["status"] = "failed";
    summary["error"] = e.what();
    status = is_numerical(e) ? kExitNumerical : kExitConfig;
  }
  try {
    write_json(summary, summary_path(cfg), out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return status;
}

int cmd_list_models(const Config& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.values().empty()) {
    err << "error: list-models takes no options\n";
    return kExitConfig;
  }
  for (const auto& name : model_names()) {
    const auto md = make_model(name);
    out << name << "  n=" << md.system.n << " m=" << md.system.m << "  " << md.description << '\n';
    out << "    params:";
    for (const auto& [k, v] : default_params(name)) out << ' ' << k << '=' << format_real(v);
    out << "\n    sections:";
    if (md.sections.empty()) out << " none";
    for (const auto& s : md.sections) out << ' ' << s.name;
    out << "\n    default h=" << format_real(md.defaults.h) << (md.supports_force ? "  force: yes" : "")
        << '\n';
  }
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Invocation inv;
  try {
    if (!args.empty() && (args[0] == "--help" || args[0] == "-h" || args[0] == "help")) {
      out << "usage: gni <run|convergence|compare|list-models> [--config file] [--key value ...]\n";
      return kExitOk;
    }
    inv = parse_command_line(args);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    if (inv.subcommand == "run") return cmd_run(inv.config, out, err);
    if (inv.subcommand == "convergence") return cmd_convergence(inv.config, out, err);
    if (inv.subcommand == "compare") return cmd_compare(inv.config, out, err);
    if (inv.subcommand == "list-models") return cmd_list_models(inv.config, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  err << "error: unknown subcommand '" << inv.subcommand << "'\n";
  return kExitConfig;
}

}  // namespace gni::cli
