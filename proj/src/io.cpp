#include "growepi/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>

#include "growepi/error.hpp"

#ifndef GROWEPI_VERSION
#define GROWEPI_VERSION "0.0.0"
#endif

namespace growepi {

using nlohmann::json;

std::string_view tool_version() noexcept { return GROWEPI_VERSION; }

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::Theory: return "theory";
    case Command::Simulate: return "simulate";
    case Command::Couple: return "couple";
    case Command::Ode: return "ode";
    case Command::Ensemble: return "ensemble";
    case Command::Compare: return "compare";
  }
  return "?";
}

Command command_from_string(std::string_view name) {
  for (auto c : {Command::Theory, Command::Simulate, Command::Couple,
                 Command::Ode, Command::Ensemble, Command::Compare}) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("command: unknown command '" + std::string(name) + "'");
}

void validate(const RunSpec& spec) {
  validate_growing(spec.params);
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw ValidationError(std::string(name) + " must be a positive number");
    }
  };
  positive(spec.t_max, "t_max");
  positive(spec.dt, "dt");
  positive(spec.grid_step, "grid_step");
  if (!(spec.eps0 > 0 && spec.eps0 < 1)) throw ValidationError("eps0 must be in (0,1)");
  if (!(spec.eps1 >= 0 && spec.eps2 >= 0 && spec.eps1 + spec.eps2 < 1)) {
    throw ValidationError("eps1, eps2 must be >= 0 with eps1 + eps2 < 1");
  }
  if (spec.replicates < 1) throw ValidationError("replicates must be >= 1");
  if (spec.max_events < 1) throw ValidationError("max_events must be >= 1");
  if (spec.horizon && !(*spec.horizon > 0 && *spec.horizon <= spec.t_max)) {
    throw ValidationError("horizon must lie in (0, t_max]");
  }
  if (spec.threshold && *spec.threshold < 1) {
    throw ValidationError("threshold must be >= 1");
  }
  if (spec.z0) {
    double sum = 0;
    for (double v : *spec.z0) {
      if (v < 0) throw ValidationError("z0 entries must be nonnegative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("z0 must sum to 1");
    if (!spec.params.is_seir() && (*spec.z0)[1] != 0) {
      throw ValidationError("z0: exposed share must be 0 for SIR");
    }
  }
  if (spec.start_at_endemic && !endemic_equilibrium(spec.params)) {
    throw ValidationError(
        "start_at_endemic: no endemic equilibrium (needs alpha > lambda - mu)");
  }
  if (spec.command == Command::Couple && spec.params.is_seir()) {
    throw ValidationError("nu: the couple command supports SIR only");
  }
}

json to_json(const RunSpec& spec) {
  json j;
  j["command"] = std::string(to_string(spec.command));
  j["lambda"] = spec.params.lambda;
  j["mu"] = spec.params.mu;
  j["gamma"] = spec.params.gamma;
  j["delta"] = spec.params.delta;
  if (spec.params.nu) j["nu"] = *spec.params.nu;
  j["n0"] = spec.params.n0;
  j["seed"] = spec.seed;
  j["t_max"] = spec.t_max;
  j["dt"] = spec.dt;
  j["eps0"] = spec.eps0;
  j["eps1"] = spec.eps1;
  j["eps2"] = spec.eps2;
  j["replicates"] = spec.replicates;
  j["grid_step"] = spec.grid_step;
  j["max_events"] = spec.max_events;
  if (spec.horizon) j["horizon"] = *spec.horizon;
  if (spec.threshold) j["threshold"] = *spec.threshold;
  j["workers"] = spec.workers;
  if (spec.z0) j["z0"] = *spec.z0;
  j["start_at_endemic"] = spec.start_at_endemic;
  j["out"] = spec.out;
  return j;
}

namespace {

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(key) + ": " + e.what());
  }
}

template <typename T>
void read_optional(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = field<T>(j, key);
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = field<T>(j, key);
}

}  // namespace

RunSpec run_spec_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  static const std::set<std::string> known{
      "command", "lambda", "mu",        "gamma",      "delta",     "nu",
      "n0",      "seed",   "t_max",     "dt",         "eps0",      "eps1",
      "eps2",    "replicates", "grid_step", "max_events", "horizon", "threshold",
      "workers", "z0",     "start_at_endemic", "out"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw ValidationError(key + ": unknown configuration field");
    }
  }
  RunSpec spec;
  if (j.contains("command")) {
    spec.command = command_from_string(field<std::string>(j, "command"));
  }
  for (const char* key : {"lambda", "mu", "gamma", "delta", "n0"}) {
    if (!j.contains(key)) {
      throw ValidationError(std::string(key) + ": required field missing");
    }
  }
  spec.params.lambda = field<double>(j, "lambda");
  spec.params.mu = field<double>(j, "mu");
  spec.params.gamma = field<double>(j, "gamma");
  spec.params.delta = field<double>(j, "delta");
  read_optional(j, "nu", spec.params.nu);
  spec.params.n0 = field<std::int64_t>(j, "n0");
  read_optional(j, "seed", spec.seed);
  read_optional(j, "t_max", spec.t_max);
  read_optional(j, "dt", spec.dt);
  read_optional(j, "eps0", spec.eps0);
  read_optional(j, "eps1", spec.eps1);
  read_optional(j, "eps2", spec.eps2);
  read_optional(j, "replicates", spec.replicates);
  read_optional(j, "grid_step", spec.grid_step);
  read_optional(j, "max_events", spec.max_events);
  read_optional(j, "horizon", spec.horizon);
  read_optional(j, "threshold", spec.threshold);
  read_optional(j, "workers", spec.workers);
  read_optional(j, "z0", spec.z0);
  read_optional(j, "start_at_endemic", spec.start_at_endemic);
  read_optional(j, "out", spec.out);
  return spec;
}

RunSpec parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config: " + path.string() + ": " + e.what());
  }
  if (j.is_object() && j.contains("run_spec")) return run_spec_from_json(j.at("run_spec"));
  return run_spec_from_json(j);
}

std::filesystem::path resolve_output_dir(const RunSpec& spec) {
  if (!spec.out.empty()) return spec.out;
  const char* root = std::getenv(kOutputRootEnv);
  const std::filesystem::path base = (root && *root) ? root : "growepi-out";
  return base / std::string(to_string(spec.command));
}

json to_json(const TheorySummary& s) {
  json j;
  j["variant"] = s.variant == Variant::SEIR ? "SEIR" : "SIR";
  j["r0"] = s.r0;
  j["alpha"] = s.alpha;
  j["pop_growth"] = s.pop_growth;
  j["minor_outbreak_prob"] = s.minor_outbreak_prob;
  j["scenario"] = std::string(to_string(s.scenario));
  j["endemic"] = s.endemic ? json(*s.endemic) : json(nullptr);
  j["perfect_coupling_hint"] = s.perfect_coupling_hint;
  if (s.breakdown) {
    j["breakdown"] = {{"eps0", s.breakdown->eps0},
                      {"n", s.breakdown->n},
                      {"t_n", s.breakdown->time},
                      {"i_at_tn", s.breakdown->infectives},
                      {"exponent", s.breakdown->exponent}};
  } else {
    j["breakdown"] = nullptr;
  }
  return j;
}

namespace {

std::string fmt_time(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", t);
  return buf;
}

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "t,S,E,I,R,N\n";
  for (const auto& sample : trajectory.samples) {
    const auto& st = sample.state;
    os << fmt_time(sample.t) << ',' << st.s << ',' << st.e << ',' << st.i << ','
       << st.r << ',' << st.total() << '\n';
  }
}

void write_coupled_csv(std::ostream& os, const CoupledTrajectory& coupled) {
  os << "t,I_lower,I,I_upper,S_over_N,breakdown_flag\n";
  for (const auto& s : coupled.samples) {
    os << fmt_time(s.t) << ',' << s.i_lower << ',' << s.i_epidemic << ','
       << s.i_upper << ',' << fmt_real(s.s_over_n) << ','
       << (s.after_breakdown ? 1 : 0) << '\n';
  }
}

void write_ode_csv(std::ostream& os, const OdeSolution& solution) {
  os << "t,S,E,I,R,N\n";
  for (std::size_t k = 0; k < solution.grid.size(); ++k) {
    const auto& z = solution.states[k];
    os << fmt_time(solution.grid[k]) << ',' << fmt_real(z.s) << ','
       << fmt_real(z.e) << ',' << fmt_real(z.i) << ',' << fmt_real(z.r) << ','
       << fmt_real(z.sum()) << '\n';
  }
}

void write_replicates_csv(std::ostream& os, const EnsembleStats& stats) {
  os << "replicate,seed,terminal,minor_outbreak,end_time,events,S,E,I,R,N,"
        "growth_rate\n";
  for (const auto& o : stats.outcomes) {
    const auto& st = o.final_state;
    os << o.index << ',' << o.seed << ',' << to_string(o.terminal) << ','
       << (o.minor_outbreak ? 1 : 0) << ',' << fmt_time(o.end_time) << ','
       << o.event_count << ',' << st.s << ',' << st.e << ',' << st.i << ','
       << st.r << ',' << st.total() << ','
       << (o.growth_rate ? fmt_real(*o.growth_rate) : std::string()) << '\n';
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  return os;
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto os = open_output(path);
  os << j.dump(2) << '\n';
  if (!os) throw Error("failed writing '" + path.string() + "'");
}

json mean_se_json(const stats::MeanSe& m) {
  return {{"mean", m.mean}, {"se", m.se}, {"count", m.count}};
}

ScaledState start_point(const RunSpec& spec) {
  if (spec.start_at_endemic) return ScaledState::from(*endemic_equilibrium(spec.params));
  if (spec.z0) {
    const auto& z = *spec.z0;
    return {z[0], z[1], z[2], z[3]};
  }
  return default_start(spec.eps1, spec.eps2);
}

IntegrateOptions ode_options(const RunSpec& spec) {
  IntegrateOptions options;
  options.dt = spec.dt;
  options.grid = uniform_grid(spec.grid_step, spec.t_max);
  return options;
}

}  // namespace

std::filesystem::path execute(RunSpec spec) {
  validate(spec);
  const auto dir = resolve_output_dir(spec);
  spec.out = dir.string();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());

  json summary;
  summary["tool"] = {{"name", std::string(kToolName)},
                     {"version", std::string(tool_version())}};
  summary["command"] = std::string(to_string(spec.command));
  summary["run_spec"] = to_json(spec);
  summary["theory"] = to_json(summarize(spec.params, spec.eps0));

  json result;
  switch (spec.command) {
    case Command::Theory: break;

    case Command::Simulate: {
      SimConfig config = make_sim_config(spec.params, spec.t_max, spec.seed,
                                         spec.grid_step);
      config.max_events = spec.max_events;
      config.established_threshold = spec.threshold;
      const auto traj = simulate_epidemic(config);
      auto os = open_output(dir / "trajectory.csv");
      write_trajectory_csv(os, traj);
      result["terminal"] = std::string(to_string(traj.terminal));
      result["event_count"] = traj.event_count;
      result["end_time"] = traj.final().t;
      result["seed"] = spec.seed;
      break;
    }

    case Command::Couple: {
      SimConfig config = make_sim_config(spec.params, spec.t_max, spec.seed,
                                         spec.grid_step);
      config.max_events = spec.max_events;
      const auto coupled =
          simulate_coupled_sandwich(config, spec.eps0, spec.threshold);
      auto os = open_output(dir / "coupled.csv");
      write_coupled_csv(os, coupled);
      result["terminal"] = std::string(to_string(coupled.terminal));
      result["event_count"] = coupled.event_count;
      result["seed"] = spec.seed;
      result["eps0"] = coupled.eps0;
      result["breakdown_time"] =
          coupled.breakdown_time ? json(*coupled.breakdown_time) : json(nullptr);
      result["lower_frozen_after_breakdown"] = coupled.breakdown_time.has_value();
      result["lower_extinct"] = coupled.lower_extinct;
      result["epidemic_extinct"] = coupled.epidemic_extinct;
      result["upper_extinct"] = coupled.upper_extinct;
      break;
    }

    case Command::Ode: {
      const auto solution =
          integrate(spec.params, start_point(spec), spec.t_max, ode_options(spec));
      auto os = open_output(dir / "ode.csv");
      write_ode_csv(os, solution);
      if (solution.converged_to) {
        result["converged_to"] = {
            {"equilibrium", std::string(to_string(solution.converged_to->equilibrium))},
            {"hit_time", solution.converged_to->hit_time}};
      } else {
        result["converged_to"] = nullptr;
      }
      break;
    }

    case Command::Ensemble: {
      EnsembleConfig config;
      config.sim = make_sim_config(spec.params, spec.t_max, spec.seed,
                                   spec.grid_step);
      config.sim.max_events = spec.max_events;
      config.sim.established_threshold = spec.threshold;
      config.replicates = spec.replicates;
      config.extinction_horizon = spec.horizon.value_or(spec.t_max);
      config.parallelism = spec.workers;
      const auto stats = run_ensemble(config);
      auto os = open_output(dir / "replicates.csv");
      write_replicates_csv(os, stats);
      result["master_seed"] = spec.seed;
      result["replicates"] = stats.replicates;
      result["minor_outbreaks"] = stats.minor_outbreaks;
      result["extinction_freq"] = stats.extinction_freq;
      result["extinction_ci95"] = {stats.extinction_ci.lo, stats.extinction_ci.hi};
      result["mean_growth_rate"] =
          stats.growth_rate ? mean_se_json(*stats.growth_rate) : json(nullptr);
      result["ensemble_growth_rate"] =
          stats.ensemble_growth_rate ? json(*stats.ensemble_growth_rate) : json(nullptr);
      break;
    }

    case Command::Compare: {
      const ScaledState z0 = start_point(spec);
      SimConfig config;
      config.params = spec.params;
      config.initial = round_counts(z0, spec.params.n0);
      config.t_max = spec.t_max;
      config.seed = spec.seed;
      config.max_events = spec.max_events;
      config.sample_grid = uniform_grid(spec.grid_step, spec.t_max);
      config.stop_when_epidemic_extinct = false;
      const auto traj = simulate_epidemic(config);
      IntegrateOptions options = ode_options(spec);
      options.grid = config.sample_grid;
      const auto solution = integrate(spec.params, z0, spec.t_max, options);
      const auto path = scaled_deviation_path(spec.params, traj, solution);
      auto os = open_output(dir / "compare.csv");
      os << "t,deviation\n";
      double worst = 0;
      for (std::size_t k = 0; k < path.size(); ++k) {
        os << fmt_time(solution.grid[k]) << ',' << fmt_real(path[k]) << '\n';
        worst = std::max(worst, path[k]);
      }
      auto tos = open_output(dir / "trajectory.csv");
      write_trajectory_csv(tos, traj);
      auto oos = open_output(dir / "ode.csv");
      write_ode_csv(oos, solution);
      result["sup_deviation"] = worst;
      result["terminal"] = std::string(to_string(traj.terminal));
      result["seed"] = spec.seed;
      break;
    }
  }
  summary["result"] = result;
  write_json(dir / "summary.json", summary);
  return dir;
}

}  // namespace growepi
