#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "growepi/error.hpp"
#include "growepi/io.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<double> lambda, mu, gamma, delta, nu;
  std::optional<std::int64_t> n0;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_max, dt, eps0, eps1, eps2, grid_step, horizon;
  std::optional<std::int64_t> replicates, threshold, max_events;
  std::optional<unsigned> workers;
  std::vector<double> z0;
  bool start_endemic = false;
  std::string out;
};

void add_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "JSON run spec (or a previous summary.json)");
  cmd.add_option("--lambda", f.lambda, "per-capita birth rate");
  cmd.add_option("--mu", f.mu, "per-capita background death rate");
  cmd.add_option("--gamma", f.gamma, "per-capita contact rate");
  cmd.add_option("--delta", f.delta, "excess death rate of infectives");
  cmd.add_option("--nu", f.nu, "rate of leaving the latent stage (selects SEIR)");
  cmd.add_option("--n0", f.n0, "initial population size");
  cmd.add_option("--seed", f.seed, "RNG seed (master seed for ensembles)");
  cmd.add_option("--t-max", f.t_max, "time horizon");
  cmd.add_option("--dt", f.dt, "ODE step size");
  cmd.add_option("--eps0", f.eps0, "coupling breakdown level");
  cmd.add_option("--eps1", f.eps1, "initial infective share for the ODE");
  cmd.add_option("--eps2", f.eps2, "initial removed share for the ODE");
  cmd.add_option("--replicates", f.replicates, "ensemble size");
  cmd.add_option("--grid-step", f.grid_step, "output sampling step");
  cmd.add_option("--horizon", f.horizon, "extinction classification horizon");
  cmd.add_option("--threshold", f.threshold,
                 "stop once E+I reaches this (ensemble, simulate) or settle level (couple)");
  cmd.add_option("--workers", f.workers, "worker threads, 0 = hardware");
  cmd.add_option("--max-events", f.max_events, "event budget per run");
  cmd.add_option("--z0", f.z0, "initial proportions S E I R")->expected(4);
  cmd.add_flag("--start-endemic", f.start_endemic, "start the ODE at the endemic equilibrium");
  cmd.add_option("--out", f.out, "output directory");
}

template <typename T, typename U>
void apply(const std::optional<T>& flag, U& target) {
  if (flag) target = *flag;
}

growepi::RunSpec build_spec(growepi::Command command, const Flags& f) {
  growepi::RunSpec spec;
  if (!f.config.empty()) {
    spec = growepi::parse_config_file(f.config);
  } else {
    const char* missing = !f.lambda ? "lambda"
                          : !f.mu   ? "mu"
                          : !f.gamma ? "gamma"
                          : !f.delta ? "delta"
                          : !f.n0    ? "n0"
                                     : nullptr;
    if (missing) {
      throw growepi::ValidationError(std::string(missing) +
                                     ": required (pass --" + missing + " or --config)");
    }
  }
  spec.command = command;
  apply(f.lambda, spec.params.lambda);
  apply(f.mu, spec.params.mu);
  apply(f.gamma, spec.params.gamma);
  apply(f.delta, spec.params.delta);
  if (f.nu) spec.params.nu = *f.nu;
  apply(f.n0, spec.params.n0);
  apply(f.seed, spec.seed);
  apply(f.t_max, spec.t_max);
  apply(f.dt, spec.dt);
  apply(f.eps0, spec.eps0);
  apply(f.eps1, spec.eps1);
  apply(f.eps2, spec.eps2);
  apply(f.replicates, spec.replicates);
  apply(f.grid_step, spec.grid_step);
  apply(f.max_events, spec.max_events);
  if (f.horizon) spec.horizon = *f.horizon;
  if (f.threshold) spec.threshold = *f.threshold;
  apply(f.workers, spec.workers);
  if (!f.z0.empty()) spec.z0 = std::array<double, 4>{f.z0[0], f.z0[1], f.z0[2], f.z0[3]};
  if (f.start_endemic) spec.start_at_endemic = true;
  if (!f.out.empty()) spec.out = f.out;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growepi: SIR/SEIR epidemics in a growing population"};
  app.set_version_flag("--version", std::string(growepi::tool_version()));
  app.require_subcommand(1);

  Flags flags;
  std::vector<std::pair<CLI::App*, growepi::Command>> commands;
  const std::pair<const char*, const char*> names[] = {
      {"theory", "closed-form quantities and scenario"},
      {"simulate", "one exact stochastic trajectory"},
      {"couple", "coupled lower/epidemic/upper trajectories (SIR)"},
      {"ode", "integrate the limiting proportions"},
      {"ensemble", "replicate trajectories and summary statistics"},
      {"compare", "scaled stochastic path against the ODE"}};
  for (const auto& [name, help] : names) {
    auto* sub = app.add_subcommand(name, help);
    add_flags(*sub, flags);
    commands.emplace_back(sub, growepi::command_from_string(name));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    growepi::Command command = growepi::Command::Theory;
    for (const auto& [sub, cmd] : commands) {
      if (sub->parsed()) command = cmd;
    }
    const auto spec = build_spec(command, flags);
    const auto dir = growepi::execute(spec);
    if (command == growepi::Command::Theory) {
      std::ifstream in(dir / "summary.json");
      std::cout << in.rdbuf();
    } else {
      std::cout << dir.string() << '\n';
    }
    return 0;
  } catch (const growepi::ValidationError& e) {
    std::cerr << "growepi: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "growepi: error: " << e.what() << '\n';
    return 3;
  }
}
