#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "growepi/ensemble.hpp"
#include "growepi/model.hpp"
#include "growepi/ode.hpp"
#include "growepi/ssa.hpp"
#include "growepi/theory.hpp"

namespace growepi {

inline constexpr std::string_view kToolName = "growepi";
std::string_view tool_version() noexcept;

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "GROWEPI_OUTPUT_ROOT";

enum class Command { Theory, Simulate, Couple, Ode, Ensemble, Compare };
std::string_view to_string(Command command) noexcept;
Command command_from_string(std::string_view name);

/// Everything needed to replay one invocation.
struct RunSpec {
  Command command = Command::Theory;
  ModelParams params;
  std::uint64_t seed = 0;
  double t_max = 10.0;
  double dt = 1e-3;
  double eps0 = 0.05;
  double eps1 = 0.01;
  double eps2 = 0.01;
  std::uint32_t replicates = 1000;
  double grid_step = 0.1;
  std::uint64_t max_events = 4'000'000'000ULL;
  /// Minor-outbreak horizon for `ensemble`; defaults to t_max.
  std::optional<double> horizon;
  /// Stop a run once e + i reaches this count (simulate, ensemble) or once
  /// every coupled process is settled at this size (couple).
  std::optional<std::int64_t> threshold;
  /// Worker threads for `ensemble` (0: all hardware threads).
  unsigned workers = 0;
  /// ODE / compare starting proportions; absent means
  /// (1 - eps1 - eps2, 0, eps1, eps2).
  std::optional<std::array<double, 4>> z0;
  /// Start the ODE at the endemic equilibrium instead of z0.
  bool start_at_endemic = false;
  std::string out;

  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

/// Per-command validation. Throws ValidationError naming the field.
void validate(const RunSpec& spec);

nlohmann::json to_json(const RunSpec& spec);
/// Strict: unknown keys and wrong types are ValidationErrors.
RunSpec run_spec_from_json(const nlohmann::json& j);

/// Reads a RunSpec from a JSON file: either a bare spec or a summary.json
/// whose "run_spec" member holds one.
RunSpec parse_config_file(const std::filesystem::path& path);

/// Output directory for a spec: spec.out, else $GROWEPI_OUTPUT_ROOT/<command>,
/// else ./growepi-out/<command>.
std::filesystem::path resolve_output_dir(const RunSpec& spec);

nlohmann::json to_json(const TheorySummary& summary);

/// `t,S,E,I,R,N`, times with 9 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
/// `t,I_lower,I,I_upper,S_over_N,breakdown_flag`.
void write_coupled_csv(std::ostream& os, const CoupledTrajectory& coupled);
/// `t,S,E,I,R,N` with proportions; N is their sum.
void write_ode_csv(std::ostream& os, const OdeSolution& solution);
/// One row per replicate.
void write_replicates_csv(std::ostream& os, const EnsembleStats& stats);

/// Runs the command and writes its files into the output directory.
/// Returns the directory written.
std::filesystem::path execute(RunSpec spec);

}  // namespace growepi
