#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "growepi/model.hpp"

namespace growepi {

/// Why a simulation run stopped.
enum class Terminal {
  ReachedTmax,
  EpidemicExtinct,    // no exposed or infectious individuals left
  PopulationExtinct,  // N == 0
  EventCapHit,
  OutbreakEstablished,  // infected count reached the configured threshold
};

std::string_view to_string(Terminal terminal) noexcept;
Terminal terminal_from_string(std::string_view name);

struct SimConfig {
  ModelParams params;
  PopulationState initial;
  double t_max = 10.0;
  std::uint64_t max_events = 4'000'000'000ULL;
  std::uint64_t seed = 0;
  /// Strictly increasing sampling times in (0, t_max]. Empty means only the
  /// initial and terminal states are recorded.
  std::vector<double> sample_grid;
  /// Stop as soon as e + i hits 0 (only if the run started with e + i > 0).
  bool stop_when_epidemic_extinct = true;
  /// Stop once e + i reaches this count. The outcome "not a minor outbreak"
  /// is then settled up to a probability of order q^threshold, q being the
  /// minor-outbreak probability.
  std::optional<std::int64_t> established_threshold;
};

void validate(const SimConfig& config);

/// Times step, 2 step, ... up to and including t_max (within rounding).
std::vector<double> uniform_grid(double step, double t_max);

/// Config for a single outbreak seeded per initial_state(params).
SimConfig make_sim_config(const ModelParams& params, double t_max,
                          std::uint64_t seed, double grid_step);

struct Sample {
  double t = 0;
  PopulationState state;
};

struct Trajectory {
  std::vector<Sample> samples;
  Terminal terminal = Terminal::ReachedTmax;
  std::uint64_t event_count = 0;

  [[nodiscard]] const Sample& final() const { return samples.back(); }
  /// State at time t (piecewise constant between samples); t must lie
  /// within the sampled range.
  [[nodiscard]] const PopulationState& state_at(double t) const;
};

/// Direct-method Gillespie simulation of the SIR or SEIR chain. The state at
/// a grid time is the state after the last jump at or before it. A given
/// (config, seed) always reproduces the same trajectory bit for bit.
Trajectory simulate_epidemic(const SimConfig& config);

struct AgeSample {
  /// Ages (t_max minus birth time) of everyone alive at t_max.
  std::vector<double> ages;
  /// Restarts after the population died out.
  std::uint32_t retries = 0;
  std::uint64_t event_count = 0;
};

/// Individual-level linear birth-death simulation that keeps birth times.
/// Founders are born at time 0. Requires the epidemic to be inactive
/// (gamma == 0 or no infected individuals). Runs that go extinct are
/// restarted from the founders, at most max_retries times. t_max may be 0.
AgeSample simulate_population_with_ages(const SimConfig& config,
                                        std::uint32_t max_retries = 10'000);

struct CoupledSample {
  double t = 0;
  std::int64_t i_lower = 0;
  std::int64_t i_epidemic = 0;
  std::int64_t i_upper = 0;
  double s_over_n = 1;
  bool after_breakdown = false;
};

struct CoupledTrajectory {
  std::vector<CoupledSample> samples;
  /// First time S/N dropped below 1 - eps0. The lower process is frozen
  /// from then on.
  std::optional<double> breakdown_time;
  double eps0 = 0;
  Terminal terminal = Terminal::ReachedTmax;
  std::uint64_t event_count = 0;
  bool lower_extinct = false;
  bool epidemic_extinct = false;
  bool upper_extinct = false;
  PopulationState final_state;
  std::int64_t ghosts = 0;
};

/// Joint realisation of the SIR epidemic with the two linear birth-death
/// processes that bound its infective count.
///
/// Upper process: epidemic infectives plus "ghosts", birth rate gamma and
/// death rate delta + mu per member. Lower process: a marked subset of the
/// epidemic infectives with birth rate gamma (1 - eps0) and the same death
/// rate. Each contact made by an infective draws one uniform U:
///   - marked contactor and U < 1 - eps0: new marked infective;
///   - otherwise U < S/N: new unmarked infective;
///   - otherwise: new ghost.
/// While S/N >= 1 - eps0 this gives i_lower <= i_epidemic <= i_upper pathwise.
///
/// With a settle threshold K the run stops once every process has either
/// died out or reached K (the lower and epidemic ones may instead have
/// passed breakdown). The terminal is then OutbreakEstablished, or
/// EpidemicExtinct when the upper process died out.
///
/// SIR only; throws ValidationError for SEIR parameters.
CoupledTrajectory simulate_coupled_sandwich(
    const SimConfig& config, double eps0,
    std::optional<std::int64_t> settle_threshold = std::nullopt);

enum class GrowthSeries { Infectious, Total };

/// Least-squares slope of log(series) against t over the samples with
/// t in [window.first, window.second]. Throws ExtinctWindowError if the
/// series is 0 anywhere in the window and ValidationError for fewer than
/// two samples.
double estimate_growth_rate(const Trajectory& trajectory,
                            std::pair<double, double> window,
                            GrowthSeries series = GrowthSeries::Infectious);

}  // namespace growepi
