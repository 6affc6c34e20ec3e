#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "growepi/model.hpp"
#include "growepi/ssa.hpp"
#include "growepi/stats.hpp"
#include "growepi/theory.hpp"

namespace growepi {

struct EnsembleConfig {
  /// Template for every replicate. Its seed is the master seed; replicate k
  /// runs with stream_seed(seed, k).
  SimConfig sim;
  std::uint32_t replicates = 1000;
  /// A replicate whose e + i hits 0 at or before this time is a minor
  /// outbreak.
  double extinction_horizon = 25.0;
  /// Time window for the endemic proportion averages.
  std::optional<std::pair<double, double>> endemic_window;
  /// Fit window for the growth rate; defaults to [0.3, 0.8] x horizon.
  std::optional<std::pair<double, double>> growth_window;
  GrowthSeries growth_series = GrowthSeries::Infectious;
  /// Times at which each replicate's state is kept (must be grid times).
  std::vector<double> checkpoints;
  /// Worker threads; 0 means one per hardware thread.
  unsigned parallelism = 0;
};

void validate(const EnsembleConfig& config);

struct ReplicateOutcome {
  std::uint32_t index = 0;
  std::uint64_t seed = 0;
  Terminal terminal = Terminal::ReachedTmax;
  std::uint64_t event_count = 0;
  double end_time = 0;
  PopulationState final_state;
  bool minor_outbreak = false;
  std::optional<double> growth_rate;
  /// (t, series value) at the grid samples inside the growth window; kept
  /// whenever growth_rate is.
  std::vector<std::pair<double, double>> growth_samples;
  /// Grid-sample averages of S/N, E/N, I/N, R/N over the endemic window.
  std::optional<Proportions> endemic_average;
  /// Parallel to EnsembleConfig::checkpoints; empty when not reached.
  std::vector<std::optional<PopulationState>> checkpoint_states;
};

struct EnsembleStats {
  std::uint32_t replicates = 0;
  std::uint64_t minor_outbreaks = 0;
  double extinction_freq = 0;
  stats::Interval extinction_ci;
  /// Mean and SE of the per-replicate log-slopes.
  std::optional<stats::MeanSe> growth_rate;
  /// Log-slope of the survivor-mean series over the growth window. Unlike
  /// the per-replicate mean it carries no log-of-small-counts bias.
  std::optional<double> ensemble_growth_rate;
  std::optional<std::array<stats::MeanSe, 4>> endemic_average;
  std::vector<ReplicateOutcome> outcomes;
};

/// Runs the replicates on a thread pool and reduces the outcomes in
/// replicate order, so the result depends only on the master seed.
/// A replicate failure is rethrown with its index attached.
EnsembleStats run_ensemble(const EnsembleConfig& config);

struct EndemicReport {
  EnsembleStats stats;
  Proportions equilibrium{};
  Proportions average{};
  /// |average - equilibrium| / equilibrium; ebar is skipped for SIR.
  Proportions rel_error{};
  double max_rel_error = 0;
  std::size_t survivors = 0;
};

/// Compares survivor time averages over the endemic window with the
/// fluid-limit equilibrium. Throws InsufficientSurvivorsError with fewer
/// than `min_survivors` surviving replicates.
EndemicReport endemic_level_check(const EnsembleConfig& config,
                                  std::size_t min_survivors = 30);

struct DiscriminationOptions {
  double significance = 0.01;
  /// Relative tolerance for "I/N near ihat" in the endemic ensemble.
  double near_tolerance = 0.10;
};

struct DiscriminationReport {
  // Subdominant ensemble (A), horizon hA.
  EnsembleStats stats_a;
  std::size_t survivors_a = 0;
  /// Survivors with I/N(hA) < I/N(hA/2).
  std::size_t decaying_a = 0;
  double p_decay = 1;
  /// Ensemble-mean I/N at hA/3, 2hA/3 and hA.
  std::array<double, 3> prevalence_trend_a{};
  bool trend_monotone_a = false;

  // Endemic ensemble (B), horizon hB.
  EnsembleStats stats_b;
  std::size_t survivors_b = 0;
  /// Survivors with I(hB) > I(hB/2).
  std::size_t growing_b = 0;
  double p_growth = 1;
  double prevalence_b = 0;
  double ihat_b = 0;
  double prevalence_rel_error_b = 0;

  DiscriminationOptions options;

  [[nodiscard]] bool contrast_shown() const noexcept {
    return p_decay < options.significance && p_growth < options.significance &&
           trend_monotone_a &&
           prevalence_rel_error_b <= options.near_tolerance;
  }
};

/// Contrasts a subdominant-growth ensemble (0 < alpha < lambda - mu) with an
/// endemic-capable one (alpha > lambda - mu) using one-sided sign tests.
/// Throws ValidationError if the scenarios do not match that order.
DiscriminationReport scenario_discrimination(
    EnsembleConfig config_a, EnsembleConfig config_b,
    const DiscriminationOptions& options = {});

}  // namespace growepi
