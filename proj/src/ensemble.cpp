#include "growepi/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "growepi/error.hpp"
#include "growepi/rng.hpp"

namespace growepi {

void validate(const EnsembleConfig& config) {
  validate(config.sim);
  if (config.replicates < 1) throw ValidationError("replicates must be >= 1");
  if (!(config.extinction_horizon > 0) ||
      config.extinction_horizon > config.sim.t_max) {
    throw ValidationError("extinction_horizon must lie in (0, t_max]");
  }
  auto check_window = [&](const std::pair<double, double>& w, const char* name) {
    if (!(w.first >= 0 && w.first < w.second && w.second <= config.sim.t_max)) {
      throw ValidationError(std::string(name) + " must satisfy 0 <= t_a < t_b <= t_max");
    }
  };
  if (config.endemic_window) check_window(*config.endemic_window, "endemic_window");
  if (config.growth_window) check_window(*config.growth_window, "growth_window");
  for (double c : config.checkpoints) {
    if (!(c >= 0 && c <= config.sim.t_max)) {
      throw ValidationError("checkpoints must lie in [0, t_max]");
    }
  }
}

namespace {

ReplicateOutcome run_replicate(const EnsembleConfig& config,
                               std::uint32_t index) {
  SimConfig sim = config.sim;
  sim.seed = stream_seed(config.sim.seed, index);
  const Trajectory traj = simulate_epidemic(sim);

  ReplicateOutcome out;
  out.index = index;
  out.seed = sim.seed;
  out.terminal = traj.terminal;
  out.event_count = traj.event_count;
  out.end_time = traj.final().t;
  out.final_state = traj.final().state;
  out.minor_outbreak = traj.terminal == Terminal::EpidemicExtinct &&
                       out.end_time <= config.extinction_horizon;

  const bool covers_horizon = !out.minor_outbreak;
  const auto growth_window = config.growth_window.value_or(std::pair{
      0.3 * config.extinction_horizon, 0.8 * config.extinction_horizon});
  if (covers_horizon && out.end_time >= growth_window.second) {
    try {
      out.growth_rate =
          estimate_growth_rate(traj, growth_window, config.growth_series);
      for (const auto& sample : traj.samples) {
        if (sample.t < growth_window.first || sample.t > growth_window.second) continue;
        const auto& st = sample.state;
        out.growth_samples.emplace_back(
            sample.t, static_cast<double>(config.growth_series == GrowthSeries::Infectious
                                              ? st.i
                                              : st.total()));
      }
    } catch (const ExtinctWindowError&) {
      // died inside the window: no growth rate for this replicate
    }
  }

  if (config.endemic_window && out.end_time >= config.endemic_window->second &&
      traj.final().state.infected() > 0) {
    const auto [ta, tb] = *config.endemic_window;
    Proportions sum{};
    std::size_t count = 0;
    for (const auto& sample : traj.samples) {
      if (sample.t < ta || sample.t > tb) continue;
      const double n = static_cast<double>(sample.state.total());
      if (n <= 0) continue;
      sum[0] += static_cast<double>(sample.state.s) / n;
      sum[1] += static_cast<double>(sample.state.e) / n;
      sum[2] += static_cast<double>(sample.state.i) / n;
      sum[3] += static_cast<double>(sample.state.r) / n;
      ++count;
    }
    if (count > 0) {
      for (auto& v : sum) v /= static_cast<double>(count);
      out.endemic_average = sum;
    }
  }

  out.checkpoint_states.reserve(config.checkpoints.size());
  for (double c : config.checkpoints) {
    if (c <= out.end_time) {
      out.checkpoint_states.emplace_back(traj.state_at(c));
    } else {
      out.checkpoint_states.emplace_back(std::nullopt);
    }
  }
  return out;
}

// Least-squares slope of log(mean series) against t. Every replicate with a
// growth rate has samples at the same grid times.
double survivor_mean_slope(const std::vector<ReplicateOutcome>& outcomes) {
  std::vector<std::pair<double, double>> sums;
  std::size_t count = 0;
  for (const auto& o : outcomes) {
    if (!o.growth_rate) continue;
    if (sums.empty()) {
      sums.assign(o.growth_samples.size(), {0.0, 0.0});
      for (std::size_t k = 0; k < sums.size(); ++k) sums[k].first = o.growth_samples[k].first;
    }
    if (o.growth_samples.size() != sums.size()) {
      throw Error("replicates disagree on the growth window samples");
    }
    for (std::size_t k = 0; k < sums.size(); ++k) sums[k].second += o.growth_samples[k].second;
    ++count;
  }
  double mean_t = 0, mean_y = 0;
  for (auto& [t, y] : sums) {
    y = std::log(y / static_cast<double>(count));
    mean_t += t;
    mean_y += y;
  }
  mean_t /= static_cast<double>(sums.size());
  mean_y /= static_cast<double>(sums.size());
  double sxx = 0, sxy = 0;
  for (const auto& [t, y] : sums) {
    sxx += (t - mean_t) * (t - mean_t);
    sxy += (t - mean_t) * (y - mean_y);
  }
  return sxy / sxx;
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& config) {
  validate(config);
  const std::uint32_t total = config.replicates;
  std::vector<ReplicateOutcome> outcomes(total);
  std::vector<std::exception_ptr> errors(total);

  unsigned workers = config.parallelism;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, total);

  std::atomic<std::uint32_t> next{0};
  auto work = [&]() {
    for (std::uint32_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
      try {
        outcomes[k] = run_replicate(config, k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::uint32_t k = 0; k < total; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const ValidationError& e) {
      throw ValidationError("replicate " + std::to_string(k) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error("replicate " + std::to_string(k) + ": " + e.what());
    }
  }

  EnsembleStats stats;
  stats.replicates = total;
  std::vector<double> rates;
  std::array<std::vector<double>, 4> endemic;
  for (const auto& o : outcomes) {
    if (o.minor_outbreak) ++stats.minor_outbreaks;
    if (o.growth_rate) rates.push_back(*o.growth_rate);
    if (o.endemic_average) {
      for (std::size_t c = 0; c < 4; ++c) endemic[c].push_back((*o.endemic_average)[c]);
    }
  }
  stats.extinction_freq =
      static_cast<double>(stats.minor_outbreaks) / static_cast<double>(total);
  stats.extinction_ci = stats::wilson_interval(stats.minor_outbreaks, total);
  if (!rates.empty()) {
    stats.growth_rate = stats::mean_se(rates);
    stats.ensemble_growth_rate = survivor_mean_slope(outcomes);
  }
  if (!endemic[0].empty()) {
    std::array<stats::MeanSe, 4> avg;
    for (std::size_t c = 0; c < 4; ++c) avg[c] = stats::mean_se(endemic[c]);
    stats.endemic_average = avg;
  }
  stats.outcomes = std::move(outcomes);
  return stats;
}

EndemicReport endemic_level_check(const EnsembleConfig& config,
                                  std::size_t min_survivors) {
  validate(config);
  if (!config.endemic_window) {
    throw ValidationError("endemic_level_check needs an endemic_window");
  }
  // Outbreaks that die out almost surely are still simulated so the caller
  // gets the survivor shortfall rather than a precondition error.
  const Scenario scenario = classify_scenario(config.sim.params);
  const bool dies_out = scenario == Scenario::AlwaysExtinct ||
                        scenario == Scenario::BoundaryCritical;
  if (scenario != Scenario::EndemicCapable && !dies_out) {
    throw ValidationError(
        "endemic_level_check needs alpha > lambda - mu (EndemicCapable)");
  }
  EndemicReport report;
  report.stats = run_ensemble(config);
  report.survivors =
      report.stats.endemic_average ? (*report.stats.endemic_average)[0].count : 0;
  if (report.survivors < min_survivors) {
    throw InsufficientSurvivorsError(
        "only " + std::to_string(report.survivors) +
        " replicates cover the endemic window; need " +
        std::to_string(min_survivors));
  }
  if (dies_out) {
    throw ValidationError(
        "endemic_level_check needs alpha > lambda - mu (EndemicCapable)");
  }
  report.equilibrium = *endemic_equilibrium(config.sim.params);
  const bool seir = config.sim.params.is_seir();
  for (std::size_t c = 0; c < 4; ++c) {
    report.average[c] = (*report.stats.endemic_average)[c].mean;
    if (c == 1 && !seir) continue;
    report.rel_error[c] =
        std::abs(report.average[c] - report.equilibrium[c]) / report.equilibrium[c];
    report.max_rel_error = std::max(report.max_rel_error, report.rel_error[c]);
  }
  return report;
}

namespace {

double prevalence(const PopulationState& st) {
  const auto n = st.total();
  return n > 0 ? static_cast<double>(st.i) / static_cast<double>(n) : 0.0;
}

void add_checkpoints(EnsembleConfig& config, std::initializer_list<double> times) {
  config.checkpoints.assign(times.begin(), times.end());
}

}  // namespace

DiscriminationReport scenario_discrimination(EnsembleConfig config_a,
                                             EnsembleConfig config_b,
                                             const DiscriminationOptions& options) {
  if (classify_scenario(config_a.sim.params) != Scenario::SubdominantGrowth) {
    throw ValidationError(
        "first ensemble must have 0 < alpha < lambda - mu (SubdominantGrowth)");
  }
  if (classify_scenario(config_b.sim.params) != Scenario::EndemicCapable) {
    throw ValidationError(
        "second ensemble must have alpha > lambda - mu (EndemicCapable)");
  }
  DiscriminationReport report;
  report.options = options;

  const double ha = config_a.extinction_horizon;
  add_checkpoints(config_a, {ha / 3.0, ha / 2.0, 2.0 * ha / 3.0, ha});
  report.stats_a = run_ensemble(config_a);
  std::array<double, 3> trend{};
  for (const auto& o : report.stats_a.outcomes) {
    const auto& cp = o.checkpoint_states;
    if (!cp[3] || cp[3]->i == 0) continue;
    ++report.survivors_a;
    if (prevalence(*cp[3]) < prevalence(*cp[1])) ++report.decaying_a;
    trend[0] += prevalence(*cp[0]);
    trend[1] += prevalence(*cp[2]);
    trend[2] += prevalence(*cp[3]);
  }
  if (report.survivors_a > 0) {
    for (auto& v : trend) v /= static_cast<double>(report.survivors_a);
    report.p_decay =
        stats::binomial_upper_tail(report.decaying_a, report.survivors_a);
  }
  report.prevalence_trend_a = trend;
  report.trend_monotone_a =
      report.survivors_a > 0 && trend[0] > trend[1] && trend[1] > trend[2];

  const double hb = config_b.extinction_horizon;
  add_checkpoints(config_b, {hb / 2.0, hb});
  report.stats_b = run_ensemble(config_b);
  double prev_sum = 0;
  for (const auto& o : report.stats_b.outcomes) {
    const auto& cp = o.checkpoint_states;
    if (!cp[1] || cp[1]->i == 0) continue;
    ++report.survivors_b;
    if (cp[0] && cp[1]->i > cp[0]->i) ++report.growing_b;
    prev_sum += prevalence(*cp[1]);
  }
  report.ihat_b = (*endemic_equilibrium(config_b.sim.params))[2];
  if (report.survivors_b > 0) {
    report.prevalence_b = prev_sum / static_cast<double>(report.survivors_b);
    report.p_growth =
        stats::binomial_upper_tail(report.growing_b, report.survivors_b);
    report.prevalence_rel_error_b =
        std::abs(report.prevalence_b - report.ihat_b) / report.ihat_b;
  } else {
    report.prevalence_rel_error_b = 1.0;
  }
  if (report.survivors_a == 0 || report.survivors_b == 0) {
    throw InsufficientSurvivorsError(
        "scenario discrimination needs survivors in both ensembles");
  }
  return report;
}

}  // namespace growepi
