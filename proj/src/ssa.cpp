#include "growepi/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "growepi/error.hpp"
#include "growepi/rng.hpp"

namespace growepi {

std::string_view to_string(Terminal terminal) noexcept {
  switch (terminal) {
    case Terminal::ReachedTmax: return "ReachedTmax";
    case Terminal::EpidemicExtinct: return "EpidemicExtinct";
    case Terminal::PopulationExtinct: return "PopulationExtinct";
    case Terminal::EventCapHit: return "EventCapHit";
    case Terminal::OutbreakEstablished: return "OutbreakEstablished";
  }
  return "?";
}

Terminal terminal_from_string(std::string_view name) {
  for (auto t : {Terminal::ReachedTmax, Terminal::EpidemicExtinct,
                 Terminal::PopulationExtinct, Terminal::EventCapHit,
                 Terminal::OutbreakEstablished}) {
    if (to_string(t) == name) return t;
  }
  throw ValidationError("unknown terminal status '" + std::string(name) + "'");
}

void validate(const SimConfig& config) {
  validate(config.params);
  validate(config.initial);
  if (!config.params.is_seir() && config.initial.e != 0) {
    throw ValidationError("initial.e must be 0 for the SIR model");
  }
  if (!(config.t_max > 0) || !std::isfinite(config.t_max)) {
    throw ValidationError("t_max must be a positive finite time");
  }
  if (config.max_events == 0) throw ValidationError("max_events must be > 0");
  double previous = 0.0;
  for (double g : config.sample_grid) {
    if (!(g > previous)) {
      throw ValidationError("sample_grid must be strictly increasing in (0, t_max]");
    }
    previous = g;
  }
  if (!config.sample_grid.empty() && config.sample_grid.back() > config.t_max) {
    throw ValidationError("sample_grid extends beyond t_max");
  }
  if (config.established_threshold && *config.established_threshold < 1) {
    throw ValidationError("established_threshold must be >= 1");
  }
}

std::vector<double> uniform_grid(double step, double t_max) {
  if (!(step > 0)) throw ValidationError("grid step must be > 0");
  std::vector<double> grid;
  const auto count = static_cast<std::int64_t>(std::floor(t_max / step + 1e-9));
  grid.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  for (std::int64_t k = 1; k <= count; ++k) {
    grid.push_back(std::min(static_cast<double>(k) * step, t_max));
  }
  return grid;
}

SimConfig make_sim_config(const ModelParams& params, double t_max,
                          std::uint64_t seed, double grid_step) {
  SimConfig config;
  config.params = params;
  config.initial = initial_state(params);
  config.t_max = t_max;
  config.seed = seed;
  config.sample_grid = uniform_grid(grid_step, t_max);
  return config;
}

const PopulationState& Trajectory::state_at(double t) const {
  if (samples.empty() || t < samples.front().t) {
    throw ValidationError("time outside trajectory");
  }
  auto it = std::upper_bound(
      samples.begin(), samples.end(), t,
      [](double value, const Sample& s) { return value < s.t; });
  return std::prev(it)->state;
}

namespace {

// Records the piecewise-constant path on the sampling grid.
template <typename SampleT>
class GridRecorder {
 public:
  explicit GridRecorder(const std::vector<double>& grid) : grid_(grid) {}

  /// Emits every grid time strictly before `t`, holding `value`.
  template <typename Make>
  void advance_to(double t, std::vector<SampleT>& out, Make&& make) {
    while (next_ < grid_.size() && grid_[next_] < t) {
      out.push_back(make(grid_[next_]));
      ++next_;
    }
  }
  /// Emits every grid time at or before `t`.
  template <typename Make>
  void advance_through(double t, std::vector<SampleT>& out, Make&& make) {
    while (next_ < grid_.size() && grid_[next_] <= t) {
      out.push_back(make(grid_[next_]));
      ++next_;
    }
  }

 private:
  const std::vector<double>& grid_;
  std::size_t next_ = 0;
};

inline void apply_in_place(PopulationState& st, EventKind kind, bool seir) {
  switch (kind) {
    case EventKind::Birth: ++st.s; break;
    case EventKind::DeathS: --st.s; break;
    case EventKind::DeathE: --st.e; break;
    case EventKind::DeathI: --st.i; break;
    case EventKind::DeathR: --st.r; break;
    case EventKind::Infection:
      --st.s;
      if (seir) {
        ++st.e;
      } else {
        ++st.i;
      }
      break;
    case EventKind::BecomeInfectious: --st.e; ++st.i; break;
    case EventKind::Recovery: --st.i; ++st.r; break;
  }
}

}  // namespace

Trajectory simulate_epidemic(const SimConfig& config) {
  validate(config);
  const ModelParams& params = config.params;
  const bool seir = params.is_seir();
  Rng rng(config.seed);

  Trajectory traj;
  traj.samples.reserve(config.sample_grid.size() + 2);
  PopulationState state = config.initial;
  double t = 0.0;
  traj.samples.push_back({0.0, state});
  GridRecorder<Sample> recorder(config.sample_grid);
  auto hold = [&state](double g) { return Sample{g, state}; };

  const bool watch_extinction =
      config.stop_when_epidemic_extinct && state.infected() > 0;
  const std::int64_t threshold = config.established_threshold.value_or(
      std::numeric_limits<std::int64_t>::max());

  Terminal terminal = Terminal::ReachedTmax;
  std::uint64_t events = 0;
  if (state.total() == 0) {
    terminal = Terminal::PopulationExtinct;
  } else if (state.infected() >= threshold) {
    terminal = Terminal::OutbreakEstablished;
  } else {
    while (true) {
      if (events >= config.max_events) {
        terminal = Terminal::EventCapHit;
        break;
      }
      const EventRates rates = event_rates_unchecked(params, state);
      const auto& values = rates.values();
      double total = 0.0;
      for (double v : values) total += v;

      const double t_next = t + rng.exponential(total);
      if (t_next > config.t_max) {
        recorder.advance_through(config.t_max, traj.samples, hold);
        t = config.t_max;
        terminal = Terminal::ReachedTmax;
        break;
      }
      recorder.advance_to(t_next, traj.samples, hold);

      double pick = rng.uniform() * total;
      std::size_t chosen = kEventKindCount;
      for (std::size_t k = 0; k < kEventKindCount; ++k) {
        if (values[k] <= 0.0) continue;
        chosen = k;
        if (pick < values[k]) break;
        pick -= values[k];
      }
      apply_in_place(state, kAllEventKinds[chosen], seir);
      t = t_next;
      ++events;

      if (state.total() == 0) {
        terminal = Terminal::PopulationExtinct;
        break;
      }
      if (watch_extinction && state.infected() == 0) {
        terminal = Terminal::EpidemicExtinct;
        break;
      }
      if (state.infected() >= threshold) {
        terminal = Terminal::OutbreakEstablished;
        break;
      }
    }
  }

  if (t > traj.samples.back().t) traj.samples.push_back({t, state});
  traj.terminal = terminal;
  traj.event_count = events;
  return traj;
}

AgeSample simulate_population_with_ages(const SimConfig& config,
                                        std::uint32_t max_retries) {
  // t_max == 0 is allowed here and returns the founders
  SimConfig checked = config;
  if (checked.t_max == 0.0 && checked.sample_grid.empty()) checked.t_max = 1.0;
  validate(checked);
  const ModelParams& params = config.params;
  if (params.gamma != 0.0 && config.initial.infected() > 0) {
    throw ValidationError(
        "age tracking needs the epidemic switched off (gamma == 0 or no "
        "infected individuals)");
  }
  const std::int64_t founders = config.initial.total();
  if (founders < 1) throw ValidationError("need at least one founder");

  Rng rng(config.seed);
  AgeSample out;
  const double birth_share = params.lambda / (params.lambda + params.mu);
  std::vector<double> birth_times;

  while (true) {
    birth_times.assign(static_cast<std::size_t>(founders), 0.0);
    double t = 0.0;
    bool extinct = false;
    while (true) {
      if (out.event_count >= config.max_events) {
        throw Error("event cap hit while tracking ages");
      }
      const auto n = static_cast<double>(birth_times.size());
      const double t_next =
          t + rng.exponential((params.lambda + params.mu) * n);
      if (t_next > config.t_max) break;
      t = t_next;
      ++out.event_count;
      if (rng.uniform() < birth_share) {
        birth_times.push_back(t);
      } else {
        const auto victim = rng.below(birth_times.size());
        birth_times[victim] = birth_times.back();
        birth_times.pop_back();
        if (birth_times.empty()) {
          extinct = true;
          break;
        }
      }
    }
    if (!extinct) break;
    if (++out.retries > max_retries) {
      throw Error("population went extinct on every retry");
    }
  }

  out.ages.reserve(birth_times.size());
  for (double b : birth_times) out.ages.push_back(config.t_max - b);
  return out;
}

double estimate_growth_rate(const Trajectory& trajectory,
                            std::pair<double, double> window,
                            GrowthSeries series) {
  if (!(window.first < window.second)) {
    throw ValidationError("growth window must satisfy t_a < t_b");
  }
  auto value_of = [series](const PopulationState& st) {
    return series == GrowthSeries::Infectious ? st.i : st.total();
  };
  if (trajectory.samples.empty() ||
      trajectory.samples.back().t < window.second) {
    if (!trajectory.samples.empty() &&
        value_of(trajectory.samples.back().state) == 0) {
      throw ExtinctWindowError("series died out before the end of the window");
    }
    throw ValidationError("trajectory does not cover the growth window");
  }
  std::vector<std::pair<double, double>> points;
  for (const auto& sample : trajectory.samples) {
    if (sample.t < window.first || sample.t > window.second) continue;
    const std::int64_t value = value_of(sample.state);
    if (value <= 0) {
      throw ExtinctWindowError("series is zero inside the fit window at t=" +
                               std::to_string(sample.t));
    }
    points.emplace_back(sample.t, std::log(static_cast<double>(value)));
  }
  if (points.size() < 2) {
    throw ValidationError("growth window holds fewer than two samples");
  }
  double mean_t = 0, mean_y = 0;
  for (const auto& [t, y] : points) {
    mean_t += t;
    mean_y += y;
  }
  mean_t /= static_cast<double>(points.size());
  mean_y /= static_cast<double>(points.size());
  double sxx = 0, sxy = 0;
  for (const auto& [t, y] : points) {
    sxx += (t - mean_t) * (t - mean_t);
    sxy += (t - mean_t) * (y - mean_y);
  }
  return sxy / sxx;
}

}  // namespace growepi
