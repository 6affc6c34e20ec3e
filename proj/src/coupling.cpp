#include <array>
#include <limits>

#include "growepi/error.hpp"
#include "growepi/rng.hpp"
#include "growepi/ssa.hpp"

namespace growepi {

namespace {

enum Channel : std::size_t {
  kContact,
  kRemoval,
  kGhostBirth,
  kGhostDeath,
  kBirth,
  kDeathS,
  kDeathR,
  kChannelCount,
};

}  // namespace

CoupledTrajectory simulate_coupled_sandwich(
    const SimConfig& config, double eps0,
    std::optional<std::int64_t> settle_threshold) {
  validate(config);
  const ModelParams& p = config.params;
  if (p.is_seir()) {
    throw ValidationError("the sandwich coupling is defined for SIR only");
  }
  if (!(eps0 > 0 && eps0 < 1)) throw ValidationError("eps0 must be in (0,1)");
  if (config.initial.i < 1) {
    throw ValidationError("coupling needs at least one initial infective");
  }
  if (settle_threshold && *settle_threshold < 1) {
    throw ValidationError("settle threshold must be >= 1");
  }

  Rng rng(config.seed);
  const double keep = 1.0 - eps0;
  const double removal_rate = p.delta + p.mu;
  const double recover_share = p.delta / removal_rate;
  const std::int64_t settle =
      settle_threshold.value_or(std::numeric_limits<std::int64_t>::max());

  std::int64_t s = config.initial.s;
  std::int64_t i = config.initial.i;
  std::int64_t r = config.initial.r;
  std::int64_t lower = i;
  std::int64_t ghosts = 0;
  bool broken = false;

  CoupledTrajectory out;
  out.eps0 = eps0;
  double t = 0.0;

  auto s_over_n = [&]() {
    const std::int64_t n = s + i + r;
    return n > 0 ? static_cast<double>(s) / static_cast<double>(n) : 1.0;
  };
  auto check_breakdown = [&]() {
    if (!broken && s_over_n() < keep) {
      broken = true;
      out.breakdown_time = t;
    }
  };
  auto snapshot = [&](double at) {
    return CoupledSample{at, lower, i, i + ghosts, s_over_n(), broken};
  };
  auto settled = [&]() {
    const std::int64_t upper = i + ghosts;
    return (upper == 0 || upper >= settle) &&
           (lower == 0 || lower >= settle || broken) &&
           (i == 0 || i >= settle || broken);
  };

  check_breakdown();
  out.samples.reserve(config.sample_grid.size() + 2);
  out.samples.push_back(snapshot(0.0));
  std::size_t next_grid = 0;
  const auto& grid = config.sample_grid;

  Terminal terminal = Terminal::ReachedTmax;
  std::uint64_t events = 0;
  while (true) {
    if (i + ghosts == 0) {
      terminal = Terminal::EpidemicExtinct;
      break;
    }
    if (settle_threshold && settled()) {
      terminal = Terminal::OutbreakEstablished;
      break;
    }
    if (events >= config.max_events) {
      terminal = Terminal::EventCapHit;
      break;
    }
    const double n = static_cast<double>(s + i + r);
    const double di = static_cast<double>(i);
    const double dg = static_cast<double>(ghosts);
    const std::array<double, kChannelCount> rates{
        p.gamma * di,       removal_rate * di,         p.gamma * dg,
        removal_rate * dg,  p.lambda * n,              p.mu * static_cast<double>(s),
        p.mu * static_cast<double>(r)};
    double total = 0.0;
    for (double v : rates) total += v;

    const double t_next = t + rng.exponential(total);
    if (t_next > config.t_max) {
      while (next_grid < grid.size() && grid[next_grid] <= config.t_max) {
        out.samples.push_back(snapshot(grid[next_grid++]));
      }
      t = config.t_max;
      terminal = Terminal::ReachedTmax;
      break;
    }
    while (next_grid < grid.size() && grid[next_grid] < t_next) {
      out.samples.push_back(snapshot(grid[next_grid++]));
    }

    double pick = rng.uniform() * total;
    std::size_t channel = kChannelCount;
    for (std::size_t k = 0; k < kChannelCount; ++k) {
      if (rates[k] <= 0.0) continue;
      channel = k;
      if (pick < rates[k]) break;
      pick -= rates[k];
    }
    t = t_next;
    ++events;

    switch (channel) {
      case kContact: {
        const bool marked =
            !broken && rng.below(static_cast<std::uint64_t>(i)) <
                           static_cast<std::uint64_t>(lower);
        const double u = rng.uniform();
        if (marked && u < keep) {
          --s;
          ++i;
          ++lower;
        } else if (u < s_over_n()) {
          --s;
          ++i;
        } else {
          ++ghosts;
        }
        break;
      }
      case kRemoval: {
        if (!broken && rng.below(static_cast<std::uint64_t>(i)) <
                           static_cast<std::uint64_t>(lower)) {
          --lower;
          if (lower == 0) out.lower_extinct = true;
        }
        --i;
        if (rng.uniform() < recover_share) ++r;
        if (i == 0) out.epidemic_extinct = true;
        break;
      }
      case kGhostBirth: ++ghosts; break;
      case kGhostDeath: --ghosts; break;
      case kBirth: ++s; break;
      case kDeathS: --s; break;
      case kDeathR: --r; break;
      default: break;
    }
    check_breakdown();
  }

  if (t > out.samples.back().t) out.samples.push_back(snapshot(t));
  out.upper_extinct = (i + ghosts == 0);
  out.terminal = terminal;
  out.event_count = events;
  out.final_state = PopulationState{s, 0, i, r};
  out.ghosts = ghosts;
  return out;
}

}  // namespace growepi
