#include "doctest.h"

#include <cmath>
#include <numeric>

#include "growepi/error.hpp"
#include "growepi/rng.hpp"
#include "growepi/ssa.hpp"
#include "growepi/stats.hpp"

using namespace growepi;

namespace {

ModelParams sir(double gamma, std::int64_t n0 = 1000) {
  return {1.0, 0.5, gamma, 1.0, {}, n0};
}

SimConfig bare_config(const ModelParams& p, PopulationState initial, double t_max,
                      std::uint64_t seed) {
  SimConfig c;
  c.params = p;
  c.initial = initial;
  c.t_max = t_max;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("rng streams are fixed") {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) CHECK(a() == b());
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 5) == stream_seed(1, 5));
  Rng c(0);
  double lo = 1, hi = 0;
  for (int k = 0; k < 10000; ++k) {
    const double u = c.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    CHECK(c.below(7) < 7);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
}

TEST_CASE("config validation") {
  auto c = make_sim_config(sir(3), 10, 0, 0.1);
  CHECK_NOTHROW(validate(c));
  c.t_max = 0;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = make_sim_config(sir(3), 10, 0, 0.1);
  c.max_events = 0;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = make_sim_config(sir(3), 10, 0, 0.1);
  c.sample_grid = {1.0, 0.5};
  CHECK_THROWS_AS(validate(c), ValidationError);
  c.sample_grid = {1.0, 11.0};
  CHECK_THROWS_AS(validate(c), ValidationError);
  const auto grid = uniform_grid(0.1, 10);
  CHECK(grid.size() == 100);
  CHECK(grid.back() == 10.0);
}

TEST_CASE("trajectory invariants") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto traj = simulate_epidemic(make_sim_config(sir(3, 200), 5, seed, 0.1));
    REQUIRE(!traj.samples.empty());
    CHECK(traj.samples.front().t == 0.0);
    CHECK(traj.samples.front().state == initial_state(sir(3, 200)));
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
      CHECK(traj.samples[k].t > traj.samples[k - 1].t);
    }
    if (traj.terminal == Terminal::EpidemicExtinct) CHECK(traj.final().state.infected() == 0);
    if (traj.terminal == Terminal::ReachedTmax) CHECK(traj.final().t == 5.0);
  }
}

TEST_CASE("identical seeds give identical trajectories") {
  const auto c = make_sim_config(ModelParams{1.0, 0.5, 6.0, 1.0, 2.0, 500}, 6, 99, 0.1);
  const auto a = simulate_epidemic(c);
  const auto b = simulate_epidemic(c);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    CHECK(a.samples[k].t == b.samples[k].t);
    CHECK(a.samples[k].state == b.samples[k].state);
  }
  CHECK(a.event_count == b.event_count);
}

TEST_CASE("lone infective without susceptibles is eventually removed") {
  // births keep adding susceptibles, so the contact rate is kept below the
  // removal rate to make the end of the epidemic certain
  for (double gamma : {0.5, 1.9}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ModelParams p{1.0, 1.0, gamma, 1.0, {}, 1};
      const auto traj = simulate_epidemic(bare_config(p, {0, 0, 1, 0}, 100, seed));
      CHECK(traj.final().state.i == 0);
    }
  }
}

TEST_CASE("subcritical outbreaks always die out") {
  const auto p = sir(1.2, 1000);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto traj = simulate_epidemic(make_sim_config(p, 200, seed, 1.0));
    REQUIRE(traj.terminal == Terminal::EpidemicExtinct);
  }
}

TEST_CASE("mean population size grows like n exp((lambda - mu) t)") {
  ModelParams p{1.0, 0.5, 0.0, 1.0, {}, 100};
  for (double t : {1.0, 2.0, 3.0}) {
    std::vector<double> sizes;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      auto c = bare_config(p, {100, 0, 0, 0}, t, stream_seed(17, seed));
      sizes.push_back(static_cast<double>(simulate_epidemic(c).final().state.total()));
    }
    const auto m = stats::mean_se(sizes);
    CAPTURE(t);
    CHECK(std::abs(m.mean - 100 * std::exp(0.5 * t)) < 3 * m.se);
  }
}

TEST_CASE("removal time of a single infective is exponential") {
  ModelParams p{1.0, 0.5, 0.0, 1.0, {}, 11};
  std::vector<double> times;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    auto c = bare_config(p, {10, 0, 1, 0}, 1000, stream_seed(3, seed));
    const auto traj = simulate_epidemic(c);
    REQUIRE(traj.terminal == Terminal::EpidemicExtinct);
    times.push_back(traj.final().t);
  }
  const double rate = p.delta + p.mu;
  const double d = stats::ks_statistic(times, [&](double x) { return 1 - std::exp(-rate * x); });
  CHECK(stats::ks_pvalue(d, times.size()) > 0.01);
}

TEST_CASE("event cap and established threshold") {
  auto c = make_sim_config(sir(3, 10000), 10, 1, 0.1);
  c.max_events = 50;
  const auto capped = simulate_epidemic(c);
  CHECK(capped.terminal == Terminal::EventCapHit);
  CHECK(capped.event_count == 50);
  c.max_events = 1'000'000'000;
  c.established_threshold = 20;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    c.seed = seed;
    const auto traj = simulate_epidemic(c);
    if (traj.terminal == Terminal::OutbreakEstablished) {
      CHECK(traj.final().state.infected() == 20);
    } else {
      CHECK(traj.terminal == Terminal::EpidemicExtinct);
    }
  }
}

TEST_CASE("state_at holds the last state") {
  const auto traj = simulate_epidemic(make_sim_config(sir(3, 100), 3, 5, 0.5));
  if (traj.terminal == Terminal::ReachedTmax) {
    CHECK(traj.state_at(0.7) == traj.state_at(0.5));
    CHECK(traj.state_at(3.0) == traj.final().state);
  }
}

TEST_CASE("ages at time zero are the founders") {
  ModelParams p{1.0, 0.5, 0.0, 1.0, {}, 25};
  const auto sample = simulate_population_with_ages(bare_config(p, {25, 0, 0, 0}, 0.0, 0));
  CHECK(sample.ages.size() == 25);
  for (double a : sample.ages) CHECK(a == 0.0);
}

TEST_CASE("ages follow Exp(lambda), also without deaths") {
  for (double mu : {0.5, 0.0}) {
    ModelParams p{1.0, mu, 0.0, 1.0, {}, 20};
    std::vector<double> ages;
    std::uint32_t retries = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = simulate_population_with_ages(bare_config(p, {20, 0, 0, 0}, 7, seed));
      retries += s.retries;
      ages.insert(ages.end(), s.ages.begin(), s.ages.end());
    }
    CAPTURE(mu);
    CAPTURE(ages.size());
    if (mu == 0.0) CHECK(retries == 0);
    const double d = stats::ks_statistic(ages, [](double a) { return 1 - std::exp(-a); });
    CHECK(stats::ks_pvalue(d, ages.size()) > 0.01);
  }
}

TEST_CASE("age mode rejects an active epidemic") {
  auto c = make_sim_config(sir(3, 100), 5, 0, 0.1);
  CHECK_THROWS_AS(simulate_population_with_ages(c), ValidationError);
}

TEST_CASE("coupled processes stay ordered before breakdown") {
  const auto p = sir(3, 2000);
  std::size_t breakdowns = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = simulate_coupled_sandwich(make_sim_config(p, 6, seed, 0.05), 0.05);
    if (c.breakdown_time) ++breakdowns;
    for (const auto& s : c.samples) {
      CHECK(s.i_epidemic <= s.i_upper);
      if (!s.after_breakdown) {
        CHECK(s.i_lower <= s.i_epidemic);
        CHECK(s.s_over_n >= 0.95);
      }
      if (c.breakdown_time) CHECK(s.after_breakdown == (s.t >= *c.breakdown_time));
    }
  }
  CHECK(breakdowns > 0);
  CHECK_THROWS_AS(simulate_coupled_sandwich(
                      make_sim_config(ModelParams{1.0, 0.5, 6.0, 1.0, 2.0, 100}, 5, 0, 0.1), 0.05),
                  ValidationError);
  CHECK_THROWS_AS(simulate_coupled_sandwich(make_sim_config(p, 5, 0, 0.1), 1.5), ValidationError);
}

TEST_CASE("coupled epidemic marginal matches the plain simulation in law") {
  // compare the extinction frequency by t = 4 of the coupled epidemic with
  // the stand-alone engine over independent seeds
  const auto p = sir(3, 300);
  std::uint64_t coupled_ext = 0, plain_ext = 0;
  const std::uint64_t runs = 2000;
  for (std::uint64_t seed = 0; seed < runs; ++seed) {
    auto cfg = make_sim_config(p, 4, stream_seed(11, seed), 1.0);
    if (simulate_coupled_sandwich(cfg, 0.05).epidemic_extinct) ++coupled_ext;
    cfg.seed = stream_seed(12, seed);
    if (simulate_epidemic(cfg).terminal == Terminal::EpidemicExtinct) ++plain_ext;
  }
  const auto ci_a = stats::wilson_interval(coupled_ext, runs, 0.999);
  const auto ci_b = stats::wilson_interval(plain_ext, runs, 0.999);
  CHECK(ci_a.lo <= ci_b.hi);
  CHECK(ci_b.lo <= ci_a.hi);
}

TEST_CASE("subdominant outbreaks: no breakdown, prevalence decays") {
  const auto p = ModelParams{1.0, 0.5, 1.8, 1.0, {}, 3000};
  std::size_t survivors = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto c = simulate_coupled_sandwich(make_sim_config(p, 15, seed, 0.25), 0.05);
    if (c.epidemic_extinct) continue;
    ++survivors;
    CHECK_FALSE(c.breakdown_time);
    for (const auto& s : c.samples) CHECK(s.s_over_n >= 0.95);
  }
  CHECK(survivors >= 3);

  const std::array<double, 3> checkpoints{7.5, 11.25, 15.0};
  std::array<double, 3> prevalence{};
  survivors = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto traj = simulate_epidemic(make_sim_config(p, 15, seed, 0.25));
    if (traj.terminal != Terminal::ReachedTmax) continue;
    ++survivors;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& x = traj.state_at(checkpoints[k]);
      prevalence[k] += static_cast<double>(x.i) / static_cast<double>(x.total());
    }
  }
  REQUIRE(survivors >= 3);
  CHECK(prevalence[1] < prevalence[0]);
  CHECK(prevalence[2] < prevalence[1]);
}

TEST_CASE("growth-rate fit") {
  Trajectory traj;
  for (int k = 0; k <= 60; ++k) {
    const double t = 0.1 * k;
    traj.samples.push_back({t, {0, 0, static_cast<std::int64_t>(std::floor(std::exp(1.5 * t))), 0}});
  }
  CHECK(std::abs(estimate_growth_rate(traj, {2.0, 6.0}) - 1.5) < 0.01);
  traj.samples[40].state.i = 0;
  CHECK_THROWS_AS(estimate_growth_rate(traj, {2.0, 6.0}), ExtinctWindowError);
  CHECK_THROWS_AS(estimate_growth_rate(traj, {2.0, 8.0}), ValidationError);
}
