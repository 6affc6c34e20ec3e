#include "doctest.h"

#include <cmath>
#include <numeric>

#include "growepi/error.hpp"
#include "growepi/model.hpp"

using namespace growepi;

namespace {

ModelParams sir(double gamma = 3.0) { return {1.0, 0.5, gamma, 1.0, {}, 100}; }
ModelParams seir() { return {1.0, 0.5, 6.0, 1.0, 2.0, 100}; }

}  // namespace

TEST_CASE("SIR rates from the event table") {
  const auto rates = event_rates(sir(), {98, 0, 2, 0});
  CHECK(rates[EventKind::Infection] == doctest::Approx(5.88).epsilon(1e-15));
  CHECK(rates[EventKind::Birth] == 100.0);
  const double deaths = rates[EventKind::DeathS] + rates[EventKind::DeathE] +
                        rates[EventKind::DeathI] + rates[EventKind::DeathR];
  CHECK(deaths == 50.0);
  CHECK(rates[EventKind::Recovery] == 2.0);
  CHECK(rates[EventKind::BecomeInfectious] == 0.0);
  CHECK(rates.total() == doctest::Approx(157.88).epsilon(1e-14));
}

TEST_CASE("no infectives means no infection or recovery") {
  for (const auto& params : {sir(), seir()}) {
    const auto rates = event_rates(params, {40, 3, 0, 7});
    CHECK(rates[EventKind::Infection] == 0.0);
    CHECK(rates[EventKind::Recovery] == 0.0);
  }
}

TEST_CASE("SEIR rates") {
  const auto rates = event_rates(seir(), {90, 5, 5, 0});
  CHECK(rates[EventKind::Infection] == doctest::Approx(27.0).epsilon(1e-15));
  CHECK(rates[EventKind::BecomeInfectious] == 10.0);
  CHECK(rates[EventKind::DeathE] == 2.5);
}

TEST_CASE("empty population has no events") {
  CHECK(event_rates(sir(), {0, 0, 0, 0}).total() == 0.0);
}

TEST_CASE("applying events") {
  const PopulationState x{98, 0, 2, 0};
  CHECK(apply_event(x, EventKind::Infection, Variant::SIR) == PopulationState{97, 0, 3, 0});
  CHECK(apply_event(x, EventKind::Recovery, Variant::SIR) == PopulationState{98, 0, 1, 1});
  CHECK(apply_event(x, EventKind::Infection, Variant::SEIR) == PopulationState{97, 1, 2, 0});
  CHECK(apply_event(x, EventKind::Birth, Variant::SIR) == PopulationState{99, 0, 2, 0});
  CHECK_THROWS_AS(apply_event({0, 0, 1, 0}, EventKind::DeathS, Variant::SIR), StateError);
  CHECK_THROWS_AS(apply_event({5, 1, 1, 0}, EventKind::BecomeInfectious, Variant::SIR),
                  ValidationError);
}

TEST_CASE("jumps conserve or shift N as the table says") {
  for (auto variant : {Variant::SIR, Variant::SEIR}) {
    for (auto kind : kAllEventKinds) {
      if (!event_legal(kind, variant)) continue;
      const auto d = event_delta(kind, variant);
      const auto dn = std::accumulate(d.begin(), d.end(), std::int64_t{0});
      const auto d_infected = d[1] + d[2] + d[3];
      if (kind == EventKind::Birth) {
        CHECK(dn == 1);
      } else if (kind == EventKind::DeathS || kind == EventKind::DeathE ||
                 kind == EventKind::DeathI || kind == EventKind::DeathR) {
        CHECK(dn == -1);
      } else {
        CHECK(dn == 0);
      }
      if (kind == EventKind::Infection) {
        CHECK(d_infected == 1);
      } else {
        CHECK(d_infected <= 0);
      }
      if (variant == Variant::SIR) CHECK(d[1] == 0);
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate_growing(sir()));
  ModelParams p = sir();
  p.lambda = 0.4;
  CHECK_NOTHROW(validate(p));
  try {
    validate_growing(p);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("lambda > mu") != std::string::npos);
  }
  p = sir();
  p.delta = -1;
  CHECK_THROWS_AS(validate(p), ValidationError);
  p = sir();
  p.nu = 0.0;
  CHECK_THROWS_AS(validate(p), ValidationError);
  p = sir();
  p.n0 = 0;
  CHECK_THROWS_AS(validate(p), ValidationError);
  p = sir();
  p.gamma = std::nan("");
  CHECK_THROWS_AS(validate(p), ValidationError);
  CHECK_THROWS_AS(validate(PopulationState{-1, 0, 0, 0}), StateError);
}

TEST_CASE("outbreak seeds") {
  CHECK(initial_state(sir()) == PopulationState{99, 0, 1, 0});
  CHECK(initial_state(seir()) == PopulationState{99, 1, 0, 0});
}
