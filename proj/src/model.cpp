#include "growepi/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "growepi/error.hpp"

namespace growepi {

namespace {

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw ValidationError(std::string(name) + " must be finite");
  }
}

}  // namespace

void validate(const ModelParams& params) {
  require_finite(params.lambda, "lambda");
  require_finite(params.mu, "mu");
  require_finite(params.gamma, "gamma");
  require_finite(params.delta, "delta");
  if (params.lambda <= 0) throw ValidationError("lambda must be > 0");
  if (params.mu < 0) throw ValidationError("mu must be >= 0");
  if (params.gamma < 0) throw ValidationError("gamma must be >= 0");
  if (params.delta <= 0) throw ValidationError("delta must be > 0");
  if (params.nu) {
    require_finite(*params.nu, "nu");
    if (*params.nu <= 0) throw ValidationError("nu must be > 0");
  }
  if (params.n0 < 1) throw ValidationError("n0 must be >= 1");
}

void validate_growing(const ModelParams& params) {
  validate(params);
  if (!params.supercritical_population()) {
    throw ValidationError(
        "lambda > mu required: the population is assumed to grow as a "
        "supercritical linear birth-death process (got lambda=" +
        std::to_string(params.lambda) + ", mu=" + std::to_string(params.mu) +
        ")");
  }
}

void validate(const PopulationState& state) {
  if (state.s < 0 || state.e < 0 || state.i < 0 || state.r < 0) {
    throw StateError("compartment counts must be nonnegative");
  }
  const auto max = std::numeric_limits<std::int64_t>::max();
  if (state.s > max - state.e || state.s + state.e > max - state.i ||
      state.s + state.e + state.i > max - state.r) {
    throw StateError("population total overflows 64 bits");
  }
}

PopulationState initial_state(const ModelParams& params) {
  validate(params);
  PopulationState state;
  state.s = params.n0 - 1;
  if (params.is_seir()) {
    state.e = 1;
  } else {
    state.i = 1;
  }
  return state;
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Birth: return "Birth";
    case EventKind::DeathS: return "DeathS";
    case EventKind::DeathE: return "DeathE";
    case EventKind::DeathI: return "DeathI";
    case EventKind::DeathR: return "DeathR";
    case EventKind::Infection: return "Infection";
    case EventKind::BecomeInfectious: return "BecomeInfectious";
    case EventKind::Recovery: return "Recovery";
  }
  return "?";
}

bool event_legal(EventKind kind, Variant variant) noexcept {
  if (variant == Variant::SEIR) return true;
  return kind != EventKind::DeathE && kind != EventKind::BecomeInfectious;
}

StateDelta event_delta(EventKind kind, Variant variant) {
  if (!event_legal(kind, variant)) {
    throw ValidationError(std::string(to_string(kind)) +
                          " is not an event of the SIR model");
  }
  switch (kind) {
    case EventKind::Birth: return {1, 0, 0, 0};
    case EventKind::DeathS: return {-1, 0, 0, 0};
    case EventKind::DeathE: return {0, -1, 0, 0};
    case EventKind::DeathI: return {0, 0, -1, 0};
    case EventKind::DeathR: return {0, 0, 0, -1};
    case EventKind::Infection:
      return variant == Variant::SEIR ? StateDelta{-1, 1, 0, 0}
                                      : StateDelta{-1, 0, 1, 0};
    case EventKind::BecomeInfectious: return {0, -1, 1, 0};
    case EventKind::Recovery: return {0, 0, -1, 1};
  }
  return {};
}

double EventRates::total() const noexcept {
  return std::accumulate(rates_.begin(), rates_.end(), 0.0);
}

EventRates event_rates(const ModelParams& params,
                       const PopulationState& state) {
  validate(state);
  return event_rates_unchecked(params, state);
}

PopulationState apply_event(const PopulationState& state, EventKind kind,
                            Variant variant) {
  validate(state);
  const auto delta = event_delta(kind, variant);
  PopulationState next = state;
  std::int64_t* fields[4] = {&next.s, &next.e, &next.i, &next.r};
  for (std::size_t k = 0; k < 4; ++k) {
    if (delta[k] < 0 && *fields[k] == 0) {
      throw StateError("event " + std::string(to_string(kind)) +
                       " would make a compartment negative");
    }
    if (delta[k] > 0 && state.total() == std::numeric_limits<std::int64_t>::max()) {
      throw StateError("population count overflow");
    }
    *fields[k] += delta[k];
  }
  return next;
}

}  // namespace growepi
