#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace growepi {

enum class Variant { SIR, SEIR };

/// Rates of the population and epidemic processes.
///
/// lambda/mu drive the linear birth-death population, gamma/delta the
/// infection and recovery, and nu (when present) the exit from latency.
/// The SEIR variant is selected by the presence of nu.
struct ModelParams {
  double lambda = 1.0;
  double mu = 0.5;
  double gamma = 3.0;
  double delta = 1.0;
  std::optional<double> nu;
  std::int64_t n0 = 1000;

  [[nodiscard]] Variant variant() const noexcept {
    return nu ? Variant::SEIR : Variant::SIR;
  }
  [[nodiscard]] bool is_seir() const noexcept { return nu.has_value(); }
  /// lambda > mu, the standing assumption of the growing-population model.
  [[nodiscard]] bool supercritical_population() const noexcept {
    return lambda > mu;
  }
  [[nodiscard]] double population_growth() const noexcept {
    return lambda - mu;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Throws ValidationError naming the offending field.
/// lambda, delta and nu must be strictly positive; mu and gamma may be zero
/// (pure-birth population, epidemic switched off); n0 >= 1.
void validate(const ModelParams& params);

/// Same as validate() and additionally requires lambda > mu.
void validate_growing(const ModelParams& params);

/// Compartment counts. e stays 0 in the SIR variant.
struct PopulationState {
  std::int64_t s = 0;
  std::int64_t e = 0;
  std::int64_t i = 0;
  std::int64_t r = 0;

  [[nodiscard]] std::int64_t total() const noexcept { return s + e + i + r; }
  [[nodiscard]] std::int64_t infected() const noexcept { return e + i; }

  friend bool operator==(const PopulationState&,
                         const PopulationState&) = default;
};

void validate(const PopulationState& state);

/// One freshly infected individual among n0.
/// SIR starts from (n0-1, 0, 1, 0); SEIR from (n0-1, 1, 0, 0) since a new
/// infection is first latent.
PopulationState initial_state(const ModelParams& params);

enum class EventKind : std::uint8_t {
  Birth,
  DeathS,
  DeathE,
  DeathI,
  DeathR,
  Infection,
  BecomeInfectious,
  Recovery,
};

inline constexpr std::size_t kEventKindCount = 8;
inline constexpr std::array<EventKind, kEventKindCount> kAllEventKinds{
    EventKind::Birth,     EventKind::DeathS,    EventKind::DeathE,
    EventKind::DeathI,    EventKind::DeathR,    EventKind::Infection,
    EventKind::BecomeInfectious, EventKind::Recovery};

std::string_view to_string(EventKind kind) noexcept;

using StateDelta = std::array<std::int64_t, 4>;

/// Change in (s, e, i, r). Infection feeds e under SEIR and i under SIR.
/// Throws ValidationError for DeathE/BecomeInfectious under SIR.
StateDelta event_delta(EventKind kind, Variant variant);

/// Legal in the given variant?
bool event_legal(EventKind kind, Variant variant) noexcept;

/// Per-event jump intensities, indexed by EventKind.
class EventRates {
 public:
  [[nodiscard]] double operator[](EventKind kind) const noexcept {
    return rates_[static_cast<std::size_t>(kind)];
  }
  double& operator[](EventKind kind) noexcept {
    return rates_[static_cast<std::size_t>(kind)];
  }
  [[nodiscard]] double total() const noexcept;
  [[nodiscard]] const std::array<double, kEventKindCount>& values()
      const noexcept {
    return rates_;
  }

 private:
  std::array<double, kEventKindCount> rates_{};
};

/// Transition intensities of the SIR (six events) or SEIR (eight events)
/// chain. All rates vanish when N = 0.
EventRates event_rates(const ModelParams& params, const PopulationState& state);

/// Unchecked variant for the simulation inner loop. State must be valid.
inline EventRates event_rates_unchecked(const ModelParams& params,
                                        const PopulationState& state) noexcept {
  EventRates rates;
  const auto n = state.total();
  if (n == 0) return rates;
  const double s = static_cast<double>(state.s);
  const double e = static_cast<double>(state.e);
  const double i = static_cast<double>(state.i);
  const double r = static_cast<double>(state.r);
  rates[EventKind::Birth] = params.lambda * static_cast<double>(n);
  rates[EventKind::DeathS] = params.mu * s;
  rates[EventKind::DeathE] = params.mu * e;
  rates[EventKind::DeathI] = params.mu * i;
  rates[EventKind::DeathR] = params.mu * r;
  rates[EventKind::Infection] = params.gamma * i * s / static_cast<double>(n);
  rates[EventKind::BecomeInfectious] = params.nu ? *params.nu * e : 0.0;
  rates[EventKind::Recovery] = params.delta * i;
  return rates;
}

/// Applies one event. Throws StateError on underflow or overflow and
/// ValidationError for events illegal in the variant.
PopulationState apply_event(const PopulationState& state, EventKind kind,
                            Variant variant);

}  // namespace growepi
