#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "growepi/model.hpp"

namespace growepi {

/// Outcome classes of an outbreak started by one infected individual,
/// determined by the Malthusian parameter alpha relative to 0 and to the
/// population growth rate lambda - mu.
enum class Scenario {
  AlwaysExtinct,        // alpha < 0
  BoundaryCritical,     // alpha == 0 (still dies out w.p. 1)
  SubdominantGrowth,    // 0 < alpha < lambda - mu
  BoundaryEqualGrowth,  // alpha == lambda - mu, not covered by the theory
  EndemicCapable,       // alpha > lambda - mu
};

std::string_view to_string(Scenario scenario) noexcept;
/// Inverse of to_string; throws ValidationError on unknown names.
Scenario scenario_from_string(std::string_view name);

/// Relative tolerance used when comparing alpha against 0 and lambda - mu.
inline constexpr double kBoundaryRelTol = 1e-12;

/// Proportions (s, e, i, r) of the fluid-limit endemic equilibrium.
using Proportions = std::array<double, 4>;

struct BreakdownDiagnostics {
  double eps0 = 0;
  double n = 0;
  /// Approximate time at which infectives reach a fraction eps0 of the
  /// population, log(eps0 n) / (alpha - (lambda - mu)).
  double time = 0;
  /// Approximate number of infectives at that time, (eps0 n)^exponent.
  double infectives = 0;
  /// alpha / (alpha - (lambda - mu)); always > 1 when defined.
  double exponent = 0;
};

struct TheorySummary {
  Variant variant = Variant::SIR;
  double r0 = 0;
  double alpha = 0;
  double pop_growth = 0;
  double minor_outbreak_prob = 1;
  Scenario scenario = Scenario::AlwaysExtinct;
  std::optional<Proportions> endemic;
  bool perfect_coupling_hint = false;
  std::optional<BreakdownDiagnostics> breakdown;
};

/// Expected number of infectious contacts of one infected individual:
/// gamma / (delta + mu), times nu / (nu + mu) with a latent period.
double basic_reproduction_number(const ModelParams& params);

/// Closed-form Malthusian parameter. SIR: gamma - (delta + mu). SEIR: the
/// positive-branch root of (alpha + mu + delta)(alpha + mu + nu) = gamma nu,
///   alpha = -(mu + (delta + nu)/2) + sqrt((delta - nu)^2 / 4 + gamma nu),
/// evaluated in a cancellation-free form.
double malthusian_closed_form(const ModelParams& params);

/// Laplace transform of the expected infectious-contact-rate function c(t):
/// integral_0^inf exp(-alpha t) c(t) dt, integrated analytically.
/// Defined for alpha > -(mu + min(delta, nu)); +inf at or below that bound.
double contact_rate_transform(const ModelParams& params, double alpha);

/// Root of contact_rate_transform(alpha) == 1 by bracketing and bisection,
/// to within `tol`. Throws BracketError when no sign change exists
/// (e.g. gamma == 0).
double malthusian_euler_lotka(const ModelParams& params, double tol = 1e-12);

/// Limit of the minor-outbreak probability as n grows. SIR:
/// min(1, (delta+mu)/gamma); SEIR adds the chance mu/(nu+mu) of dying while
/// latent.
double minor_outbreak_probability(const ModelParams& params);

/// Offspring probability generating function of the approximating
/// branching process (geometric, mixed with a point mass at zero under SEIR).
double offspring_pgf(const ModelParams& params, double s);

/// Smallest fixed point of offspring_pgf on [0, 1], by iterating s <- g(s)
/// from 0. Stops once the geometric-tail error bound drops below tol.
double extinction_prob_pgf_oracle(const ModelParams& params,
                                  double tol = 1e-12);

/// Equilibrium of the fluid limit with i > 0. Present iff alpha > lambda - mu
/// (with the boundary tolerance above).
std::optional<Proportions> endemic_equilibrium(const ModelParams& params);

/// Requires lambda > mu.
Scenario classify_scenario(const ModelParams& params);

/// Requires alpha > lambda - mu and eps0 * n > 1, 0 < eps0 < 1.
BreakdownDiagnostics breakdown_diagnostics(const ModelParams& params,
                                           double eps0, double n);

/// Heuristic hint alpha^2 < lambda - mu: the upper branching process and
/// the epidemic may then stay identical forever with positive probability.
bool perfect_coupling_condition(const ModelParams& params);

/// All of the above for one parameter set. Breakdown diagnostics are filled
/// in when eps0 is given and the scenario is EndemicCapable.
TheorySummary summarize(const ModelParams& params,
                        std::optional<double> eps0 = std::nullopt);

}  // namespace growepi
