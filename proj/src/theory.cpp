#include "growepi/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "growepi/error.hpp"

namespace growepi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rate scale of the infection process; alpha is compared against zero
// relative to it so that the classification is invariant to time units.
double rate_scale(const ModelParams& p) {
  return p.gamma + p.delta + p.mu + (p.nu ? *p.nu : 0.0);
}

bool near(double a, double b, double scale) {
  return std::abs(a - b) <= kBoundaryRelTol * scale;
}

}  // namespace

std::string_view to_string(Scenario scenario) noexcept {
  switch (scenario) {
    case Scenario::AlwaysExtinct: return "AlwaysExtinct";
    case Scenario::BoundaryCritical: return "BoundaryCritical";
    case Scenario::SubdominantGrowth: return "SubdominantGrowth";
    case Scenario::BoundaryEqualGrowth: return "BoundaryEqualGrowth";
    case Scenario::EndemicCapable: return "EndemicCapable";
  }
  return "?";
}

Scenario scenario_from_string(std::string_view name) {
  for (auto s : {Scenario::AlwaysExtinct, Scenario::BoundaryCritical,
                 Scenario::SubdominantGrowth, Scenario::BoundaryEqualGrowth,
                 Scenario::EndemicCapable}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown scenario '" + std::string(name) + "'");
}

double basic_reproduction_number(const ModelParams& params) {
  validate(params);
  const double infectious = params.gamma / (params.delta + params.mu);
  if (!params.nu) return infectious;
  return *params.nu / (*params.nu + params.mu) * infectious;
}

double malthusian_closed_form(const ModelParams& params) {
  validate(params);
  const double gamma = params.gamma;
  const double delta = params.delta;
  const double mu = params.mu;
  if (!params.nu) return gamma - (delta + mu);
  const double nu = *params.nu;
  // x = alpha + mu solves x^2 + (delta + nu) x + nu (delta - gamma) = 0.
  // The positive branch -b + sqrt(d) is rewritten as (d - b^2)/(sqrt(d) + b)
  // so that it stays accurate near alpha = -mu.
  const double b = 0.5 * (delta + nu);
  const double d = 0.25 * (delta - nu) * (delta - nu) + gamma * nu;
  const double x = nu * (gamma - delta) / (std::sqrt(d) + b);
  return x - mu;
}

double contact_rate_transform(const ModelParams& params, double alpha) {
  const double removal = alpha + params.mu + params.delta;
  if (!params.nu) {
    if (removal <= 0) return kInf;
    return params.gamma / removal;
  }
  const double latency_exit = alpha + params.mu + *params.nu;
  if (removal <= 0 || latency_exit <= 0) return kInf;
  // c(t) = gamma nu (e^{-(mu+delta)t} - e^{-(mu+nu)t}) / (nu - delta) has a
  // removable singularity at nu == delta; its transform does not.
  return params.gamma * *params.nu / (removal * latency_exit);
}

double malthusian_euler_lotka(const ModelParams& params, double tol) {
  validate(params);
  if (!(tol > 0)) throw ValidationError("tol must be > 0");
  if (params.gamma <= 0) {
    throw BracketError("no Euler-Lotka root: gamma must be > 0");
  }
  const double slowest =
      params.nu ? std::min(params.delta, *params.nu) : params.delta;
  const double lower_bound = -(params.mu + slowest);

  double lo = lower_bound;
  double width = 1.0;
  double hi = lower_bound + width;
  int growth_steps = 0;
  while (contact_rate_transform(params, hi) >= 1.0) {
    width *= 2.0;
    hi = lower_bound + width;
    if (++growth_steps > 2000 || !std::isfinite(hi)) {
      throw BracketError("Euler-Lotka upper bracket not found");
    }
  }
  for (int iter = 0; iter < 4000 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (contact_rate_transform(params, mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double minor_outbreak_probability(const ModelParams& params) {
  validate(params);
  if (params.gamma <= 0) return 1.0;
  double q = (params.delta + params.mu) / params.gamma;
  if (params.nu) q += params.mu / (*params.nu + params.mu);
  return std::min(1.0, q);
}

double offspring_pgf(const ModelParams& params, double s) {
  const double removal = params.delta + params.mu;
  const double geometric = removal / (removal + params.gamma * (1.0 - s));
  if (!params.nu) return geometric;
  const double die_latent = params.mu / (*params.nu + params.mu);
  return die_latent + (1.0 - die_latent) * geometric;
}

double extinction_prob_pgf_oracle(const ModelParams& params, double tol) {
  validate(params);
  if (!(tol > 0)) throw ValidationError("tol must be > 0");
  constexpr long kMaxIterations = 200'000'000;
  double s = 0.0;
  double previous_step = -1.0;
  for (long iter = 0; iter < kMaxIterations; ++iter) {
    const double next = offspring_pgf(params, s);
    const double step = next - s;
    s = next;
    if (step <= 0.0) break;
    if (previous_step > 0.0) {
      // Linear convergence with ratio r leaves at most step*r/(1-r) to go.
      const double ratio = std::min(step / previous_step, 1.0 - 1e-15);
      if (step * ratio / (1.0 - ratio) < tol) break;
    }
    previous_step = step;
  }
  return std::min(s, 1.0);
}

std::optional<Proportions> endemic_equilibrium(const ModelParams& params) {
  validate(params);
  if (!params.supercritical_population()) return std::nullopt;
  if (classify_scenario(params) != Scenario::EndemicCapable) {
    return std::nullopt;
  }
  const double lambda = params.lambda;
  const double gamma = params.gamma;
  const double delta = params.delta;
  if (!params.nu) {
    const double excess = 1.0 / (lambda + delta) - 1.0 / gamma;
    return Proportions{(lambda + delta) / gamma, 0.0, lambda * excess,
                       delta * excess};
  }
  const double nu = *params.nu;
  const double b = nu / ((lambda + nu) * (lambda + delta));
  const double excess = b - 1.0 / gamma;
  return Proportions{1.0 / (gamma * b), lambda * (lambda + delta) / nu * excess,
                     lambda * excess, delta * excess};
}

Scenario classify_scenario(const ModelParams& params) {
  validate_growing(params);
  const double alpha = malthusian_closed_form(params);
  const double growth = params.population_growth();
  if (near(alpha, 0.0, rate_scale(params))) return Scenario::BoundaryCritical;
  if (alpha < 0) return Scenario::AlwaysExtinct;
  if (near(alpha, growth, std::max(std::abs(alpha), std::abs(growth)))) {
    return Scenario::BoundaryEqualGrowth;
  }
  return alpha < growth ? Scenario::SubdominantGrowth
                        : Scenario::EndemicCapable;
}

BreakdownDiagnostics breakdown_diagnostics(const ModelParams& params,
                                           double eps0, double n) {
  if (classify_scenario(params) != Scenario::EndemicCapable) {
    throw ValidationError(
        "breakdown diagnostics need alpha > lambda - mu "
        "(gamma > delta + lambda for SIR)");
  }
  if (!(eps0 > 0 && eps0 < 1)) throw ValidationError("eps0 must be in (0,1)");
  if (!(eps0 * n > 1)) throw ValidationError("eps0 * n must exceed 1");
  const double alpha = malthusian_closed_form(params);
  const double gap = alpha - params.population_growth();
  BreakdownDiagnostics out;
  out.eps0 = eps0;
  out.n = n;
  out.time = std::log(eps0 * n) / gap;
  out.exponent = alpha / gap;
  out.infectives = std::pow(eps0 * n, out.exponent);
  return out;
}

bool perfect_coupling_condition(const ModelParams& params) {
  validate(params);
  const double alpha = malthusian_closed_form(params);
  return alpha * alpha < params.population_growth();
}

TheorySummary summarize(const ModelParams& params, std::optional<double> eps0) {
  validate_growing(params);
  TheorySummary out;
  out.variant = params.variant();
  out.r0 = basic_reproduction_number(params);
  out.alpha = malthusian_closed_form(params);
  out.pop_growth = params.population_growth();
  out.minor_outbreak_prob = minor_outbreak_probability(params);
  out.scenario = classify_scenario(params);
  out.endemic = endemic_equilibrium(params);
  out.perfect_coupling_hint = perfect_coupling_condition(params);
  if (eps0 && out.scenario == Scenario::EndemicCapable &&
      *eps0 * static_cast<double>(params.n0) > 1.0) {
    out.breakdown =
        breakdown_diagnostics(params, *eps0, static_cast<double>(params.n0));
  }
  return out;
}

}  // namespace growepi
