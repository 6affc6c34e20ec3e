#include "growepi/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "growepi/error.hpp"

namespace growepi {

double norm(const ScaledState& x) noexcept {
  return std::sqrt(x.s * x.s + x.e * x.e + x.i * x.i + x.r * x.r);
}

ScaledState default_start(double eps1, double eps2) {
  if (!(eps1 >= 0 && eps2 >= 0 && eps1 + eps2 <= 1)) {
    throw ValidationError("eps1, eps2 must be nonnegative with eps1 + eps2 <= 1");
  }
  return {1.0 - eps1 - eps2, 0.0, eps1, eps2};
}

ScaledState ode_rhs(const ModelParams& params, const ScaledState& z) {
  const double lambda = params.lambda;
  const double gamma = params.gamma;
  const double delta = params.delta;
  const double force = gamma * z.i * z.s;
  ScaledState d;
  d.s = lambda * (1.0 - z.s) - force;
  if (params.nu) {
    d.e = force - (lambda + *params.nu) * z.e;
    d.i = *params.nu * z.e - (lambda + delta) * z.i;
  } else {
    d.e = 0.0;
    d.i = z.i * (gamma * z.s - (lambda + delta));
  }
  d.r = delta * z.i - lambda * z.r;
  return d;
}

namespace {

// Jump intensities of the table evaluated at a real-valued state.
double real_rate(const ModelParams& p, EventKind kind, const ScaledState& z) {
  const double total = z.sum();
  switch (kind) {
    case EventKind::Birth: return p.lambda * total;
    case EventKind::DeathS: return p.mu * z.s;
    case EventKind::DeathE: return p.mu * z.e;
    case EventKind::DeathI: return p.mu * z.i;
    case EventKind::DeathR: return p.mu * z.r;
    case EventKind::Infection:
      return total > 0 ? p.gamma * z.i * z.s / total : 0.0;
    case EventKind::BecomeInfectious: return p.nu ? *p.nu * z.e : 0.0;
    case EventKind::Recovery: return p.delta * z.i;
  }
  return 0.0;
}

// sum over events of delta * rate, without the dilution term.
ScaledState jump_drift(const ModelParams& params, const ScaledState& z) {
  const Variant variant = params.variant();
  std::array<double, 4> acc{};
  for (EventKind kind : kAllEventKinds) {
    if (!event_legal(kind, variant)) continue;
    const double rate = real_rate(params, kind, z);
    const auto delta = event_delta(kind, variant);
    for (std::size_t k = 0; k < 4; ++k) {
      acc[k] += static_cast<double>(delta[k]) * rate;
    }
  }
  return {acc[0], acc[1], acc[2], acc[3]};
}

std::vector<double> sample_times(const IntegrateOptions& options,
                                 double t_max) {
  std::vector<double> grid =
      options.grid.empty() ? uniform_grid(0.1, t_max) : options.grid;
  double previous = 0.0;
  for (double g : grid) {
    if (!(g > previous)) {
      throw ValidationError("ODE grid must be strictly increasing in (0, t_max]");
    }
    previous = g;
  }
  if (!grid.empty() && grid.back() > t_max * (1 + 1e-12)) {
    throw ValidationError("ODE grid extends beyond t_max");
  }
  if (grid.empty() || grid.back() < t_max) grid.push_back(t_max);
  grid.insert(grid.begin(), 0.0);
  return grid;
}

ScaledState rk4_step(const ModelParams& params, const ScaledState& z,
                     double h) {
  const ScaledState k1 = ode_rhs(params, z);
  const ScaledState k2 = ode_rhs(params, z + (0.5 * h) * k1);
  const ScaledState k3 = ode_rhs(params, z + (0.5 * h) * k2);
  const ScaledState k4 = ode_rhs(params, z + h * k3);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<ScaledState> run_rk4(const ModelParams& params,
                                 const ScaledState& z0,
                                 const std::vector<double>& times, double dt) {
  std::vector<ScaledState> states;
  states.reserve(times.size());
  ScaledState z = z0;
  states.push_back(z);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double span = times[k] - times[k - 1];
    const auto steps =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / dt - 1e-9)));
    const double h = span / static_cast<double>(steps);
    for (std::int64_t j = 0; j < steps; ++j) z = rk4_step(params, z, h);
    states.push_back(z);
  }
  return states;
}

std::optional<Convergence> detect_convergence(
    const ModelParams& params, const std::vector<double>& times,
    const std::vector<ScaledState>& states, double radius, double window) {
  std::vector<std::pair<Equilibrium, ScaledState>> candidates{
      {Equilibrium::DiseaseFree, ScaledState{1.0, 0.0, 0.0, 0.0}}};
  if (params.supercritical_population()) {
    if (auto eq = endemic_equilibrium(params)) {
      candidates.emplace_back(Equilibrium::Endemic, ScaledState::from(*eq));
    }
  }
  for (const auto& [label, point] : candidates) {
    std::size_t k = states.size();
    while (k > 0 && norm(states[k - 1] - point) <= radius) --k;
    if (k == states.size()) continue;
    if (times.back() - times[k] >= window) {
      return Convergence{label, times[k]};
    }
  }
  return std::nullopt;
}

}  // namespace

ScaledState drift_from_rates(const ModelParams& params, const ScaledState& z) {
  return jump_drift(params, z) - params.population_growth() * z;
}

std::string_view to_string(Equilibrium eq) noexcept {
  return eq == Equilibrium::Endemic ? "Endemic" : "DiseaseFree";
}

OdeSolution integrate(const ModelParams& params, const ScaledState& z0,
                      double t_max, const IntegrateOptions& options) {
  validate(params);
  if (!(options.dt > 0)) throw ValidationError("dt must be > 0");
  if (!(t_max > 0)) throw ValidationError("t_max must be > 0");
  if (z0.s < 0 || z0.e < 0 || z0.i < 0 || z0.r < 0) {
    throw ValidationError("initial proportions must be nonnegative");
  }
  if (std::abs(z0.sum() - 1.0) > 1e-9) {
    throw ValidationError("initial proportions must sum to 1");
  }
  if (!params.is_seir() && z0.e != 0.0) {
    throw ValidationError("ebar must be 0 for the SIR model");
  }

  OdeSolution solution;
  solution.grid = sample_times(options, t_max);
  solution.states = run_rk4(params, z0, solution.grid, options.dt);
  if (options.step_check) {
    const auto fine = run_rk4(params, z0, solution.grid, 0.5 * options.dt);
    double change = 0.0;
    for (std::size_t k = 0; k < fine.size(); ++k) {
      const double d = norm(fine[k] - solution.states[k]);
      change = std::isfinite(d) ? std::max(change, d) : d;
      if (!std::isfinite(change)) break;
    }
    if (!(change <= options.step_check_tol)) {
      throw StepSizeError("halving dt moved the solution by " +
                          std::to_string(change) + "; dt is too coarse");
    }
  }
  solution.converged_to =
      detect_convergence(params, solution.grid, solution.states,
                         options.convergence_radius, options.convergence_window);
  return solution;
}

PopulationState round_counts(const ScaledState& z, std::int64_t n) {
  if (n < 0) throw ValidationError("n must be >= 0");
  const double sum = z.sum();
  if (!(sum > 0)) throw ValidationError("proportions must have positive sum");
  const auto parts = z.as_array();
  std::array<std::int64_t, 4> counts{};
  std::array<double, 4> remainders{};
  std::int64_t assigned = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (parts[k] < 0) throw ValidationError("proportions must be nonnegative");
    const double exact = static_cast<double>(n) * parts[k] / sum;
    counts[k] = static_cast<std::int64_t>(std::floor(exact));
    remainders[k] = exact - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 4) {
    ++counts[order[k]];
    ++assigned;
  }
  return {counts[0], counts[1], counts[2], counts[3]};
}

std::vector<double> scaled_deviation_path(const ModelParams& params,
                                          const Trajectory& trajectory,
                                          const OdeSolution& solution) {
  if (trajectory.samples.empty()) {
    throw GridMismatchError("empty trajectory");
  }
  const double n = static_cast<double>(trajectory.samples.front().state.total());
  if (!(n > 0)) throw ValidationError("trajectory starts from N = 0");
  const double growth = params.population_growth();
  std::vector<double> out;
  out.reserve(solution.grid.size());
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < solution.grid.size(); ++k) {
    const double t = solution.grid[k];
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    while (cursor < trajectory.samples.size() &&
           trajectory.samples[cursor].t < t - tol) {
      ++cursor;
    }
    if (cursor == trajectory.samples.size() ||
        std::abs(trajectory.samples[cursor].t - t) > tol) {
      throw GridMismatchError("trajectory has no sample at t=" +
                              std::to_string(t));
    }
    const auto& st = trajectory.samples[cursor].state;
    const double scale = n * std::exp(growth * t);
    const ScaledState scaled{static_cast<double>(st.s) / scale,
                             static_cast<double>(st.e) / scale,
                             static_cast<double>(st.i) / scale,
                             static_cast<double>(st.r) / scale};
    out.push_back(norm(scaled - solution.states[k]));
  }
  return out;
}

double compare_scaled(const ModelParams& params, const Trajectory& trajectory,
                      const OdeSolution& solution) {
  const auto path = scaled_deviation_path(params, trajectory, solution);
  return path.empty() ? 0.0 : *std::max_element(path.begin(), path.end());
}

OscillationReport damped_oscillation_report(const ModelParams& params,
                                            const OdeSolution& solution,
                                            double min_amplitude) {
  const auto eq = endemic_equilibrium(params);
  if (!eq) {
    throw ValidationError("oscillation report needs an endemic equilibrium");
  }
  const double ihat = (*eq)[2];
  OscillationReport report;
  const auto& st = solution.states;
  for (std::size_t k = 1; k + 1 < st.size(); ++k) {
    if (st[k].i > st[k - 1].i && st[k].i >= st[k + 1].i &&
        std::abs(st[k].i - ihat) > min_amplitude) {
      report.peaks.push_back({solution.grid[k], st[k].i});
    }
  }
  for (std::size_t k = 1; k < report.peaks.size(); ++k) {
    if (std::abs(report.peaks[k].ibar - ihat) >
        std::abs(report.peaks[k - 1].ibar - ihat)) {
      report.amplitudes_nonincreasing = false;
    }
  }
  return report;
}

double integral_form_residual(const ModelParams& params,
                              const OdeSolution& solution) {
  const auto& grid = solution.grid;
  const auto& st = solution.states;
  if (grid.size() < 3) throw ValidationError("need at least three grid points");
  const double h = grid[1] - grid[0];
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (std::abs(grid[k] - grid[k - 1] - h) > 1e-9 * std::max(1.0, h)) {
      throw ValidationError("integral form check needs a uniform grid");
    }
  }
  const double g = params.population_growth();
  auto integrand = [&](std::size_t k) {
    return std::exp(g * grid[k]) * jump_drift(params, st[k]);
  };
  ScaledState integral{};
  double worst = 0.0;
  for (std::size_t k = 2; k < grid.size(); k += 2) {
    integral += (h / 3.0) *
                (integrand(k - 2) + 4.0 * integrand(k - 1) + integrand(k));
    const ScaledState predicted = std::exp(-g * grid[k]) * (st.front() + integral);
    worst = std::max(worst, norm(predicted - st[k]));
  }
  return worst;
}

}  // namespace growepi
