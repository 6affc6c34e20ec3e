#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "growepi/model.hpp"
#include "growepi/ssa.hpp"
#include "growepi/theory.hpp"

namespace growepi {

/// Compartment sizes relative to the deterministic population curve
/// n e^{(lambda - mu) t}. ebar stays 0 for SIR.
struct ScaledState {
  double s = 0;
  double e = 0;
  double i = 0;
  double r = 0;

  [[nodiscard]] double sum() const noexcept { return s + e + i + r; }
  [[nodiscard]] std::array<double, 4> as_array() const noexcept {
    return {s, e, i, r};
  }
  static ScaledState from(const Proportions& p) noexcept {
    return {p[0], p[1], p[2], p[3]};
  }

  ScaledState& operator+=(const ScaledState& o) noexcept {
    s += o.s;
    e += o.e;
    i += o.i;
    r += o.r;
    return *this;
  }
  friend ScaledState operator+(ScaledState a, const ScaledState& b) noexcept {
    return a += b;
  }
  friend ScaledState operator*(double k, ScaledState a) noexcept {
    a.s *= k;
    a.e *= k;
    a.i *= k;
    a.r *= k;
    return a;
  }
  friend ScaledState operator-(const ScaledState& a,
                               const ScaledState& b) noexcept {
    return a + (-1.0) * b;
  }
  friend bool operator==(const ScaledState&, const ScaledState&) = default;
};

double norm(const ScaledState& x) noexcept;

/// Starting point (1 - eps1 - eps2, 0, eps1, eps2).
ScaledState default_start(double eps1, double eps2);

/// Fluid-limit right-hand side for a population normalised to one:
///   s' = lambda (1 - s) - gamma i s
///   e' = gamma i s - (lambda + nu) e            (SEIR)
///   i' = nu e - (lambda + delta) i   or   i (gamma s - (lambda + delta))
///   r' = delta i - lambda r
ScaledState ode_rhs(const ModelParams& params, const ScaledState& z);

/// Drift assembled from the jump table: sum over events of delta * rate(z),
/// minus (lambda - mu) z. Equals ode_rhs whenever z sums to one.
ScaledState drift_from_rates(const ModelParams& params, const ScaledState& z);

enum class Equilibrium { DiseaseFree, Endemic };
std::string_view to_string(Equilibrium eq) noexcept;

struct Convergence {
  Equilibrium equilibrium = Equilibrium::DiseaseFree;
  /// First grid time from which the solution stays inside the ball.
  double hit_time = 0;
};

struct OdeSolution {
  std::vector<double> grid;
  std::vector<ScaledState> states;
  std::optional<Convergence> converged_to;
};

struct IntegrateOptions {
  double dt = 1e-3;
  /// Sampling times; t = 0 is always included in front of them.
  std::vector<double> grid;
  double convergence_radius = 1e-6;
  /// The solution must stay inside the ball for at least this long.
  double convergence_window = 5.0;
  /// Re-integrate with dt/2 and compare the sampled states.
  bool step_check = true;
  double step_check_tol = 1e-8;
};

/// Classical fixed-step RK4. Each grid interval is split into
/// ceil(length / dt) equal steps so every grid time is hit exactly.
/// Throws StepSizeError when halving dt moves any sampled state by more
/// than step_check_tol.
OdeSolution integrate(const ModelParams& params, const ScaledState& z0,
                      double t_max, const IntegrateOptions& options = {});

/// Largest-remainder rounding of n * z to integers summing to n.
PopulationState round_counts(const ScaledState& z, std::int64_t n);

/// Sup over the shared grid of |Z(t) / (n e^{(lambda-mu) t}) - zbar(t)|,
/// n being the trajectory's initial population. Throws GridMismatchError
/// unless every solution grid time is sampled by the trajectory.
double compare_scaled(const ModelParams& params, const Trajectory& trajectory,
                      const OdeSolution& solution);

/// Same deviation, sample by sample.
std::vector<double> scaled_deviation_path(const ModelParams& params,
                                          const Trajectory& trajectory,
                                          const OdeSolution& solution);

struct OscillationPeak {
  double t = 0;
  double ibar = 0;
};

struct OscillationReport {
  std::vector<OscillationPeak> peaks;
  /// |ibar - ihat| at successive peaks never grows after the first one.
  bool amplitudes_nonincreasing = true;
};

/// Local maxima of ibar(t), ignoring wiggles within min_amplitude of the
/// endemic level. Requires an endemic equilibrium to exist.
OscillationReport damped_oscillation_report(const ModelParams& params,
                                            const OdeSolution& solution,
                                            double min_amplitude = 1e-9);

/// Max deviation between the solution and the integral form
///   zbar(t) = zbar0 e^{-(lambda-mu) t}
///           + int_0^t e^{-(lambda-mu)(t-u)} F(zbar(u)) du,
/// F being the jump-table drift without the dilution term, evaluated with
/// composite Simpson quadrature on the solution grid (checked at every
/// second grid point; the grid must be uniform).
double integral_form_residual(const ModelParams& params,
                              const OdeSolution& solution);

}  // namespace growepi
