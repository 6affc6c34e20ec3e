#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace growepi::stats {

struct Interval {
  double lo = 0;
  double hi = 1;
  [[nodiscard]] bool contains(double x) const noexcept {
    return lo <= x && x <= hi;
  }
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                         double confidence = 0.95);

struct MeanSe {
  double mean = 0;
  /// Standard error of the mean; 0 for a single observation.
  double se = 0;
  std::size_t count = 0;
};

MeanSe mean_se(std::span<const double> values);

/// Sup-distance between the empirical CDF of `sample` and `cdf`.
/// Sorts a copy of the data.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

/// Same, but sorts `sample` in place (for large samples).
double ks_statistic_inplace(std::span<float> sample,
                            const std::function<double(double)>& cdf);

/// Asymptotic p-value P(D_n > d) from the Kolmogorov distribution, with the
/// usual sqrt(n) + 0.12 + 0.11/sqrt(n) small-sample correction.
double ks_pvalue(double d, std::size_t n);

/// One-sided sign test: P(X >= successes) for X ~ Binomial(trials, p).
double binomial_upper_tail(std::uint64_t successes, std::uint64_t trials,
                           double p = 0.5);

/// One-sided Mann-Whitney U test of H1: values in `smaller` tend to be
/// smaller than those in `larger`. Normal approximation with tie and
/// continuity corrections.
double mann_whitney_less_pvalue(std::span<const double> smaller,
                                std::span<const double> larger);

double median(std::vector<double> values);

}  // namespace growepi::stats
