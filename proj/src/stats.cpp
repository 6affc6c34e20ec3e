#include "growepi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>

#include "growepi/error.hpp"

namespace growepi::stats {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                         double confidence) {
  if (trials == 0) throw ValidationError("Wilson interval needs trials > 0");
  if (successes > trials) throw ValidationError("successes exceed trials");
  if (!(confidence > 0 && confidence < 1)) {
    throw ValidationError("confidence must be in (0,1)");
  }
  const boost::math::normal standard;
  const double z = boost::math::quantile(standard, 0.5 + 0.5 * confidence);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half =
      z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  out.count = values.size();
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1) / n);
  }
  return out;
}

namespace {

template <typename T>
double ks_sorted(std::span<const T> sorted,
                 const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double worst = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double f = cdf(static_cast<double>(sorted[k]));
    const double above = static_cast<double>(k + 1) / n - f;
    const double below = f - static_cast<double>(k) / n;
    worst = std::max({worst, above, below});
  }
  return worst;
}

}  // namespace

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ValidationError("KS test needs data");
  std::sort(sample.begin(), sample.end());
  return ks_sorted<double>(sample, cdf);
}

double ks_statistic_inplace(std::span<float> sample,
                            const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ValidationError("KS test needs data");
  std::sort(sample.begin(), sample.end());
  return ks_sorted<float>(sample, cdf);
}

double ks_pvalue(double d, std::size_t n) {
  if (n == 0) throw ValidationError("KS p-value needs n > 0");
  const double rn = std::sqrt(static_cast<double>(n));
  const double x = (rn + 0.12 + 0.11 / rn) * d;
  if (x < 1e-3) return 1.0;
  // Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)
  double sum = 0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double binomial_upper_tail(std::uint64_t successes, std::uint64_t trials,
                           double p) {
  if (successes > trials) throw ValidationError("successes exceed trials");
  if (successes == 0) return 1.0;
  const boost::math::binomial dist(static_cast<double>(trials), p);
  return boost::math::cdf(boost::math::complement(
      dist, static_cast<double>(successes - 1)));
}

double mann_whitney_less_pvalue(std::span<const double> smaller,
                                std::span<const double> larger) {
  const std::size_t n1 = smaller.size();
  const std::size_t n2 = larger.size();
  if (n1 == 0 || n2 == 0) throw ValidationError("Mann-Whitney needs data");
  struct Item {
    double value;
    int group;
  };
  std::vector<Item> all;
  all.reserve(n1 + n2);
  for (double v : smaller) all.push_back({v, 0});
  for (double v : larger) all.push_back({v, 1});
  std::sort(all.begin(), all.end(),
            [](const Item& a, const Item& b) { return a.value < b.value; });

  double rank_sum_first = 0;
  double tie_term = 0;
  for (std::size_t k = 0; k < all.size();) {
    std::size_t j = k;
    while (j < all.size() && all[j].value == all[k].value) ++j;
    const double avg_rank = 0.5 * static_cast<double>(k + 1 + j);
    const double ties = static_cast<double>(j - k);
    tie_term += ties * ties * ties - ties;
    for (std::size_t m = k; m < j; ++m) {
      if (all[m].group == 0) rank_sum_first += avg_rank;
    }
    k = j;
  }
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double u = rank_sum_first - a * (a + 1) / 2;
  const double mean = a * b / 2;
  const double n = a + b;
  const double var = a * b / 12 * ((n + 1) - tie_term / (n * (n - 1)));
  if (var <= 0) return 1.0;
  const double z = (u - mean + 0.5) / std::sqrt(var);
  return boost::math::cdf(boost::math::normal(), z);
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of empty set");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(mid),
                   values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(),
                                     values.begin() + static_cast<long>(mid)));
  }
  return m;
}

}  // namespace growepi::stats
