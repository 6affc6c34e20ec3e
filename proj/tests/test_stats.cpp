#include "doctest.h"

#include <cmath>
#include <random>

#include "growepi/stats.hpp"

using namespace growepi::stats;

TEST_CASE("Wilson interval reference values") {
  auto ci = wilson_interval(5, 10);
  CHECK(ci.lo == doctest::Approx(0.23659309051256394).epsilon(1e-9));
  CHECK(ci.hi == doctest::Approx(0.7634069094874361).epsilon(1e-9));
  ci = wilson_interval(0, 10);
  CHECK(ci.lo == 0.0);
  CHECK(ci.hi == doctest::Approx(0.27753279986288926).epsilon(1e-9));
  ci = wilson_interval(37, 1000, 0.99);
  CHECK(ci.lo == doctest::Approx(0.024426002114063726).epsilon(1e-9));
  CHECK(ci.hi == doctest::Approx(0.055677416586490995).epsilon(1e-9));
  ci = wilson_interval(1, 1);
  CHECK(ci.lo <= ci.hi);
  CHECK(ci.hi == 1.0);
  CHECK(ci.contains(1.0));
}

TEST_CASE("Wilson coverage on simulated Bernoulli data") {
  std::mt19937_64 gen(3);
  std::bernoulli_distribution coin(0.3);
  int covered = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::uint64_t hits = 0;
    for (int k = 0; k < 200; ++k) hits += coin(gen);
    covered += wilson_interval(hits, 200).contains(0.3);
  }
  CHECK(covered >= 930);
  CHECK(covered <= 970);
}

TEST_CASE("mean and standard error") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto m = mean_se(v);
  CHECK(m.mean == 2.5);
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(m.count == 4);
  const std::vector<double> one{7};
  CHECK(mean_se(one).se == 0.0);
  CHECK(mean_se(one).mean == 7.0);
}

TEST_CASE("KS statistic and p-value") {
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_statistic({0.1, 0.5, 0.9, 0.35, 0.62}, uniform) == doctest::Approx(0.18));
  std::vector<float> f{0.1f, 0.5f, 0.9f, 0.35f, 0.62f};
  CHECK(ks_statistic_inplace(f, uniform) == doctest::Approx(0.18).epsilon(1e-6));
  const double n = 1e8;
  CHECK(ks_pvalue(1.36 / std::sqrt(n), 100000000) == doctest::Approx(0.049485876755377876).epsilon(1e-3));
  CHECK(ks_pvalue(0.8 / std::sqrt(n), 100000000) == doctest::Approx(0.5441424115741981).epsilon(1e-3));
  CHECK(ks_pvalue(0.0, 10) == 1.0);

  std::mt19937_64 gen(9);
  std::exponential_distribution<double> ex(2.0);
  std::vector<double> sample(5000);
  for (auto& x : sample) x = ex(gen);
  const auto cdf = [](double x) { return 1 - std::exp(-2 * x); };
  CHECK(ks_pvalue(ks_statistic(sample, cdf), sample.size()) > 0.01);
  const auto wrong = [](double x) { return 1 - std::exp(-2.5 * x); };
  CHECK(ks_pvalue(ks_statistic(sample, wrong), sample.size()) < 1e-6);
}

TEST_CASE("binomial sign test") {
  CHECK(binomial_upper_tail(8, 10) == doctest::Approx(56.0 / 1024).epsilon(1e-12));
  CHECK(binomial_upper_tail(0, 10) == doctest::Approx(1.0));
  CHECK(binomial_upper_tail(10, 10) == doctest::Approx(1.0 / 1024).epsilon(1e-12));
}

TEST_CASE("Mann-Whitney one-sided p-value") {
  const std::vector<double> a{1.1, 2.3, 0.4, 3.3, 2.2, 1.0, 0.7, 2.2};
  const std::vector<double> b{2.5, 3.1, 4.0, 2.2, 5.1, 3.9, 4.4};
  CHECK(mann_whitney_less_pvalue(a, b) == doctest::Approx(0.0044846945674180015).epsilon(1e-9));
  CHECK(mann_whitney_less_pvalue(b, a) > 0.99);
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 3, 2}) == 2.5);
}
