#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "exi/cms.hpp"
#include "exi/error.hpp"
#include "exi/rng.hpp"
#include "exi/series.hpp"
#include "exi/simulators.hpp"
#include "oracles.hpp"

using namespace exi;

TEST_CASE("limit law CDF basics") {
  const auto& a1 = cms_distribution();
  CHECK(a1.cdf(0.0) == 0.0);
  CHECK(a1.cdf(-1.0) == 0.0);
  CHECK(a1.cdf(1.49) == doctest::Approx(0.9998).epsilon(5e-4));
  CHECK(a1.cdf(5.0) == doctest::Approx(1.0).epsilon(1e-10));
  double prev = 0.0;
  for (double x = 0.005; x < 3.0; x += 0.005) {
    const double c = a1.cdf(x);
    CHECK(c >= prev - 1e-15);
    prev = c;
  }
}

TEST_CASE("limit law CDF agrees with the Bessel series") {
  for (double x : {0.02, 0.05, 0.1, 0.1188, 0.2, 0.35, 0.5, 0.8, 1.2, 1.49, 2.0}) {
    CAPTURE(x);
    CHECK(cms_cdf(x) == doctest::Approx(oracle::cms_cdf_bessel(x)).epsilon(1e-9));
  }
}

TEST_CASE("pdf is the derivative of the CDF") {
  const auto& a1 = cms_distribution();
  for (double x : {0.03, 0.06, 0.15, 0.4, 1.0}) {
    const double h = 1e-5;
    const double fd = (a1.cdf(x + h) - a1.cdf(x - h)) / (2 * h);
    CHECK(a1.pdf(x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("quantile round trip") {
  for (int i = 0; i < 50; ++i) {
    const double p = 0.01 + (0.999 - 0.01) * i / 49.0;
    CAPTURE(p);
    CHECK(cms_cdf(cms_quantile(p)) == doctest::Approx(p).epsilon(1e-6));
  }
  CHECK(cms_quantile(cms_cdf(0.3)) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK_THROWS_AS(cms_quantile(1.0), Error);
}

TEST_CASE("moments from the CDF match the integrals of a squared bridge") {
  // E int B^2 = int t(1-t) dt = 1/6, Var = 1/45.
  const auto& a1 = cms_distribution();
  const double mean = oracle::integrate([&](double x) { return 1.0 - a1.cdf(x); }, 0.0, 6.0, 600);
  const double second =
      oracle::integrate([&](double x) { return 2.0 * x * (1.0 - a1.cdf(x)); }, 0.0, 6.0, 600);
  CHECK(mean == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
  CHECK(second - mean * mean == doctest::Approx(1.0 / 45.0).epsilon(1e-5));
}

TEST_CASE("median matches Brownian bridge Monte Carlo") {
  const double median = cms_quantile(0.5);
  CHECK(cms_cdf(median) == doctest::Approx(0.5).epsilon(1e-6));
  auto sims = oracle::bridge_integrals(20000, 500, 4);
  std::nth_element(sims.begin(), sims.begin() + 10000, sims.end());
  // Discretization bias is O(1/grid); sampling sd of the median is about 0.0006.
  CHECK(std::abs(sims[10000] - median) < 0.004);
}

TEST_CASE("mode") {
  CHECK(cms_mode() == 0.05);
  const double m = cms_distribution().numeric_mode();
  CHECK(m >= 0.04);
  CHECK(m <= 0.06);
  const auto& a1 = cms_distribution();
  CHECK(a1.pdf(m) >= a1.pdf(m - 0.005));
  CHECK(a1.pdf(m) >= a1.pdf(m + 0.005));
}

TEST_CASE("discrepancy statistic examples") {
  const std::vector<double> y{0.0, std::log(2.0)};
  const DiscrepancyStatistic s = discrepancy_statistic(y, 1, 1.0);
  CHECK(s.value == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(s.k == 1);
  CHECK(s.gap_count == 2);

  // Model values exactly on the plotting positions: only 1/(12k) remains.
  const double theta = 0.6;
  const std::size_t k = 4;
  const double base = 0.3;
  const double tk = 1.0 - theta * std::exp(-theta * base);
  std::vector<double> yy{0.1, base};
  for (std::size_t j = 1; j <= k; ++j) {
    const double target = tk + (j - 0.5) / k * (1.0 - tk);
    yy.push_back(-std::log((1.0 - target) / theta) / theta);
  }
  CHECK(discrepancy_statistic(yy, k, theta).value == doctest::Approx(1.0 / (12.0 * k)).epsilon(1e-12));

  CHECK_THROWS_AS(discrepancy_statistic(y, 2, 1.0), Error);
  CHECK_THROWS_AS(discrepancy_statistic(y, 0, 1.0), Error);
}

TEST_CASE("discrepancy statistic matches brute force and ignores input order") {
  Philox4x64 eng(77);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t L = 2 + uniform_index(eng, 60);
    std::vector<double> y(L);
    for (auto& v : y) v = -std::log(uniform_open(eng)) * 2.0;
    const std::size_t k = 1 + uniform_index(eng, L - 1);
    const double theta = 0.05 + 0.95 * uniform_open(eng);
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const double v = discrepancy_statistic(sorted, k, theta).value;
    const double o = static_cast<double>(oracle::statistic(y, k, theta));
    CHECK(std::abs(v - o) / o < 1e-12);
  }
}

TEST_CASE("small-sample correction") {
  DiscrepancyStatistic s;
  s.value = 0.1;
  s.gap_count = 20;
  const auto c = small_sample_correct(s);
  CHECK(c.value == doctest::Approx(0.085575).epsilon(1e-14));
  CHECK(c.corrected);
  s.gap_count = 40;
  CHECK(small_sample_correct(s).value == 0.1);
  CHECK_FALSE(small_sample_correct(s).corrected);
  s.gap_count = 10;
  s.value = 0.4 / 10 - 0.6 / 100;
  CHECK(std::abs(small_sample_correct(s).value) < 1e-15);
}

TEST_CASE("statistic under the model follows the limit law") {
  // ARMAX with theta = 0.75 at k = floor(sqrt L), well inside k/L < theta.
  std::vector<double> stats;
  for (std::uint64_t r = 0; r < 200; ++r) {
    const TimeSeries s = simulate(ProcessSpec::armax(0.25), 100000, derive_seed(808, r));
    const GapSample g = gap_sample(s, quantile_threshold(s, 0.98));
    const auto y = g.sorted_normalized();
    const auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(y.size())));
    stats.push_back(small_sample_correct(discrepancy_statistic(y, k, 0.75)).value);
  }
  const double d = oracle::ks_statistic(stats, [](double x) { return cms_cdf(x); });
  CHECK(oracle::ks_pvalue(d, stats.size()) > 0.01);
}

TEST_CASE("tail statistic examples") {
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const std::vector<double> top{0.5, 0.75};
  CHECK(tail_gof_statistic(top, uniform) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));

  // Ratios on the plotting positions (j - 0.5)/k above base 0.2.
  const std::size_t k = 5;
  std::vector<double> on{0.2};
  for (std::size_t j = 1; j <= k; ++j) on.push_back(0.2 + 0.8 * (j - 0.5) / k);
  CHECK(tail_gof_statistic(on, uniform) == doctest::Approx(1.0 / 60.0).epsilon(1e-12));

  CHECK_THROWS_AS(tail_gof_statistic(std::vector<double>{1.0, 1.0}, uniform), Error);
  CHECK_THROWS_AS(tail_gof_statistic_from_sample(top, 2, uniform), Error);
}

TEST_CASE("tail statistic is invariant under a joint monotone transform") {
  Philox4x64 eng(3);
  std::vector<double> x(2000);
  for (auto& v : x) v = uniform_open(eng);
  std::vector<double> ex = x;
  for (auto& v : ex) v = std::exp(3.0 * v);
  const auto f = [](double v) { return v; };
  const auto g = [](double v) { return std::log(v) / 3.0; };
  CHECK(tail_gof_statistic_from_sample(ex, 50, g) ==
        doctest::Approx(tail_gof_statistic_from_sample(x, 50, f)).epsilon(1e-9));
}
