#include "exi/cms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "exi/error.hpp"

namespace exi {
namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
template <std::size_t N>
void gauss_legendre(std::array<double, N>& x, std::array<double, N>& w) {
  for (std::size_t i = 0; i < N; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (std::size_t k = 2; k <= N; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(N) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

CmsDistribution::CmsDistribution() {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};
  gauss_legendre(x, w);
  for (std::size_t i = 0; i < kNodes; ++i) {
    nodes_[i] = 0.5 * kPi * (x[i] + 1.0);
    weights_[i] = 0.5 * kPi * w[i];
  }
}

// Sum_j (-1)^{j+1} Int_{(2j-1)pi}^{2j pi} kernel(s) sqrt(-s / sin s) e^{-s^2 x/2} ds.
// With s = (2j-1)pi + delta and delta = pi sin^2(phi/2), sin s = -sin(delta).
template <class Kernel>
double CmsDistribution::series(double x, Kernel kernel) const {
  CompensatedSum total;
  for (int j = 1; j < 5000; ++j) {
    const double a = (2.0 * j - 1.0) * kPi;
    if (j > 1 && std::exp(-a * a * x / 2.0) < 1e-17) break;
    double term = 0.0;
    for (std::size_t i = 0; i < kNodes; ++i) {
      const double phi = nodes_[i];
      const double half = std::sin(phi / 2.0);
      const double delta = kPi * half * half;
      const double s = a + delta;
      const double ds = 0.5 * kPi * std::sin(phi);
      const double root = std::sqrt(s / std::sin(delta));
      term += weights_[i] * kernel(s) * root * std::exp(-s * s * x / 2.0) * ds;
    }
    total.add(j % 2 == 1 ? term : -term);
  }
  return total.value();
}

double CmsDistribution::cdf(double x) const {
  if (!(x > 1e-3)) return 0.0;  // A1(1e-3) is below 1e-54
  const double tail = series(x, [](double s) { return 2.0 / s; }) / kPi;
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

double CmsDistribution::pdf(double x) const {
  if (!(x > 1e-3)) return 0.0;
  return std::max(0.0, series(x, [](double s) { return s; }) / kPi);
}

double CmsDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "quantile probability must lie in (0,1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (cdf(hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) return hi;
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double CmsDistribution::numeric_mode() const {
  double best_x = 0.005;
  double best = pdf(best_x);
  for (double x = 0.005; x <= 0.5; x += 0.001) {
    const double v = pdf(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  double lo = std::max(0.004, best_x - 0.001);
  double hi = best_x + 0.001;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  while (hi - lo > 1e-9) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (pdf(m1) < pdf(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return 0.5 * (lo + hi);
}

const CmsDistribution& cms_distribution() {
  static const CmsDistribution instance;
  return instance;
}

DiscrepancyStatistic discrepancy_statistic(std::span<const double> sorted_gaps,
                                           std::size_t k, double theta) {
  const std::size_t L = sorted_gaps.size();
  if (k < 1 || k + 1 > L) {
    throw Error(ErrorCode::BadK, "discrepancy needs 1 <= k <= L-1, got k=" +
                                     std::to_string(k) + ", L=" + std::to_string(L));
  }
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "theta must lie in (0,1]");
  }
  const auto model = [theta](double y) { return 1.0 - theta * std::exp(-y * theta); };
  const double anchor = model(sorted_gaps[L - k - 1]);
  const double span = 1.0 - anchor;
  if (!(span > 0.0) || !std::isfinite(span)) {
    throw Error(ErrorCode::NonFinite, "1 - t_k is not positive");
  }
  const auto kd = static_cast<double>(k);
  CompensatedSum sum;
  for (std::size_t j = 1; j <= k; ++j) {
    const double plotting = (static_cast<double>(j) - 0.5) / kd;
    const double d = model(sorted_gaps[L - k - 1 + j]) - anchor - plotting * span;
    sum.add(d * d);
  }
  DiscrepancyStatistic out;
  out.value = sum.value() / (span * span) + 1.0 / (12.0 * kd);
  out.k = k;
  out.gap_count = L;
  out.theta = theta;
  if (!std::isfinite(out.value)) throw Error(ErrorCode::NonFinite, "statistic overflow");
  return out;
}

DiscrepancyStatistic small_sample_correct(const DiscrepancyStatistic& stat) {
  if (stat.gap_count >= 40 || stat.gap_count == 0) return stat;
  const auto L = static_cast<double>(stat.gap_count);
  DiscrepancyStatistic out = stat;
  out.value = (stat.value - 0.4 / L + 0.6 / (L * L)) * (1.0 + 1.0 / L);
  out.corrected = true;
  return out;
}

double tail_gof_statistic(std::span<const double> top_order_stats,
                          const std::function<double(double)>& f0) {
  if (top_order_stats.size() < 2) {
    throw Error(ErrorCode::InvalidParams, "tail statistic needs k >= 1");
  }
  const std::size_t k = top_order_stats.size() - 1;
  const double base = f0(top_order_stats[0]);
  const double span = 1.0 - base;
  if (!(span > 0.0)) {
    throw Error(ErrorCode::DegenerateTail, "F0 equals 1 at the conditioning order statistic");
  }
  const auto kd = static_cast<double>(k);
  CompensatedSum sum;
  // top_order_stats[k - i] is X_{n-i,n}.
  for (std::size_t i = 0; i < k; ++i) {
    const double ratio = (f0(top_order_stats[k - i]) - base) / span;
    const double d = ratio - (static_cast<double>(k - i) - 0.5) / kd;
    sum.add(d * d);
  }
  return sum.value() + 1.0 / (12.0 * kd);
}

double tail_gof_statistic_from_sample(std::span<const double> sample, std::size_t k,
                                      const std::function<double(double)>& f0) {
  if (k < 1 || k + 1 > sample.size()) {
    throw Error(ErrorCode::BadK, "tail statistic needs 1 <= k <= n-1");
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return tail_gof_statistic(std::span<const double>(sorted).last(k + 1), f0);
}

}  // namespace exi
