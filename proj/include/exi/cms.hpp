#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>

namespace exi {

/// Mode of the omega-squared limit law; the default equation target.
inline constexpr double kCmsMode = 0.05;
/// 99.98% quantile of the omega-squared limit law; the default inequality bound.
inline constexpr double kCmsUpper = 1.49;

/// Limit law A1 of the Cramer-von Mises-Smirnov statistic, i.e. the law of
/// the integral of a squared Brownian bridge over [0,1].
///
/// Evaluated through Smirnov's inversion of the characteristic function
/// prod_j (1 - 2it/(j^2 pi^2))^{-1/2}: the CDF is an alternating series of
/// integrals over [(2j-1)pi, 2j pi], each computed with Gauss-Legendre after
/// a cosine substitution that removes the endpoint singularities. The series
/// is truncated once the Gaussian factor drops below 1e-17.
///
/// Instances are immutable and safe to share across threads.
class CmsDistribution {
 public:
  CmsDistribution();

  double cdf(double x) const;
  double pdf(double x) const;
  /// Bisection on the CDF to 1e-10 in x.
  double quantile(double p) const;
  /// Grid search plus golden-section refinement of the pdf on [0.005, 0.5].
  double numeric_mode() const;

 private:
  static constexpr std::size_t kNodes = 40;
  // Nodes/weights on [0, pi] in the substituted variable.
  std::array<double, kNodes> nodes_{};
  std::array<double, kNodes> weights_{};

  template <class Kernel>
  double series(double x, Kernel kernel) const;
};

/// Shared instance.
const CmsDistribution& cms_distribution();

inline double cms_cdf(double x) { return cms_distribution().cdf(x); }
inline double cms_quantile(double p) { return cms_distribution().quantile(p); }
/// The adopted mode value 0.05. CmsDistribution::numeric_mode() verifies it.
inline constexpr double cms_mode() { return kCmsMode; }

struct DiscrepancyStatistic {
  double value = 0.0;
  std::size_t k = 0;
  std::size_t gap_count = 0;
  double theta = 1.0;
  bool corrected = false;
};

/// Normalized omega-squared discrepancy of the model G(t) = 1 - theta e^{-theta t}
/// evaluated on the k largest of L ascending normalized gaps, conditioned on
/// the (L-k)-th order statistic.
///
/// Requires 1 <= k <= L-1 (BadK otherwise) and theta in (0,1].
DiscrepancyStatistic discrepancy_statistic(std::span<const double> sorted_gaps,
                                           std::size_t k, double theta);

/// Small-sample correction (w - 0.4/L + 0.6/L^2)(1 + 1/L), applied only when L < 40.
DiscrepancyStatistic small_sample_correct(const DiscrepancyStatistic& stat);

/// Tail goodness-of-fit statistic built on the k+1 largest order statistics
/// X_{n-k,n} <= ... <= X_{n,n} (given ascending). Under H0: F = F0 its law
/// tends to A1 regardless of k and n.
double tail_gof_statistic(std::span<const double> top_order_stats,
                          const std::function<double(double)>& f0);

/// Convenience wrapper: sorts a copy of the sample and uses its k+1 largest values.
double tail_gof_statistic_from_sample(std::span<const double> sample, std::size_t k,
                                      const std::function<double(double)>& f0);

}  // namespace exi
