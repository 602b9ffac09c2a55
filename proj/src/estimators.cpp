#include "exi/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "exi/error.hpp"

namespace exi {

std::string to_string(EstimatorSpec::Kind kind) {
  switch (kind) {
    case EstimatorSpec::Kind::Intervals: return "intervals";
    case EstimatorSpec::Kind::KGaps: return "kgaps";
    case EstimatorSpec::Kind::K0: return "k0";
  }
  return "intervals";
}

EstimatorSpec::Kind parse_estimator_kind(const std::string& text) {
  if (text == "intervals") return EstimatorSpec::Kind::Intervals;
  if (text == "kgaps") return EstimatorSpec::Kind::KGaps;
  if (text == "k0") return EstimatorSpec::Kind::K0;
  throw Error(ErrorCode::InvalidConfig, "unknown estimator '" + text + "'");
}

ThetaEstimate intervals_estimator(std::span<const std::size_t> gaps) {
  if (gaps.empty()) throw Error(ErrorCode::EmptyGaps, "no inter-exceedance times");
  const auto L = static_cast<double>(gaps.size());
  const std::size_t max_gap = *std::max_element(gaps.begin(), gaps.end());

  double num = 0.0;
  double den = 0.0;
  if (max_gap <= 2) {
    double sum = 0.0;
    for (const auto t : gaps) {
      const auto x = static_cast<double>(t);
      sum += x;
      den += x * x;
    }
    num = 2.0 * sum * sum;
  } else {
    double sum = 0.0;
    for (const auto t : gaps) {
      const auto x = static_cast<double>(t);
      sum += x - 1.0;
      den += (x - 1.0) * (x - 2.0);
    }
    num = 2.0 * sum * sum;
  }
  den *= L;
  if (den == 0.0) {
    throw Error(ErrorCode::DegenerateDenominator, "intervals estimator denominator is 0");
  }

  ThetaEstimate est;
  est.estimator = EstimatorSpec::intervals();
  est.gap_count = gaps.size();
  const double raw = num / den;
  est.clipped = raw > 1.0;
  est.value = std::min(1.0, raw);
  return est;
}

ThetaEstimate intervals_estimator(const GapSample& g) {
  ThetaEstimate est = intervals_estimator(std::span<const std::size_t>(g.gaps));
  est.threshold = g.threshold;
  return est;
}

ThetaEstimate kgaps_from_counts(std::size_t gap_count, std::size_t clusters,
                                double normalized_sum) {
  if (clusters == 0) throw Error(ErrorCode::NoClusters, "all K-gaps are zero");
  if (!(normalized_sum > 0.0)) {
    throw Error(ErrorCode::ZeroNormalizedSum, "normalized K-gap sum is not positive");
  }
  const double a = static_cast<double>(gap_count) - static_cast<double>(clusters);
  const double b = 2.0 * static_cast<double>(clusters);
  const double c = normalized_sum;
  const double p = (a + b) / c + 1.0;
  double disc = p * p - 4.0 * b / c;
  if (disc < 0.0) {
    if (disc < -1e-12) {
      throw Error(ErrorCode::NonFinite, "negative K-gaps discriminant");
    }
    disc = 0.0;
  }
  const double raw = 0.5 * (p - std::sqrt(disc));

  ThetaEstimate est;
  est.gap_count = gap_count;
  est.clipped = raw > 1.0;
  est.value = std::min(1.0, raw);
  if (!(est.value > 0.0)) {
    throw Error(ErrorCode::NonFinite, "K-gaps estimate is not positive");
  }
  return est;
}

ThetaEstimate kgaps_estimator(const KGapSample& kg) {
  ThetaEstimate est = kgaps_from_counts(kg.gap_count(), kg.clusters, kg.normalized_sum());
  est.estimator = EstimatorSpec::kgaps(kg.K);
  return est;
}

ThetaEstimate k0_estimator(const GapSample& g, std::size_t k) {
  if (k < 1 || k > g.gap_count()) {
    throw Error(ErrorCode::BadK, "K0 requires 1 <= k <= L, got k=" + std::to_string(k) +
                                     ", L=" + std::to_string(g.gap_count()));
  }
  double c = 0.0;
  for (const double y : g.normalized) c += y;
  ThetaEstimate est = kgaps_from_counts(g.gap_count(), k, c);
  est.estimator = EstimatorSpec::k0(k);
  est.threshold = g.threshold;
  return est;
}

ThetaEstimate estimate(const EstimatorSpec& spec, const GapSample& g) {
  switch (spec.kind) {
    case EstimatorSpec::Kind::Intervals:
      return intervals_estimator(g);
    case EstimatorSpec::Kind::KGaps: {
      ThetaEstimate est = kgaps_estimator(k_gap_sample(g, spec.param));
      est.threshold = g.threshold;
      return est;
    }
    case EstimatorSpec::Kind::K0:
      return k0_estimator(g, spec.param);
  }
  return intervals_estimator(g);
}

}  // namespace exi
