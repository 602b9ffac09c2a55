#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "exi/series.hpp"

namespace exi {

/// Which extremal-index estimator to apply at a fixed threshold.
struct EstimatorSpec {
  enum class Kind { Intervals, KGaps, K0 };

  Kind kind = Kind::Intervals;
  /// K for KGaps; the forced cluster count k for K0 when used standalone.
  std::size_t param = 0;

  static EstimatorSpec intervals() { return {Kind::Intervals, 0}; }
  static EstimatorSpec kgaps(std::size_t K) { return {Kind::KGaps, K}; }
  static EstimatorSpec k0(std::size_t k = 0) { return {Kind::K0, k}; }

  friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

/// "intervals", "kgaps", "k0".
std::string to_string(EstimatorSpec::Kind kind);
EstimatorSpec::Kind parse_estimator_kind(const std::string& text);

struct ThetaEstimate {
  double value = 1.0;
  EstimatorSpec estimator;
  double threshold = 0.0;
  std::size_t gap_count = 0;
  /// Set when the raw formula exceeded 1 and the value was clipped.
  bool clipped = false;
};

/// Intervals estimator from inter-exceedance times in any order.
///
/// Uses the squared-sum / sum-of-squares ratio when max T <= 2 and the
/// bias-corrected (T-1)(T-2) form otherwise; both branches are capped at 1.
/// Throws EmptyGaps on an empty input and DegenerateDenominator if the
/// applicable denominator vanishes.
ThetaEstimate intervals_estimator(std::span<const std::size_t> gaps);
ThetaEstimate intervals_estimator(const GapSample& g);

/// Closed-form maximum-likelihood K-gaps estimate; depends on the data only
/// through the gap count, the number of non-zero K-gaps and their normalized
/// sum.
ThetaEstimate kgaps_from_counts(std::size_t gap_count, std::size_t clusters,
                                double normalized_sum);

ThetaEstimate kgaps_estimator(const KGapSample& kg);

/// K-gaps formula with K = 0 (c = sum of Y) and the cluster count forced to k.
/// Throws BadK unless 1 <= k <= L.
ThetaEstimate k0_estimator(const GapSample& g, std::size_t k);

/// Dispatch on spec.kind. For K0 the spec's param is used as k.
ThetaEstimate estimate(const EstimatorSpec& spec, const GapSample& g);

}  // namespace exi
