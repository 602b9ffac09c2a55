#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace exi {

/// A finite stationary sample X_1..X_n, n >= 2.
class TimeSeries {
 public:
  /// Throws Error{InvalidSeries} when fewer than two values or any value is
  /// not finite.
  explicit TimeSeries(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Exceedance bookkeeping for one threshold.
///
/// Indices are 1-based positions S_1 < ... < S_N. Gaps T_i = S_{i+1} - S_i are
/// kept in observation order; the normalized gaps are Y_i = (N/n) T_i.
struct GapSample {
  double threshold = 0.0;
  std::size_t n = 0;
  std::vector<std::size_t> exceedance_indices;
  std::vector<std::size_t> gaps;
  std::vector<double> normalized;

  std::size_t exceedances() const noexcept { return exceedance_indices.size(); }
  std::size_t gap_count() const noexcept { return gaps.size(); }
  /// Empirical tail probability N/n.
  double tail_fraction() const noexcept {
    return static_cast<double>(exceedances()) / static_cast<double>(n);
  }
  /// Normalized gaps sorted ascending.
  std::vector<double> sorted_normalized() const;
};

/// K-gaps max(T_i - K, 0), their normalized values and the cluster count N_C.
struct KGapSample {
  std::size_t K = 0;
  std::size_t n = 0;
  std::size_t exceedances = 0;
  std::vector<std::size_t> gaps;
  std::vector<double> normalized;
  std::size_t clusters = 0;

  std::size_t gap_count() const noexcept { return gaps.size(); }
  /// c = sum of normalized K-gaps.
  double normalized_sum() const noexcept;
  std::vector<double> sorted_normalized() const;
};

/// All 1-based positions with X_i > u.
std::vector<std::size_t> exceedance_indices(const TimeSeries& series, double u);

/// Throws Error{TooFewExceedances} when fewer than two values exceed u.
GapSample gap_sample(const TimeSeries& series, double u);

/// Builds the sample directly from exceedance positions of a length-n series.
GapSample gap_sample_from_indices(std::vector<std::size_t> indices, std::size_t n,
                                  double u = 0.0);

KGapSample k_gap_sample(const GapSample& g, std::size_t K);

/// Inverse-CDF order statistic X_{ceil(q n), n}; no interpolation.
double quantile_threshold(const TimeSeries& series, double q);

/// Same as above on an already ascending-sorted copy of the data.
double quantile_threshold_sorted(std::span<const double> sorted, double q);

}  // namespace exi
