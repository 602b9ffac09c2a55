#include "exi/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "exi/error.hpp"

namespace exi {

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw Error(ErrorCode::InvalidSeries, "series needs at least 2 values, got " +
                                              std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::InvalidSeries,
                  "non-finite value at position " + std::to_string(i + 1));
    }
  }
}

std::vector<double> GapSample::sorted_normalized() const {
  std::vector<double> out = normalized;
  std::sort(out.begin(), out.end());
  return out;
}

double KGapSample::normalized_sum() const noexcept {
  return std::accumulate(normalized.begin(), normalized.end(), 0.0);
}

std::vector<double> KGapSample::sorted_normalized() const {
  std::vector<double> out = normalized;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> exceedance_indices(const TimeSeries& series, double u) {
  std::vector<std::size_t> out;
  const auto values = series.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > u) out.push_back(i + 1);
  }
  return out;
}

GapSample gap_sample_from_indices(std::vector<std::size_t> indices, std::size_t n,
                                  double u) {
  if (indices.size() < 2) {
    throw Error(ErrorCode::TooFewExceedances,
                std::to_string(indices.size()) + " exceedance(s) of threshold " +
                    std::to_string(u));
  }
  GapSample g;
  g.threshold = u;
  g.n = n;
  g.exceedance_indices = std::move(indices);
  const double scale = g.tail_fraction();
  g.gaps.reserve(g.exceedance_indices.size() - 1);
  g.normalized.reserve(g.exceedance_indices.size() - 1);
  for (std::size_t i = 0; i + 1 < g.exceedance_indices.size(); ++i) {
    const std::size_t t = g.exceedance_indices[i + 1] - g.exceedance_indices[i];
    g.gaps.push_back(t);
    g.normalized.push_back(scale * static_cast<double>(t));
  }
  return g;
}

GapSample gap_sample(const TimeSeries& series, double u) {
  return gap_sample_from_indices(exceedance_indices(series, u), series.size(), u);
}

KGapSample k_gap_sample(const GapSample& g, std::size_t K) {
  KGapSample kg;
  kg.K = K;
  kg.n = g.n;
  kg.exceedances = g.exceedances();
  const double scale = g.tail_fraction();
  kg.gaps.reserve(g.gaps.size());
  kg.normalized.reserve(g.gaps.size());
  for (const std::size_t t : g.gaps) {
    const std::size_t s = t > K ? t - K : 0;
    kg.gaps.push_back(s);
    kg.normalized.push_back(scale * static_cast<double>(s));
    if (s > 0) ++kg.clusters;
  }
  return kg;
}

double quantile_threshold_sorted(std::span<const double> sorted, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "quantile level must lie in (0,1)");
  }
  const auto n = static_cast<double>(sorted.size());
  // The 1e-9 slack keeps e.g. 0.95*100 from rounding up to 96.
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double quantile_threshold(const TimeSeries& series, double q) {
  std::vector<double> sorted(series.values().begin(), series.values().end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_threshold_sorted(sorted, q);
}

}  // namespace exi
