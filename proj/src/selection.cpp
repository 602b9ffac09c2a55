#include "exi/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

#include "exi/error.hpp"
#include "exi/parallel.hpp"

namespace exi {
namespace {

std::size_t clamp_k(double raw, std::size_t gap_count) {
  const double hi = static_cast<double>(gap_count - 1);
  if (!(raw >= 1.0)) return 1;
  if (raw >= hi) return gap_count - 1;
  return static_cast<std::size_t>(raw);
}

double pilot_value(const EstimatorSpec& pilot, const GapSample& g) {
  EstimatorSpec spec = pilot;
  // A K0 pilot has no k of its own; use all gaps.
  if (spec.kind == EstimatorSpec::Kind::K0) spec.param = g.gap_count();
  return estimate(spec, g).value;
}

LevelRecord skipped_record(double q, double u, std::size_t K, std::string reason) {
  LevelRecord r;
  r.q = q;
  r.u = u;
  r.K = K;
  r.skipped = true;
  r.skip_reason = std::move(reason);
  return r;
}

// All (u, K) candidates for one threshold.
std::vector<LevelRecord> evaluate_level(const TimeSeries& series, double q, double u,
                                        const SelectionConfig& cfg) {
  const bool kgaps = cfg.estimator.kind == EstimatorSpec::Kind::KGaps;
  const std::vector<std::size_t> ks =
      kgaps ? cfg.k_range : std::vector<std::size_t>{cfg.estimator.param};

  std::vector<LevelRecord> out;
  GapSample g;
  try {
    g = gap_sample(series, u);
  } catch (const Error& e) {
    for (const auto K : ks) out.push_back(skipped_record(q, u, kgaps ? K : 0, e.what()));
    return out;
  }
  const std::size_t L = g.gap_count();
  if (L < 2) {
    for (const auto K : ks) {
      auto r = skipped_record(q, u, kgaps ? K : 0, "L < 2 leaves no admissible k");
      r.exceedances = g.exceedances();
      r.gap_count = L;
      out.push_back(std::move(r));
    }
    return out;
  }

  double pilot = 0.0;
  try {
    pilot = pilot_value(cfg.pilot, g);
  } catch (const Error& e) {
    for (const auto K : ks) out.push_back(skipped_record(q, u, kgaps ? K : 0, e.what()));
    return out;
  }
  const std::size_t k = select_k(cfg.k_rule, L, pilot);
  const std::vector<double> sorted_y = g.sorted_normalized();

  for (const auto K : ks) {
    LevelRecord r;
    r.q = q;
    r.u = u;
    r.K = kgaps ? K : 0;
    r.exceedances = g.exceedances();
    r.gap_count = L;
    r.k = k;
    r.pilot = pilot;
    try {
      std::vector<double> sample;
      switch (cfg.estimator.kind) {
        case EstimatorSpec::Kind::Intervals:
          r.theta = intervals_estimator(g).value;
          break;
        case EstimatorSpec::Kind::K0:
          r.theta = k0_estimator(g, k).value;
          break;
        case EstimatorSpec::Kind::KGaps: {
          const KGapSample kg = k_gap_sample(g, K);
          r.theta = kgaps_estimator(kg).value;
          // K = 0 gaps coincide with Y.
          if (K > 0) sample = kg.sorted_normalized();
          break;
        }
      }
      r.statistic_theta = cfg.statistic_theta == StatisticTheta::Pilot ? pilot : r.theta;
      const auto stat = small_sample_correct(
          discrepancy_statistic(sample.empty() ? sorted_y : sample, k, r.statistic_theta));
      r.statistic = stat.value;
      r.corrected = stat.corrected;
    } catch (const Error& e) {
      r.skipped = true;
      r.skip_reason = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

void push_solution(SelectionResult& res, const LevelRecord& r) {
  Solution s;
  s.q = r.q;
  s.u = r.u;
  s.K = r.K;
  s.k = r.k;
  s.gap_count = r.gap_count;
  s.theta = r.theta;
  s.statistic = r.statistic;
  res.solutions.push_back(s);
}

}  // namespace

std::vector<double> default_levels() {
  std::vector<double> levels;
  for (int i = 0; i < 20; ++i) levels.push_back((900.0 + 5.0 * i) / 1000.0);
  return levels;
}

std::vector<std::size_t> SelectionConfig::default_k_range() {
  // K = 0 is left out: with no zero K-gaps the estimate is pinned near 1.
  std::vector<std::size_t> ks(20);
  std::iota(ks.begin(), ks.end(), std::size_t{1});
  return ks;
}

std::string to_string(const KRule& rule) {
  switch (rule.kind) {
    case KRule::Kind::PilotL: return "pilot_l";
    case KRule::Kind::MinPilotSqrt: return "min_pilot_sqrt";
    case KRule::Kind::LogSquared: return "log_squared";
    case KRule::Kind::FixedTheta: {
      if (rule.from_true_theta) return "fixed:theta";
      char buf[64];
      std::snprintf(buf, sizeof buf, "fixed:%.17g", rule.s);
      return buf;
    }
  }
  return "pilot_l";
}

KRule parse_k_rule(const std::string& text) {
  if (text == "pilot_l") return KRule::pilot_l();
  if (text == "min_pilot_sqrt") return KRule::min_pilot_sqrt();
  if (text == "log_squared") return KRule::log_squared();
  if (text.rfind("fixed:", 0) == 0) {
    const std::string value = text.substr(6);
    if (value == "theta") return KRule::fixed_true_theta();
    char* end = nullptr;
    const double s = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !(s > 0.0 && s <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "fixed k-rule needs s in (0,1], got '" + value + "'");
    }
    return KRule::fixed(s);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown k-rule '" + text + "'");
}

void validate(const SelectionConfig& cfg) {
  if (cfg.levels.empty()) throw Error(ErrorCode::InvalidConfig, "no quantile levels");
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    const double q = cfg.levels[i];
    if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::InvalidConfig, "levels must lie in (0,1)");
    if (i > 0 && !(q > cfg.levels[i - 1])) {
      throw Error(ErrorCode::InvalidConfig, "levels must be strictly increasing");
    }
  }
  if (!(cfg.delta1 > 0.0) || !(cfg.delta2 > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "delta values must be positive");
  }
  if (!(cfg.tolerance >= 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be >= 0");
  if (cfg.estimator.kind == EstimatorSpec::Kind::KGaps && cfg.k_range.empty()) {
    throw Error(ErrorCode::InvalidConfig, "empty K range");
  }
  if (cfg.k_rule.kind == KRule::Kind::FixedTheta && !(cfg.k_rule.s > 0.0 && cfg.k_rule.s <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "fixed k-rule needs s in (0,1]");
  }
  if (!(cfg.w >= 0.0)) throw Error(ErrorCode::InvalidConfig, "w must be >= 0");
}

std::size_t select_k(const KRule& rule, std::size_t gap_count, double pilot_theta) {
  if (gap_count < 2) throw Error(ErrorCode::BadK, "k selection needs L >= 2");
  const auto L = static_cast<double>(gap_count);
  switch (rule.kind) {
    case KRule::Kind::PilotL:
      if (pilot_theta >= 1.0) return gap_count - 1;
      return clamp_k(std::floor(pilot_theta * L), gap_count);
    case KRule::Kind::MinPilotSqrt:
      if (pilot_theta >= 1.0) return gap_count - 1;
      return clamp_k(std::floor(std::min(pilot_theta * L, std::sqrt(L))), gap_count);
    case KRule::Kind::LogSquared: {
      const double lg = std::log(L);
      return clamp_k(std::floor(lg * lg), gap_count);
    }
    case KRule::Kind::FixedTheta:
      return clamp_k(std::floor(rule.s * L), gap_count);
  }
  return 1;
}

std::vector<LevelRecord> scan_thresholds(const TimeSeries& series, const SelectionConfig& cfg) {
  validate(cfg);
  std::vector<double> sorted(series.values().begin(), series.values().end());
  std::sort(sorted.begin(), sorted.end());

  // Distinct thresholds in level order; tied order statistics keep the first level.
  std::vector<std::pair<double, double>> grid;
  for (const double q : cfg.levels) {
    const double u = quantile_threshold_sorted(sorted, q);
    if (!grid.empty() && grid.back().second == u) continue;
    grid.emplace_back(q, u);
  }

  std::vector<std::vector<LevelRecord>> per_level(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
    per_level[i] = evaluate_level(series, grid[i].first, grid[i].second, cfg);
  });

  std::vector<LevelRecord> out;
  for (auto& level : per_level) {
    for (auto& r : level) out.push_back(std::move(r));
  }
  return out;
}

SelectionResult solve_discrepancy(const std::vector<LevelRecord>& records,
                                  const SelectionConfig& cfg) {
  SelectionResult res;
  res.records = records;

  std::vector<bool> chosen(records.size(), false);
  if (cfg.mode == DiscrepancyMode::Inequality) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!records[i].skipped && records[i].statistic <= cfg.delta2) chosen[i] = true;
    }
  } else {
    // Crossings are detected along each K separately, in level order.
    std::vector<std::size_t> Ks;
    for (const auto& r : records) {
      if (std::find(Ks.begin(), Ks.end(), r.K) == Ks.end()) Ks.push_back(r.K);
    }
    for (const auto K : Ks) {
      std::vector<std::size_t> seq;
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].K == K && !records[i].skipped) seq.push_back(i);
      }
      for (std::size_t j = 0; j < seq.size(); ++j) {
        const double d = records[seq[j]].statistic - cfg.delta1;
        if (std::abs(d) <= cfg.tolerance) chosen[seq[j]] = true;
        if (j + 1 < seq.size()) {
          const double e = records[seq[j + 1]].statistic - cfg.delta1;
          if ((d < 0.0 && e > 0.0) || (d > 0.0 && e < 0.0)) {
            chosen[std::abs(e) < std::abs(d) ? seq[j + 1] : seq[j]] = true;
          }
        }
      }
    }
  }

  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (chosen[i]) picked.push_back(i);
  }
  std::stable_sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].u != records[b].u) return records[a].u < records[b].u;
    return records[a].K < records[b].K;
  });
  for (const auto i : picked) push_solution(res, records[i]);

  if (res.solutions.empty()) return res;
  res.empty = false;
  double sum = 0.0;
  for (const auto& s : res.solutions) sum += s.theta;
  res.theta1 = sum / static_cast<double>(res.solutions.size());
  res.theta2 = res.solutions.front().theta;
  const double u_max = res.solutions.back().u;
  for (const auto& s : res.solutions) {
    if (s.u == u_max) {
      res.theta3 = s.theta;
      break;
    }
  }
  return res;
}

SelectionResult run_algorithm(const TimeSeries& series, const SelectionConfig& cfg) {
  return solve_discrepancy(scan_thresholds(series, cfg), cfg);
}

PlateauResult find_plateau(const std::vector<double>& curve, double w) {
  const std::size_t m = curve.size();
  if (m < 3) throw Error(ErrorCode::NoPlateau, "plateau search needs at least 3 curve points");
  const auto d = static_cast<std::size_t>(std::floor(w * static_cast<double>(m)));

  PlateauResult res;
  res.smoothed.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i >= d ? i - d : 0;
    const std::size_t hi = std::min(m - 1, i + d);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += curve[j];
    res.smoothed[i] = sum / static_cast<double>(hi - lo + 1);
  }

  const double mean =
      std::accumulate(res.smoothed.begin(), res.smoothed.end(), 0.0) / static_cast<double>(m);
  double ss = 0.0;
  for (const double v : res.smoothed) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  // The floor absorbs rounding noise of the truncated windows on flat curves.
  double scale = 0.0;
  for (const double v : res.smoothed) scale = std::max(scale, std::abs(v));
  const double band = std::max(2.0 * sd / std::sqrt(static_cast<double>(m)), 1e-12 * scale);

  const auto needed = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m)))));
  std::size_t best_first = 0;
  std::size_t best_len = 0;
  std::size_t first = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    const bool stable = i < m && std::abs(res.smoothed[i] - res.smoothed[i - 1]) <= band;
    if (!stable) {
      const std::size_t len = i - first;
      if (len > best_len) {
        best_len = len;
        best_first = first;
      }
      first = i;
    }
  }
  if (best_len < needed) {
    throw Error(ErrorCode::NoPlateau, "longest stable run has " + std::to_string(best_len) +
                                          " points, need " + std::to_string(needed));
  }
  res.first = best_first;
  res.last = best_first + best_len - 1;
  double sum = 0.0;
  for (std::size_t i = res.first; i <= res.last; ++i) sum += res.smoothed[i];
  res.value = sum / static_cast<double>(best_len);
  return res;
}

ThetaEstimate plateau_a1(const TimeSeries& series, const std::vector<double>& levels, double w) {
  std::vector<double> sorted(series.values().begin(), series.values().end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> curve;
  std::vector<double> thresholds;
  std::vector<std::size_t> gap_counts;
  double last_u = std::numeric_limits<double>::quiet_NaN();
  for (const double q : levels) {
    const double u = quantile_threshold_sorted(sorted, q);
    if (u == last_u) continue;
    last_u = u;
    try {
      const GapSample g = gap_sample(series, u);
      curve.push_back(intervals_estimator(g).value);
      thresholds.push_back(u);
      gap_counts.push_back(g.gap_count());
    } catch (const Error&) {
      // Levels without two exceedances do not contribute to the curve.
    }
  }
  const PlateauResult plateau = find_plateau(curve, w);

  ThetaEstimate est;
  est.value = plateau.value;
  est.estimator = EstimatorSpec::intervals();
  est.threshold = thresholds[plateau.first];
  est.gap_count = gap_counts[plateau.first];
  return est;
}

}  // namespace exi
