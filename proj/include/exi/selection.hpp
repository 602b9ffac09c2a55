#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "exi/cms.hpp"
#include "exi/estimators.hpp"
#include "exi/series.hpp"

namespace exi {

/// How many of the largest normalized gaps enter the discrepancy statistic.
struct KRule {
  enum class Kind { PilotL, MinPilotSqrt, LogSquared, FixedTheta };

  Kind kind = Kind::PilotL;
  /// Fraction s for FixedTheta (k = floor(s L)).
  double s = 1.0;
  /// FixedTheta whose s is to be replaced by a process's true theta
  /// ("fixed:theta"); resolved by the benchmark harness.
  bool from_true_theta = false;

  static KRule pilot_l() { return {Kind::PilotL, 1.0, false}; }
  static KRule min_pilot_sqrt() { return {Kind::MinPilotSqrt, 1.0, false}; }
  static KRule log_squared() { return {Kind::LogSquared, 1.0, false}; }
  static KRule fixed(double s) { return {Kind::FixedTheta, s, false}; }
  static KRule fixed_true_theta() { return {Kind::FixedTheta, 1.0, true}; }
};

/// "pilot_l", "min_pilot_sqrt", "log_squared", "fixed:<s>", "fixed:theta".
std::string to_string(const KRule& rule);
KRule parse_k_rule(const std::string& text);

enum class DiscrepancyMode { Equation, Inequality };

/// Which theta is plugged into the discrepancy statistic.
enum class StatisticTheta {
  Pilot,   // the pilot estimate at the same threshold (intervals by default)
  Target,  // the estimator being tuned
};

std::vector<double> default_levels();

struct SelectionConfig {
  std::vector<double> levels = default_levels();
  DiscrepancyMode mode = DiscrepancyMode::Equation;
  double delta1 = kCmsMode;
  double delta2 = kCmsUpper;
  KRule k_rule = KRule::pilot_l();
  EstimatorSpec estimator = EstimatorSpec::intervals();
  /// K values examined for the K-gaps estimator.
  std::vector<std::size_t> k_range = default_k_range();
  EstimatorSpec pilot = EstimatorSpec::intervals();
  StatisticTheta statistic_theta = StatisticTheta::Pilot;
  /// Equation mode: |stat - delta1| <= tolerance also counts as a root.
  double tolerance = 0.0;
  /// Bandwidth fraction for the plateau baseline.
  double w = 0.25;
  /// Worker threads for the level scan (results do not depend on it).
  std::size_t threads = 1;

  static std::vector<std::size_t> default_k_range();
};

/// Throws Error{InvalidConfig} on unordered levels, non-positive deltas, etc.
void validate(const SelectionConfig& cfg);

/// One (threshold, K) candidate of the scan.
struct LevelRecord {
  double q = 0.0;
  double u = 0.0;
  std::size_t K = 0;
  std::size_t exceedances = 0;
  std::size_t gap_count = 0;
  std::size_t k = 0;
  double pilot = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  double statistic_theta = std::numeric_limits<double>::quiet_NaN();
  double statistic = std::numeric_limits<double>::quiet_NaN();
  bool corrected = false;
  bool skipped = false;
  std::string skip_reason;
};

struct Solution {
  double q = 0.0;
  double u = 0.0;
  std::size_t K = 0;
  std::size_t k = 0;
  std::size_t gap_count = 0;
  double theta = 0.0;
  double statistic = 0.0;
};

struct SelectionResult {
  /// Ordered by threshold, then K.
  std::vector<Solution> solutions;
  double theta1 = std::numeric_limits<double>::quiet_NaN();
  double theta2 = std::numeric_limits<double>::quiet_NaN();
  double theta3 = std::numeric_limits<double>::quiet_NaN();
  bool empty = true;
  /// The scan the solutions were drawn from.
  std::vector<LevelRecord> records;
};

/// k for a gap count L >= 2, clamped to [1, L-1]. For the pilot-based rules a
/// pilot of 1 gives k = L - 1.
std::size_t select_k(const KRule& rule, std::size_t gap_count, double pilot_theta);

/// Evaluates every distinct threshold of the quantile grid. Infeasible levels
/// are recorded with skipped = true and a reason rather than thrown.
std::vector<LevelRecord> scan_thresholds(const TimeSeries& series, const SelectionConfig& cfg);

/// Picks the solutions of the discrepancy equation or inequality among the
/// scanned records and aggregates them. empty is set when there are none.
SelectionResult solve_discrepancy(const std::vector<LevelRecord>& records,
                                  const SelectionConfig& cfg);

SelectionResult run_algorithm(const TimeSeries& series, const SelectionConfig& cfg);

/// Plateau-finding baseline applied to an estimate-vs-level curve.
///
/// The curve is smoothed by a centred moving average of 2d+1 points with
/// d = floor(w m), m the curve length (windows are truncated at the ends).
/// Consecutive smoothed points whose difference is at most
/// 2 sd(smoothed) / sqrt(m) are stable; the longest stable run with at least
/// max(3, ceil(sqrt m)) points is the plateau and its mean is returned.
/// Throws Error{NoPlateau} when no run is long enough.
struct PlateauResult {
  double value = 0.0;
  std::size_t first = 0;
  std::size_t last = 0;
  std::vector<double> smoothed;
};
PlateauResult find_plateau(const std::vector<double>& curve, double w);

/// Intervals estimates over the quantile grid fed into find_plateau.
ThetaEstimate plateau_a1(const TimeSeries& series, const std::vector<double>& levels,
                         double w);

}  // namespace exi
