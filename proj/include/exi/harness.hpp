#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "exi/config.hpp"
#include "exi/selection.hpp"
#include "exi/simulators.hpp"

namespace exi {

/// One estimator configuration of a benchmark, e.g. "Table3/theta*".
struct Variant {
  enum class Method { Discrepancy, Plateau };

  std::string name;
  Method method = Method::Discrepancy;
  SelectionConfig selection;
};

struct PlannedProcess {
  std::string name;
  ProcessSpec spec;
};

struct ExperimentPlan {
  std::vector<PlannedProcess> processes;
  std::vector<Variant> variants;
  std::size_t n = 5000;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
};

/// Sample size and replication count used by the published tables.
inline constexpr std::size_t kPaperScaleN = 100000;
inline constexpr std::size_t kPaperScaleReps = 1000;

/// Global keys: n, reps, seed. Sections `[process NAME]` take process keys,
/// sections `[variant NAME]` take selection keys plus `method = discrepancy|plateau`.
ExperimentPlan plan_from(const std::vector<KeyValueSection>& sections);
ExperimentPlan load_plan(const std::filesystem::path& path);

/// Outcome of one variant on one simulated series.
struct ReplicationRecord {
  std::uint64_t seed = 0;
  std::string process;
  std::string variant;
  std::size_t replication = 0;
  double true_theta = 1.0;
  /// Gap counts L at each solution threshold.
  std::vector<std::size_t> solution_gap_counts;
  std::array<double, 3> theta{};
  bool failed = false;
};

/// Error summary of one (process, variant, estimate) cell.
struct CellSummary {
  std::string process;
  std::string variant;
  /// 1, 2 or 3 for theta1..theta3.
  int estimate = 1;
  double true_theta = 1.0;
  double rmse = 0.0;
  double bias = 0.0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  double mean_solutions = 0.0;

  double rmse_e4() const { return rmse * 1e4; }
  double abs_bias_e4() const;
  double failure_rate() const;
};

/// theta(u) against q for one scan, kept for plotting.
struct Curve {
  std::string process;
  std::string variant;
  std::vector<LevelRecord> records;
};

struct MCReport {
  std::vector<CellSummary> cells;
  std::vector<ReplicationRecord> replications;
  std::vector<Curve> curves;
};

/// Simulates every (process, replication) with seed
/// derive_seed(derive_seed(master, process index), replication) and runs all
/// variants on the same series. The report does not depend on `threads`.
MCReport run_experiment(const ExperimentPlan& plan, std::size_t threads = 1);

/// RMSE = sqrt(mean (est - theta)^2) and bias = mean(est) - theta over the
/// successful replications of each cell; cells keep first-appearance order.
/// Plateau variants report only their single estimate (estimate 1).
std::vector<CellSummary> summarize(const std::vector<ReplicationRecord>& records,
                                   const std::vector<std::string>& single_estimate_variants = {});

enum class TableFormat { Csv, Tsv };
char delimiter(TableFormat format);

/// Rows are (variant, estimate); each process contributes four columns:
/// RMSE*1e4, |Bias|*1e4, failure rate and mean solution count. Cells whose
/// replications all failed print "-".
void write_table(std::ostream& out, const MCReport& report, TableFormat format);
void write_replication_log(std::ostream& out, const std::vector<ReplicationRecord>& records,
                           TableFormat format);
std::vector<ReplicationRecord> read_replication_log(std::istream& in, TableFormat format);
void write_curves(std::ostream& out, const std::vector<Curve>& curves, TableFormat format);

/// Writes the table to `path`, the log to `<stem>.replications<ext>` and the
/// curves to `<stem>.curves<ext>` next to it. Throws Error{IoError}.
void emit_report(const MCReport& report, const std::filesystem::path& path, TableFormat format);

enum class MissingPolicy { Drop, Error };

struct Ingested {
  std::vector<double> values;
  std::size_t dropped = 0;
  std::size_t rows = 0;
};

/// Reads one numeric column from a delimited text table with a header line.
/// The delimiter is the first of ',', '\t', ';' found in the header, else
/// whitespace. `column` is a header name or, failing that, a 0-based index.
/// Empty, NA/NaN and non-numeric cells are dropped and counted under Drop
/// and raise Error{ParseError} with the line number under Error.
/// Throws Error{EmptyColumn} when no value survives.
Ingested read_csv_column(std::istream& in, const std::string& column, MissingPolicy policy);
Ingested ingest_csv(const std::filesystem::path& path, const std::string& column,
                    MissingPolicy policy);

}  // namespace exi
