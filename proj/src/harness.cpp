#include "exi/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "exi/error.hpp"
#include "exi/parallel.hpp"
#include "exi/rng.hpp"

namespace exi {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string exact(double v) { return fmt("%.17g", v); }

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string field;
  while (in >> field) out.push_back(field);
  return out;
}

// Discrepancy variants report theta1..theta3; plateau variants a single value.
ReplicationRecord run_variant(const Variant& variant, const TimeSeries& series, double theta) {
  ReplicationRecord rec;
  rec.variant = variant.name;
  rec.true_theta = theta;
  SelectionConfig cfg = variant.selection;
  cfg.threads = 1;
  if (cfg.k_rule.from_true_theta) cfg.k_rule.s = theta;

  if (variant.method == Variant::Method::Plateau) {
    try {
      const ThetaEstimate est = plateau_a1(series, cfg.levels, cfg.w);
      rec.theta = {est.value, est.value, est.value};
      rec.solution_gap_counts = {est.gap_count};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPlateau) throw;
      rec.failed = true;
    }
    return rec;
  }

  const SelectionResult res = run_algorithm(series, cfg);
  if (res.empty) {
    rec.failed = true;
    return rec;
  }
  rec.theta = {res.theta1, res.theta2, res.theta3};
  for (const auto& s : res.solutions) rec.solution_gap_counts.push_back(s.gap_count);
  return rec;
}

}  // namespace

double CellSummary::abs_bias_e4() const { return std::abs(bias) * 1e4; }

double CellSummary::failure_rate() const {
  const std::size_t total = successes + failures;
  return total == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(total);
}

ExperimentPlan plan_from(const std::vector<KeyValueSection>& sections) {
  ExperimentPlan plan;
  for (const auto& section : sections) {
    if (section.header.empty()) {
      for (const auto& [key, value] : section.entries) {
        if (key == "n") {
          plan.n = parse_size(key, value);
        } else if (key == "reps") {
          plan.reps = parse_size(key, value);
        } else if (key == "seed") {
          plan.seed = static_cast<std::uint64_t>(parse_size(key, value));
        } else {
          throw Error(ErrorCode::InvalidConfig, "unknown plan key '" + key + "'");
        }
      }
      continue;
    }
    std::istringstream header(section.header);
    std::string kind;
    header >> kind;
    std::string name;
    std::getline(header, name);
    name = trim(name);
    if (kind == "process") {
      PlannedProcess p;
      p.spec = process_from(section);
      p.name = name.empty() ? p.spec.label() : name;
      plan.processes.push_back(std::move(p));
    } else if (kind == "variant") {
      Variant v;
      v.name = name.empty() ? "variant" + std::to_string(plan.variants.size() + 1) : name;
      KeyValueSection rest;
      for (const auto& [key, value] : section.entries) {
        if (key == "method") {
          if (value == "discrepancy") {
            v.method = Variant::Method::Discrepancy;
          } else if (value == "plateau") {
            v.method = Variant::Method::Plateau;
          } else {
            throw Error(ErrorCode::InvalidConfig, "unknown method '" + value + "'");
          }
        } else {
          rest.entries.emplace_back(key, value);
        }
      }
      v.selection = selection_config_from(rest);
      plan.variants.push_back(std::move(v));
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown section [" + section.header + "]");
    }
  }
  if (plan.reps < 1) throw Error(ErrorCode::InvalidConfig, "reps must be >= 1");
  if (plan.n < 2) throw Error(ErrorCode::InvalidConfig, "n must be >= 2");
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  return plan_from(load_key_values(path));
}

MCReport run_experiment(const ExperimentPlan& plan, std::size_t threads) {
  const std::size_t P = plan.processes.size();
  const std::size_t V = plan.variants.size();
  const std::size_t R = plan.reps;

  // slots[(p * R + r) * V + v]
  std::vector<ReplicationRecord> slots(P * R * V);
  std::vector<Curve> curves(P * V);
  parallel_for(P * R, threads, [&](std::size_t task) {
    const std::size_t p = task / R;
    const std::size_t r = task % R;
    const auto& proc = plan.processes[p];
    const std::uint64_t seed = derive_seed(derive_seed(plan.seed, p), r);
    const TimeSeries series = simulate(proc.spec, plan.n, seed);
    const double theta = true_theta(proc.spec);
    for (std::size_t v = 0; v < V; ++v) {
      ReplicationRecord rec = run_variant(plan.variants[v], series, theta);
      rec.seed = seed;
      rec.process = proc.name;
      rec.replication = r;
      slots[task * V + v] = std::move(rec);
      if (r == 0 && plan.variants[v].method == Variant::Method::Discrepancy) {
        SelectionConfig cfg = plan.variants[v].selection;
        cfg.threads = 1;
        if (cfg.k_rule.from_true_theta) cfg.k_rule.s = theta;
        curves[p * V + v] = {proc.name, plan.variants[v].name, scan_thresholds(series, cfg)};
      }
    }
  });

  MCReport report;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t v = 0; v < V; ++v) {
      for (std::size_t r = 0; r < R; ++r) {
        report.replications.push_back(std::move(slots[(p * R + r) * V + v]));
      }
      if (!curves[p * V + v].records.empty()) report.curves.push_back(std::move(curves[p * V + v]));
    }
  }
  std::vector<std::string> single;
  for (const auto& v : plan.variants) {
    if (v.method == Variant::Method::Plateau) single.push_back(v.name);
  }
  report.cells = summarize(report.replications, single);
  return report;
}

std::vector<CellSummary> summarize(const std::vector<ReplicationRecord>& records,
                                   const std::vector<std::string>& single_estimate_variants) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<const ReplicationRecord*>> groups;
  for (const auto& rec : records) {
    const auto key = std::make_pair(rec.process, rec.variant);
    auto& group = groups[key];
    if (group.empty()) keys.push_back(key);
    group.push_back(&rec);
  }

  std::vector<CellSummary> cells;
  for (const auto& key : keys) {
    const auto& group = groups[key];
    const bool single = std::find(single_estimate_variants.begin(), single_estimate_variants.end(),
                                  key.second) != single_estimate_variants.end();
    for (int e = 1; e <= (single ? 1 : 3); ++e) {
      CellSummary cell;
      cell.process = key.first;
      cell.variant = key.second;
      cell.estimate = e;
      cell.true_theta = group.front()->true_theta;
      double se = 0.0;
      double err = 0.0;
      double count = 0.0;
      for (const auto* rec : group) {
        if (rec->failed) {
          ++cell.failures;
          continue;
        }
        ++cell.successes;
        const double d = rec->theta[e - 1] - rec->true_theta;
        se += d * d;
        err += d;
        count += static_cast<double>(rec->solution_gap_counts.size());
      }
      if (cell.successes > 0) {
        const auto s = static_cast<double>(cell.successes);
        cell.rmse = std::sqrt(se / s);
        cell.bias = err / s;
        cell.mean_solutions = count / s;
      } else {
        cell.rmse = std::numeric_limits<double>::quiet_NaN();
        cell.bias = std::numeric_limits<double>::quiet_NaN();
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

char delimiter(TableFormat format) { return format == TableFormat::Tsv ? '\t' : ','; }

void write_table(std::ostream& out, const MCReport& report, TableFormat format) {
  const char d = delimiter(format);
  std::vector<std::string> processes;
  std::vector<std::pair<std::string, int>> rows;
  for (const auto& c : report.cells) {
    if (std::find(processes.begin(), processes.end(), c.process) == processes.end()) {
      processes.push_back(c.process);
    }
    const auto row = std::make_pair(c.variant, c.estimate);
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
  }

  out << "variant" << d << "estimate";
  for (const auto& p : processes) {
    out << d << p << " RMSE*1e4" << d << p << " |Bias|*1e4" << d << p << " fail_rate" << d << p
        << " mean_l";
  }
  out << "\n";
  for (const auto& [variant, estimate] : rows) {
    out << variant << d << "theta" << estimate;
    for (const auto& p : processes) {
      const auto it = std::find_if(report.cells.begin(), report.cells.end(), [&](const CellSummary& c) {
        return c.process == p && c.variant == variant && c.estimate == estimate;
      });
      if (it == report.cells.end()) {
        out << d << d << d << d;
      } else if (it->successes == 0) {
        out << d << "-" << d << "-" << d << fmt("%.4f", it->failure_rate()) << d << "-";
      } else {
        out << d << fmt("%.6g", it->rmse_e4()) << d << fmt("%.6g", it->abs_bias_e4()) << d
            << fmt("%.4f", it->failure_rate()) << d << fmt("%.4f", it->mean_solutions);
      }
    }
    out << "\n";
  }
}

void write_replication_log(std::ostream& out, const std::vector<ReplicationRecord>& records,
                           TableFormat format) {
  const char d = delimiter(format);
  out << "seed" << d << "process" << d << "variant" << d << "replication" << d << "true_theta" << d
      << "solution_L" << d << "theta1" << d << "theta2" << d << "theta3" << d << "failed\n";
  for (const auto& r : records) {
    out << r.seed << d << r.process << d << r.variant << d << r.replication << d
        << exact(r.true_theta) << d;
    for (std::size_t i = 0; i < r.solution_gap_counts.size(); ++i) {
      out << (i ? " " : "") << r.solution_gap_counts[i];
    }
    for (const double t : r.theta) out << d << (r.failed ? std::string("nan") : exact(t));
    out << d << (r.failed ? 1 : 0) << "\n";
  }
}

std::vector<ReplicationRecord> read_replication_log(std::istream& in, TableFormat format) {
  const char d = delimiter(format);
  std::vector<ReplicationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto f = split_fields(line, d);
    if (f.size() != 10) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 10 fields");
    }
    try {
      ReplicationRecord r;
      r.seed = std::stoull(f[0]);
      r.process = f[1];
      r.variant = f[2];
      r.replication = std::stoull(f[3]);
      r.true_theta = std::stod(f[4]);
      std::istringstream ls(f[5]);
      std::size_t l = 0;
      while (ls >> l) r.solution_gap_counts.push_back(l);
      r.failed = f[9] == "1";
      for (int i = 0; i < 3; ++i) r.theta[i] = r.failed ? 0.0 : std::stod(f[6 + i]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number");
    }
  }
  return out;
}

void write_curves(std::ostream& out, const std::vector<Curve>& curves, TableFormat format) {
  const char d = delimiter(format);
  out << "process" << d << "variant" << d << "q" << d << "u" << d << "K" << d << "L" << d << "k" << d
      << "theta" << d << "statistic" << d << "skipped\n";
  for (const auto& c : curves) {
    for (const auto& r : c.records) {
      out << c.process << d << c.variant << d << exact(r.q) << d << exact(r.u) << d << r.K << d
          << r.gap_count << d << r.k << d << exact(r.theta) << d << exact(r.statistic) << d
          << (r.skipped ? 1 : 0) << "\n";
    }
  }
}

void emit_report(const MCReport& report, const std::filesystem::path& path, TableFormat format) {
  const auto sibling = [&](const std::string& tag) {
    std::filesystem::path p = path;
    p.replace_filename(path.stem().string() + "." + tag + path.extension().string());
    return p;
  };
  const auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
    return out;
  };
  {
    auto out = open(path);
    write_table(out, report, format);
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
  {
    auto out = open(sibling("replications"));
    write_replication_log(out, report.replications, format);
  }
  {
    auto out = open(sibling("curves"));
    write_curves(out, report.curves, format);
  }
}

Ingested read_csv_column(std::istream& in, const std::string& column, MissingPolicy policy) {
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::EmptyColumn, "empty input");
  char delim = ' ';
  for (const char c : {',', '\t', ';'}) {
    if (header.find(c) != std::string::npos) {
      delim = c;
      break;
    }
  }
  const auto fields = [&](const std::string& line) {
    return delim == ' ' ? split_whitespace(line) : split_fields(line, delim);
  };

  const auto names = fields(header);
  std::size_t col = names.size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (trim(names[i]) == column) {
      col = i;
      break;
    }
  }
  if (col == names.size()) {
    if (!column.empty() && column.find_first_not_of("0123456789") == std::string::npos) {
      col = std::stoull(column);
    }
    if (col >= names.size()) throw Error(ErrorCode::EmptyColumn, "no column '" + column + "'");
  }

  Ingested out;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++out.rows;
    const auto row = fields(line);
    const std::string cell = col < row.size() ? trim(row[col]) : std::string();
    char* end = nullptr;
    const double v = cell.empty() ? 0.0 : std::strtod(cell.c_str(), &end);
    const bool ok = !cell.empty() && *end == '\0' && std::isfinite(v);
    if (ok) {
      out.values.push_back(v);
    } else if (policy == MissingPolicy::Drop) {
      ++out.dropped;
    } else {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
    }
  }
  if (out.values.empty()) throw Error(ErrorCode::EmptyColumn, "column '" + column + "' has no values");
  return out;
}

Ingested ingest_csv(const std::filesystem::path& path, const std::string& column,
                    MissingPolicy policy) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_csv_column(in, column, policy);
}

}  // namespace exi
