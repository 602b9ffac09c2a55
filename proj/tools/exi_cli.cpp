// Command-line front end: simulate, estimate, select-threshold, benchmark,
// gof-test and cms.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "exi/cms.hpp"
#include "exi/config.hpp"
#include "exi/error.hpp"
#include "exi/estimators.hpp"
#include "exi/harness.hpp"
#include "exi/selection.hpp"
#include "exi/simulators.hpp"

namespace {

using namespace exi;

constexpr int kExitNoSolutions = 2;

struct SelectionFlags {
  std::string config;
  std::string levels;
  std::string mode;
  std::optional<double> delta1;
  std::optional<double> delta2;
  std::string k_rule;
  std::string estimator;
  std::string k_range;
  std::optional<std::size_t> K;
  std::size_t threads = 1;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key = value configuration file");
    app->add_option("--levels", levels, "quantile levels, a:b:step or a comma list");
    app->add_option("--mode", mode, "discrepancy mode")->check(CLI::IsMember({"equation", "inequality"}));
    app->add_option("--delta1", delta1, "equation target (mode of the omega^2 law)");
    app->add_option("--delta2", delta2, "inequality bound");
    app->add_option("--k-rule", k_rule, "pilot_l | min_pilot_sqrt | log_squared | fixed:<s>");
    app->add_option("--estimator", estimator, "intervals | kgaps | k0");
    app->add_option("--K-range", k_range, "K values for kgaps, a:b or a comma list");
    app->add_option("--K", K, "K for a single K-gaps estimate, k for K0");
    app->add_option("--threads", threads, "worker threads");
  }

  SelectionConfig build() const {
    KeyValueSection section;
    if (!config.empty()) {
      for (const auto& s : load_key_values(config)) {
        for (const auto& kv : s.entries) section.entries.push_back(kv);
      }
    }
    SelectionConfig cfg;
    for (const auto& [key, value] : section.entries) {
      if (!apply_selection_key(cfg, key, value) && !is_process_key(key) && key != "column") {
        throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
      }
    }
    if (!levels.empty()) cfg.levels = parse_levels(levels);
    if (!mode.empty()) apply_selection_key(cfg, "mode", mode);
    if (delta1) cfg.delta1 = *delta1;
    if (delta2) cfg.delta2 = *delta2;
    if (!k_rule.empty()) cfg.k_rule = parse_k_rule(k_rule);
    if (!estimator.empty()) cfg.estimator.kind = parse_estimator_kind(estimator);
    if (!k_range.empty()) cfg.k_range = parse_k_range(k_range);
    if (K) cfg.estimator.param = *K;
    cfg.threads = std::max<std::size_t>(1, threads);
    validate(cfg);
    return cfg;
  }
};

struct DataFlags {
  std::string path;
  std::string column = "0";
  std::string missing = "drop";

  void attach(CLI::App* app) {
    app->add_option("data", path, "CSV file with a header line")->required();
    app->add_option("--column", column, "column name or 0-based index");
    app->add_option("--missing", missing, "what to do with non-numeric cells")
        ->check(CLI::IsMember({"drop", "error"}));
  }

  TimeSeries load() const {
    Ingested in = ingest_csv(path, column, missing == "drop" ? MissingPolicy::Drop : MissingPolicy::Error);
    if (in.dropped > 0) {
      std::cerr << "dropped " << in.dropped << " missing cell(s) of " << in.rows << " rows\n";
    }
    return TimeSeries(std::move(in.values));
  }
};

TableFormat parse_format(const std::string& text) {
  return text == "tsv" ? TableFormat::Tsv : TableFormat::Csv;
}

std::function<double(double)> parse_cdf(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) args.push_back(parse_double("f0", item));
  }
  const auto arg = [&](std::size_t i, double fallback) { return i < args.size() ? args[i] : fallback; };
  if (name == "uniform") {
    const double a = arg(0, 0.0);
    const double b = arg(1, 1.0);
    return [a, b](double x) { return std::clamp((x - a) / (b - a), 0.0, 1.0); };
  }
  if (name == "exponential") {
    const double rate = arg(0, 1.0);
    return [rate](double x) { return x > 0.0 ? -std::expm1(-rate * x) : 0.0; };
  }
  if (name == "frechet") return frechet_cdf;
  if (name == "pareto") {
    const double tail = arg(0, 1.0);
    return [tail](double x) { return x > 1.0 ? 1.0 - std::pow(x, -tail) : 0.0; };
  }
  if (name == "gaussian") {
    const double mu = arg(0, 0.0);
    const double sigma = arg(1, 1.0);
    return [mu, sigma](double x) { return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0))); };
  }
  throw Error(ErrorCode::InvalidConfig, "unknown F0 '" + spec + "'");
}

void print_records(std::ostream& out, const std::vector<LevelRecord>& records, TableFormat format) {
  write_curves(out, {Curve{"data", "selection", records}}, format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extremal index estimation with discrepancy-based threshold selection"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate a benchmark process to CSV");
  std::string sim_config;
  std::string sim_output;
  std::size_t sim_n = 5000;
  std::uint64_t sim_seed = 1;
  sim->add_option("--config", sim_config, "process description (process = ..., ...)")->required();
  sim->add_option("--n", sim_n, "series length");
  sim->add_option("--seed", sim_seed, "64-bit seed");
  sim->add_option("--output", sim_output, "output CSV (stdout when omitted)");

  // estimate
  auto* est = app.add_subcommand("estimate", "point estimate of theta at one threshold");
  DataFlags est_data;
  est_data.attach(est);
  std::string est_estimator = "intervals";
  std::size_t est_K = 0;
  std::optional<double> est_q;
  std::optional<double> est_u;
  est->add_option("--estimator", est_estimator, "intervals | kgaps | k0");
  est->add_option("--K", est_K, "K for kgaps, k for k0");
  auto* q_opt = est->add_option("--q", est_q, "threshold as a quantile level");
  est->add_option("--u", est_u, "threshold value")->excludes(q_opt);

  // select-threshold
  auto* sel = app.add_subcommand("select-threshold", "discrepancy-based threshold selection");
  DataFlags sel_data;
  sel_data.attach(sel);
  SelectionFlags sel_flags;
  sel_flags.attach(sel);
  std::string sel_curves;
  std::string sel_format = "csv";
  sel->add_option("--output", sel_curves, "write the per-level scan to this file");
  sel->add_option("--format", sel_format)->check(CLI::IsMember({"csv", "tsv"}));

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Monte Carlo RMSE/bias tables");
  std::string bench_plan;
  std::optional<std::uint64_t> bench_seed;
  std::optional<std::size_t> bench_reps;
  std::optional<std::size_t> bench_n;
  bool paper_scale = false;
  std::string bench_output = "report.csv";
  std::string bench_format = "csv";
  std::size_t bench_threads = std::max(1u, std::thread::hardware_concurrency());
  bench->add_option("--config", bench_plan, "plan file")->required();
  bench->add_option("--seed", bench_seed, "master seed");
  bench->add_option("--reps", bench_reps, "replications per process");
  bench->add_option("--n", bench_n, "series length");
  bench->add_flag("--paper-scale", paper_scale, "n = 100000 and 1000 replications");
  bench->add_option("--output", bench_output, "report table path");
  bench->add_option("--format", bench_format)->check(CLI::IsMember({"csv", "tsv"}));
  bench->add_option("--threads", bench_threads, "worker threads");

  // gof-test
  auto* gof = app.add_subcommand("gof-test", "tail omega^2 goodness-of-fit test");
  DataFlags gof_data;
  gof_data.attach(gof);
  std::string gof_f0;
  std::size_t gof_k = 0;
  gof->add_option("--f0", gof_f0,
                  "uniform:a,b | exponential:rate | frechet | pareto:tail | gaussian:mu,sigma")
      ->required();
  gof->add_option("--k", gof_k, "number of upper order statistics")->required();

  // cms
  auto* cms = app.add_subcommand("cms", "constants and quantiles of the omega^2 law");
  std::vector<double> cms_p;
  cms->add_option("--p", cms_p, "extra probabilities to invert");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const ProcessSpec spec = process_from(load_key_values(sim_config).front());
      const TimeSeries series = simulate(spec, sim_n, sim_seed);
      std::ofstream file;
      if (!sim_output.empty()) {
        file.open(sim_output);
        if (!file) throw Error(ErrorCode::IoError, "cannot write " + sim_output);
      }
      std::ostream& out = sim_output.empty() ? std::cout : file;
      out << "value\n";
      char buf[64];
      for (const double v : series.values()) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
      }
      return 0;
    }

    if (*est) {
      const TimeSeries series = est_data.load();
      const double u = est_u ? *est_u : quantile_threshold(series, est_q.value_or(0.95));
      const GapSample g = gap_sample(series, u);
      EstimatorSpec spec{parse_estimator_kind(est_estimator), est_K};
      if (spec.kind == EstimatorSpec::Kind::K0 && spec.param == 0) spec.param = g.gap_count();
      const ThetaEstimate e = estimate(spec, g);
      std::printf("estimator = %s\nthreshold = %.17g\nN_u = %zu\nL = %zu\ntheta = %.17g\nclipped = %d\n",
                  to_string(spec.kind).c_str(), u, g.exceedances(), g.gap_count(), e.value,
                  e.clipped ? 1 : 0);
      return 0;
    }

    if (*sel) {
      const TimeSeries series = sel_data.load();
      const SelectionConfig cfg = sel_flags.build();
      const SelectionResult res = run_algorithm(series, cfg);
      if (!sel_curves.empty()) {
        std::ofstream out(sel_curves);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + sel_curves);
        print_records(out, res.records, parse_format(sel_format));
      }
      std::printf("q,u,K,k,L,theta,statistic\n");
      for (const auto& s : res.solutions) {
        std::printf("%.6g,%.17g,%zu,%zu,%zu,%.17g,%.17g\n", s.q, s.u, s.K, s.k, s.gap_count,
                    s.theta, s.statistic);
      }
      if (res.empty) {
        std::fprintf(stderr, "no solutions of the discrepancy %s\n",
                     cfg.mode == DiscrepancyMode::Equation ? "equation" : "inequality");
        return kExitNoSolutions;
      }
      std::printf("theta1 = %.17g\ntheta2 = %.17g\ntheta3 = %.17g\n", res.theta1, res.theta2,
                  res.theta3);
      return 0;
    }

    if (*bench) {
      ExperimentPlan plan = load_plan(bench_plan);
      if (paper_scale) {
        plan.n = kPaperScaleN;
        plan.reps = kPaperScaleReps;
      }
      if (bench_n) plan.n = *bench_n;
      if (bench_reps) plan.reps = *bench_reps;
      if (bench_seed) plan.seed = *bench_seed;
      const MCReport report = run_experiment(plan, bench_threads);
      emit_report(report, bench_output, parse_format(bench_format));
      return 0;
    }

    if (*gof) {
      const TimeSeries series = gof_data.load();
      const double stat = tail_gof_statistic_from_sample(series.values(), gof_k, parse_cdf(gof_f0));
      std::printf("k = %zu\nstatistic = %.17g\np_value = %.17g\n", gof_k, stat, 1.0 - cms_cdf(stat));
      return 0;
    }

    if (*cms) {
      const auto& law = cms_distribution();
      std::printf("delta1 = %.17g\ndelta2 = %.17g\nnumeric_mode = %.6f\n", kCmsMode, kCmsUpper,
                  law.numeric_mode());
      std::vector<double> ps = {0.5, 0.9, 0.95, 0.99, 0.999, 0.9998};
      ps.insert(ps.end(), cms_p.begin(), cms_p.end());
      for (const double p : ps) std::printf("quantile(%g) = %.10f\n", p, law.quantile(p));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
