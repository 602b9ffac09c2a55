// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "exi/cms.hpp"
#include "exi/estimators.hpp"
#include "exi/harness.hpp"
#include "exi/parallel.hpp"
#include "exi/rng.hpp"
#include "exi/selection.hpp"
#include "exi/series.hpp"
#include "exi/simulators.hpp"
#include "oracles.hpp"

#ifndef EXI_CLI_PATH
#error "EXI_CLI_PATH must name the exi executable"
#endif

using namespace exi;

namespace {

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ARMAX theta = 0.75, n = 1e5, q = 0.98, k = floor(theta L), 500 replications.
Outcome distributional() {
  constexpr double theta = 0.75;
  constexpr std::size_t reps = 500;
  std::vector<double> at_theta_l(reps);
  std::vector<double> at_sqrt_l(reps);
  parallel_for(reps, workers(), [&](std::size_t r) {
    const TimeSeries s = simulate(ProcessSpec::armax(1.0 - theta), 100000, derive_seed(20240101, r));
    const GapSample g = gap_sample(s, quantile_threshold(s, 0.98));
    const auto y = g.sorted_normalized();
    const auto L = static_cast<double>(y.size());
    const auto k = static_cast<std::size_t>(std::floor(theta * L));
    at_theta_l[r] = small_sample_correct(discrepancy_statistic(y, k, theta)).value;
    const auto k_small = static_cast<std::size_t>(std::floor(std::sqrt(L)));
    at_sqrt_l[r] = small_sample_correct(discrepancy_statistic(y, k_small, theta)).value;
  });
  const auto cdf = [](double x) { return cms_cdf(x); };
  const double d = oracle::ks_statistic(at_theta_l, cdf);
  const double p = oracle::ks_pvalue(d, reps);
  const double p_small = oracle::ks_pvalue(oracle::ks_statistic(at_sqrt_l, cdf), reps);
  return {p > 0.01, fmt("KS D=%.4f p=%.3g (median stat %.4f vs %.4f); reference k=floor(sqrt L): p=%.3g",
                        d, p, median(at_theta_l), cms_quantile(0.5), p_small)};
}

Outcome constants() {
  const auto& a1 = cms_distribution();
  const double q = a1.quantile(0.9998);
  const double mode = a1.numeric_mode();
  const double mean =
      oracle::integrate([&](double x) { return 1.0 - a1.cdf(x); }, 0.0, 8.0, 800);
  const double second =
      oracle::integrate([&](double x) { return 2.0 * x * (1.0 - a1.cdf(x)); }, 0.0, 8.0, 800);
  const double var = second - mean * mean;

  // Brownian-bridge Monte Carlo cross-check of the same moments.
  constexpr std::size_t count = 200000;
  constexpr std::size_t grid = 400;
  const auto sims = oracle::bridge_integrals(count, grid, 31337);
  double m1 = 0.0;
  for (double v : sims) m1 += v;
  m1 /= count;
  double m2 = 0.0;
  for (double v : sims) m2 += (v - m1) * (v - m1);
  m2 /= count - 1;
  const double se = std::sqrt(m2 / count);
  // The grid sum has expectation (1/6)(1 - 1/grid^2).
  const bool mc_ok = std::abs(m1 - mean) < 5.0 * se + 1.0 / (6.0 * grid * grid) &&
                     std::abs(m2 - var) < 1e-3;

  const bool q_ok = std::abs(q - 1.49) <= 0.01;
  const bool mode_ok = mode >= 0.04 && mode <= 0.06;
  const bool mean_ok = std::abs(mean - 1.0 / 6.0) <= 1e-4;
  const bool var_ok = std::abs(var - 1.0 / 45.0) <= 1e-3;
  return {q_ok && mode_ok && mean_ok && var_ok && mc_ok,
          fmt("quantile(0.9998)=%.5f [%s, want 1.49+-0.01]; mode=%.5f [%s]; mean=%.8f [%s]; "
              "var=%.8f [%s]; bridge MC mean=%.5f var=%.5f [%s]",
              q, q_ok ? "ok" : "FAIL", mode, mode_ok ? "ok" : "FAIL", mean, mean_ok ? "ok" : "FAIL",
              var, var_ok ? "ok" : "FAIL", m1, m2, mc_ok ? "ok" : "FAIL")};
}

Outcome formula_oracles() {
  Philox4x64 eng(4242, 3);
  constexpr int trials = 1000;
  double worst[5] = {0, 0, 0, 0, 0};
  const auto rel = [](double a, long double b) {
    return static_cast<double>(std::abs(static_cast<long double>(a) - b) / std::abs(b));
  };
  for (int t = 0; t < trials; ++t) {
    const std::size_t L = 2 + uniform_index(eng, 30);
    std::vector<std::size_t> idx{1 + uniform_index(eng, 4)};
    const std::uint64_t spread = t % 3 == 0 ? 2 : 20;
    for (std::size_t i = 0; i < L; ++i) idx.push_back(idx.back() + 1 + uniform_index(eng, spread));
    const std::size_t n = idx.back() + uniform_index(eng, 40);
    const GapSample g = gap_sample_from_indices(idx, n);

    worst[0] = std::max(worst[0], rel(intervals_estimator(g).value, oracle::intervals(g.gaps)));
    std::size_t K = uniform_index(eng, 4);
    KGapSample kg = k_gap_sample(g, K);
    if (kg.clusters == 0) kg = k_gap_sample(g, K = 0);
    worst[1] = std::max(worst[1], rel(kgaps_estimator(kg).value,
                                      oracle::kgaps(g.gaps, K, g.exceedances(), n)));
    const std::size_t k = 1 + uniform_index(eng, L);
    worst[2] = std::max(worst[2], rel(k0_estimator(g, k).value,
                                      oracle::k0(g.gaps, k, g.exceedances(), n)));

    std::vector<double> y(L);
    for (auto& v : y) v = -std::log(uniform_open(eng)) * (0.2 + 3.0 * uniform_open(eng));
    const std::size_t ks = 1 + uniform_index(eng, L - 1);
    const double theta = 0.05 + 0.95 * uniform_open(eng);
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const DiscrepancyStatistic st = discrepancy_statistic(sorted, ks, theta);
    const long double ref = oracle::statistic(y, ks, theta);
    worst[3] = std::max(worst[3], rel(st.value, ref));

    DiscrepancyStatistic raw;
    raw.value = 0.05 + uniform_open(eng);
    raw.gap_count = 2 + uniform_index(eng, 60);
    worst[4] = std::max(worst[4], rel(small_sample_correct(raw).value,
                                      oracle::corrected(raw.value, raw.gap_count)));
  }
  const double w = *std::max_element(std::begin(worst), std::end(worst));
  return {w <= 1e-12, fmt("max rel err: intervals %.2e, kgaps %.2e, k0 %.2e, statistic %.2e, "
                          "correction %.2e (%d inputs each)",
                          worst[0], worst[1], worst[2], worst[3], worst[4], trials)};
}

Outcome consistency() {
  struct Case {
    const char* name;
    ProcessSpec spec;
  };
  const std::vector<Case> cases = {{"ARMAX(0.25)", ProcessSpec::armax(0.75)},
                                   {"ARMAX(0.75)", ProcessSpec::armax(0.25)},
                                   {"MM(0.5)", ProcessSpec::mm({0.5, 0.3, 0.15, 0.05})},
                                   {"MM(0.8)", ProcessSpec::mm({0.8, 0.1, 0.08, 0.02})}};
  SelectionConfig cfg;
  cfg.mode = DiscrepancyMode::Inequality;
  cfg.k_rule = KRule::pilot_l();
  constexpr std::size_t reps = 50;
  bool all = true;
  std::string detail;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const double theta = true_theta(cases[c].spec);
    double med[2] = {0, 0};
    std::size_t fails[2] = {0, 0};
    const std::size_t sizes[2] = {5000, 100000};
    for (int s = 0; s < 2; ++s) {
      std::vector<double> err(reps, std::numeric_limits<double>::quiet_NaN());
      parallel_for(reps, workers(), [&](std::size_t r) {
        const TimeSeries x = simulate(cases[c].spec, sizes[s], derive_seed(derive_seed(404, c), r));
        const auto res = run_algorithm(x, cfg);
        if (!res.empty) err[r] = std::abs(res.theta1 - theta);
      });
      std::vector<double> ok;
      for (double e : err) {
        if (std::isnan(e)) {
          ++fails[s];
        } else {
          ok.push_back(e);
        }
      }
      med[s] = ok.empty() ? std::numeric_limits<double>::infinity() : median(ok);
    }
    const bool dec = med[1] < med[0];
    all = all && dec;
    detail += fmt("%s%s %.4f->%.4f%s", c ? "; " : "", cases[c].name, med[0], med[1],
                  fails[0] + fails[1] ? fmt(" (%zu/%zu no-solution)", fails[0], fails[1]).c_str() : "");
  }
  return {all, "median |theta1-theta| n=5000->1e5: " + detail};
}

Outcome desk_tables() {
  ExperimentPlan plan;
  plan.processes = {{"ARMAX(0.75)", ProcessSpec::armax(0.25)}};
  Variant k0{"K0dis*", Variant::Method::Discrepancy, {}};
  k0.selection.mode = DiscrepancyMode::Inequality;
  k0.selection.estimator = EstimatorSpec::k0();
  k0.selection.k_rule = KRule::fixed_true_theta();
  Variant iv{"Idis*", Variant::Method::Discrepancy, {}};
  iv.selection.mode = DiscrepancyMode::Inequality;
  plan.variants = {k0, iv};
  plan.n = 5000;
  plan.reps = 100;
  plan.seed = 2013;
  const MCReport rep = run_experiment(plan, workers());
  double k0_1 = NAN, k0_2 = NAN, iv_1 = NAN;
  for (const auto& c : rep.cells) {
    if (c.successes == 0) continue;
    if (c.variant == "K0dis*" && c.estimate == 1) k0_1 = c.rmse_e4();
    if (c.variant == "K0dis*" && c.estimate == 2) k0_2 = c.rmse_e4();
    if (c.variant == "Idis*" && c.estimate == 1) iv_1 = c.rmse_e4();
  }
  const bool ok = k0_2 <= 150 && k0_1 <= 300 && iv_1 <= 1500;
  return {ok, fmt("RMSE*1e4: K0 theta2=%.1f (<=150), K0 theta1=%.1f (<=300), intervals theta1=%.1f (<=1500)",
                  k0_2, k0_1, iv_1)};
}

Outcome iid_sanity() {
  SelectionConfig cfg;
  cfg.mode = DiscrepancyMode::Inequality;
  constexpr std::size_t reps = 100;
  std::vector<int> good(reps, 0);
  parallel_for(reps, workers(), [&](std::size_t r) {
    const auto res = run_algorithm(simulate(ProcessSpec::iid(Marginal::Frechet), 100000,
                                            derive_seed(606, r)),
                                   cfg);
    good[r] = !res.empty && res.theta1 >= 0.9;
  });
  const int count = std::accumulate(good.begin(), good.end(), 0);
  return {count >= 90, fmt("%d/%zu replications with theta1 >= 0.9 (need 90)", count, reps)};
}

Outcome tail_size() {
  constexpr std::size_t reps = 500;
  const double crit = cms_quantile(0.99);
  std::vector<int> over(reps, 0);
  parallel_for(reps, workers(), [&](std::size_t r) {
    Philox4x64 eng(derive_seed(707, r));
    std::vector<double> x(10000);
    for (auto& v : x) v = uniform_open(eng);
    over[r] = tail_gof_statistic_from_sample(x, 100, [](double v) { return v; }) > crit;
  });
  const int count = std::accumulate(over.begin(), over.end(), 0);
  return {count <= 10, fmt("%d/%zu above A1^-1(0.99)=%.4f (allowed 10)", count, reps, crit)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / fmt("exi-accept-%d", static_cast<int>(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream plan(dir / "plan.conf");
    plan << "n = 3000\nreps = 24\nseed = 99\n"
            "[process armax]\nprocess = armax\nalpha = 0.5\n"
            "[process mm]\nprocess = mm\nweights = 0.5,0.3,0.15,0.05\n"
            "[variant Idis]\nmode = equation\n"
            "[variant K0dis*]\nmode = inequality\nestimator = k0\nk_rule = fixed:theta\n"
            "[variant IA1]\nmethod = plateau\n";
  }
  bool ok = true;
  for (int threads : {1, 8}) {
    const std::string cmd = fmt("\"%s\" benchmark --config \"%s\" --threads %d --output \"%s\" > /dev/null",
                                EXI_CLI_PATH, (dir / "plan.conf").c_str(), threads,
                                (dir / fmt("t%d.csv", threads)).c_str());
    ok = ok && std::system(cmd.c_str()) == 0;
  }
  std::string detail;
  for (const char* stem : {"", ".replications", ".curves"}) {
    const std::string a = slurp(dir / fmt("t1%s.csv", stem));
    const std::string b = slurp(dir / fmt("t8%s.csv", stem));
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    detail += fmt("%st{1,8}%s.csv %s (%zu bytes)", detail.empty() ? "" : "; ", stem,
                  same ? "identical" : "DIFFER", a.size());
  }
  fs::remove_all(dir);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 omega-squared limit law at theta (KS, ARMAX 0.75)", distributional},
      {"2 limit-law constants", constants},
      {"3 formula oracles", formula_oracles},
      {"4 consistency in n", consistency},
      {"5 desk-scale RMSE bands", desk_tables},
      {"6 iid sanity", iid_sanity},
      {"7 tail statistic size", tail_size},
      {"8 benchmark determinism across threads", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
