#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "exi/series.hpp"

namespace exi {

enum class Marginal { Frechet, Uniform, Exponential, Gaussian };

/// One of the benchmark processes together with its parameters.
struct ProcessSpec {
  enum class Kind { MM, ARMAX, ARuPlus, ARuMinus, MA2, ARc, AR2Pareto, GARCH11, IID };

  Kind kind = Kind::IID;
  std::vector<double> weights;  // MM alpha_0..alpha_m
  double alpha = 0.0;           // ARMAX coefficient, or MA2 Pareto tail index
  int r = 2;                    // ARu+/-
  double p = 0.0;               // MA2
  double q = 0.0;               // MA2
  double garch_omega = 1e-6;
  double garch_lambda = 0.25;
  double garch_beta = 0.7;
  Marginal marginal = Marginal::Frechet;  // IID
  /// Warm-up steps for recursions without a stated stationary start (ARc, AR2, GARCH).
  std::size_t burn_in = 1000;

  static ProcessSpec mm(std::vector<double> weights);
  static ProcessSpec armax(double alpha);
  static ProcessSpec aru_plus(int r);
  static ProcessSpec aru_minus(int r);
  static ProcessSpec ma2(double p, double q, double tail);
  static ProcessSpec arc();
  static ProcessSpec ar2_pareto();
  static ProcessSpec garch11();
  static ProcessSpec iid(Marginal marginal);

  /// Short human-readable label, e.g. "ARMAX(0.25)".
  std::string label() const;
};

std::string to_string(ProcessSpec::Kind kind);
std::string to_string(Marginal marginal);

/// Throws Error{InvalidParams} when the parameters are outside their domain.
void validate(const ProcessSpec& spec);

/// Closed-form extremal index of the process.
double true_theta(const ProcessSpec& spec);

/// Length-n realization, bit-identical for identical (spec, n, seed).
TimeSeries simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

/// Standard Frechet CDF exp(-1/x).
double frechet_cdf(double x);

}  // namespace exi
