#include "exi/simulators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "exi/error.hpp"
#include "exi/rng.hpp"

namespace exi {
namespace {

template <class Engine>
double frechet(Engine& eng) {
  return -1.0 / std::log(uniform_open(eng));
}

template <class Engine>
double pareto(Engine& eng, double tail) {
  return std::pow(uniform_open(eng), -1.0 / tail);
}

template <class Engine>
double cauchy(Engine& eng) {
  return std::tan(std::numbers::pi * (uniform_open(eng) - 0.5));
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidParams, what);
}

}  // namespace

ProcessSpec ProcessSpec::mm(std::vector<double> weights) {
  ProcessSpec s;
  s.kind = Kind::MM;
  s.weights = std::move(weights);
  return s;
}

ProcessSpec ProcessSpec::armax(double alpha) {
  ProcessSpec s;
  s.kind = Kind::ARMAX;
  s.alpha = alpha;
  return s;
}

ProcessSpec ProcessSpec::aru_plus(int r) {
  ProcessSpec s;
  s.kind = Kind::ARuPlus;
  s.r = r;
  return s;
}

ProcessSpec ProcessSpec::aru_minus(int r) {
  ProcessSpec s;
  s.kind = Kind::ARuMinus;
  s.r = r;
  return s;
}

ProcessSpec ProcessSpec::ma2(double p, double q, double tail) {
  ProcessSpec s;
  s.kind = Kind::MA2;
  s.p = p;
  s.q = q;
  s.alpha = tail;
  return s;
}

ProcessSpec ProcessSpec::arc() {
  ProcessSpec s;
  s.kind = Kind::ARc;
  return s;
}

ProcessSpec ProcessSpec::ar2_pareto() {
  ProcessSpec s;
  s.kind = Kind::AR2Pareto;
  return s;
}

ProcessSpec ProcessSpec::garch11() {
  ProcessSpec s;
  s.kind = Kind::GARCH11;
  return s;
}

ProcessSpec ProcessSpec::iid(Marginal marginal) {
  ProcessSpec s;
  s.kind = Kind::IID;
  s.marginal = marginal;
  return s;
}

std::string to_string(ProcessSpec::Kind kind) {
  switch (kind) {
    case ProcessSpec::Kind::MM: return "mm";
    case ProcessSpec::Kind::ARMAX: return "armax";
    case ProcessSpec::Kind::ARuPlus: return "aru_plus";
    case ProcessSpec::Kind::ARuMinus: return "aru_minus";
    case ProcessSpec::Kind::MA2: return "ma2";
    case ProcessSpec::Kind::ARc: return "arc";
    case ProcessSpec::Kind::AR2Pareto: return "ar2";
    case ProcessSpec::Kind::GARCH11: return "garch";
    case ProcessSpec::Kind::IID: return "iid";
  }
  return "iid";
}

std::string to_string(Marginal marginal) {
  switch (marginal) {
    case Marginal::Frechet: return "frechet";
    case Marginal::Uniform: return "uniform";
    case Marginal::Exponential: return "exponential";
    case Marginal::Gaussian: return "gaussian";
  }
  return "frechet";
}

std::string ProcessSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::MM: os << "MM(theta=" << true_theta(*this) << ")"; break;
    case Kind::ARMAX: os << "ARMAX(theta=" << true_theta(*this) << ")"; break;
    case Kind::ARuPlus: os << "ARu+(r=" << r << ")"; break;
    case Kind::ARuMinus: os << "ARu-(r=" << r << ")"; break;
    case Kind::MA2: os << "MA2(p=" << p << ",q=" << q << ")"; break;
    case Kind::ARc: os << "ARc"; break;
    case Kind::AR2Pareto: os << "AR2"; break;
    case Kind::GARCH11: os << "GARCH"; break;
    case Kind::IID: os << "IID(" << to_string(marginal) << ")"; break;
  }
  return os.str();
}

void validate(const ProcessSpec& spec) {
  switch (spec.kind) {
    case ProcessSpec::Kind::MM: {
      if (spec.weights.empty()) invalid("MM needs at least one weight");
      for (const double a : spec.weights) {
        if (!(a >= 0.0)) invalid("MM weights must be non-negative");
      }
      const double sum = std::accumulate(spec.weights.begin(), spec.weights.end(), 0.0);
      if (std::abs(sum - 1.0) > 1e-12) invalid("MM weights must sum to 1");
      break;
    }
    case ProcessSpec::Kind::ARMAX:
      if (!(spec.alpha >= 0.0 && spec.alpha < 1.0)) invalid("ARMAX alpha must lie in [0,1)");
      break;
    case ProcessSpec::Kind::ARuPlus:
    case ProcessSpec::Kind::ARuMinus:
      if (spec.r < 2) invalid("ARu needs integer r >= 2");
      break;
    case ProcessSpec::Kind::MA2:
      // q^alpha must be real, so q is restricted to [0,1).
      if (!(spec.p > 0.0) || !(spec.q >= 0.0 && spec.q < 1.0) || !(spec.alpha > 0.0)) {
        invalid("MA2 needs p > 0, 0 <= q < 1 and tail index > 0");
      }
      break;
    case ProcessSpec::Kind::GARCH11:
      if (!(spec.garch_omega > 0.0) || !(spec.garch_lambda >= 0.0) || !(spec.garch_beta >= 0.0) ||
          !(spec.garch_lambda + spec.garch_beta < 1.0)) {
        invalid("GARCH needs omega > 0, lambda, beta >= 0 and lambda + beta < 1");
      }
      break;
    case ProcessSpec::Kind::ARc:
    case ProcessSpec::Kind::AR2Pareto:
    case ProcessSpec::Kind::IID:
      break;
  }
}

double true_theta(const ProcessSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case ProcessSpec::Kind::MM:
      return *std::max_element(spec.weights.begin(), spec.weights.end());
    case ProcessSpec::Kind::ARMAX: return 1.0 - spec.alpha;
    case ProcessSpec::Kind::ARuPlus: return 1.0 - 1.0 / spec.r;
    case ProcessSpec::Kind::ARuMinus: return 1.0 - 1.0 / (static_cast<double>(spec.r) * spec.r);
    case ProcessSpec::Kind::MA2:
      return 1.0 / (1.0 + std::pow(spec.p, spec.alpha) + std::pow(spec.q, spec.alpha));
    case ProcessSpec::Kind::ARc: return 0.3;
    case ProcessSpec::Kind::AR2Pareto: return 0.25;
    case ProcessSpec::Kind::GARCH11: return 0.447;
    case ProcessSpec::Kind::IID: return 1.0;
  }
  return 1.0;
}

double frechet_cdf(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

TimeSeries simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  validate(spec);
  if (n < 2) invalid("series length must be at least 2");
  Philox4x64 eng(seed);
  std::vector<double> x(n);

  switch (spec.kind) {
    case ProcessSpec::Kind::MM: {
      const std::size_t m = spec.weights.size() - 1;
      std::vector<double> z(n + m);
      for (auto& v : z) v = frechet(eng);
      for (std::size_t t = 0; t < n; ++t) {
        double best = 0.0;
        for (std::size_t i = 0; i <= m; ++i) best = std::max(best, spec.weights[i] * z[t + m - i]);
        x[t] = best;
      }
      break;
    }
    case ProcessSpec::Kind::ARMAX: {
      double prev = frechet(eng);  // X_0 = Z_0
      for (std::size_t t = 0; t < n; ++t) {
        prev = std::max(spec.alpha * prev, (1.0 - spec.alpha) * frechet(eng));
        x[t] = prev;
      }
      break;
    }
    case ProcessSpec::Kind::ARuPlus:
    case ProcessSpec::Kind::ARuMinus: {
      const bool plus = spec.kind == ProcessSpec::Kind::ARuPlus;
      const auto r = static_cast<std::uint64_t>(spec.r);
      const double inv = 1.0 / static_cast<double>(spec.r);
      double prev = uniform_open(eng);  // X_0 ~ U(0,1)
      for (std::size_t t = 0; t < n; ++t) {
        const auto k = uniform_index(eng, r) + (plus ? 0 : 1);
        const double eps = static_cast<double>(k) * inv;
        prev = (plus ? inv : -inv) * prev + eps;
        x[t] = prev;
      }
      break;
    }
    case ProcessSpec::Kind::MA2: {
      std::vector<double> z(n + 2);
      for (auto& v : z) v = pareto(eng, spec.alpha);
      for (std::size_t t = 0; t < n; ++t) x[t] = spec.p * z[t] + spec.q * z[t + 1] + z[t + 2];
      break;
    }
    case ProcessSpec::Kind::ARc: {
      double prev = 0.0;
      for (std::size_t t = 0; t < spec.burn_in + n; ++t) {
        prev = 0.7 * prev + cauchy(eng);
        if (t >= spec.burn_in) x[t - spec.burn_in] = prev;
      }
      break;
    }
    case ProcessSpec::Kind::AR2Pareto: {
      double x1 = 0.0;
      double x2 = 0.0;
      for (std::size_t t = 0; t < spec.burn_in + n; ++t) {
        const double v = 0.95 * x1 - 0.89 * x2 + pareto(eng, 2.0);
        x2 = x1;
        x1 = v;
        if (t >= spec.burn_in) x[t - spec.burn_in] = v;
      }
      break;
    }
    case ProcessSpec::Kind::GARCH11: {
      GaussianSampler gauss;
      double var = spec.garch_omega / (1.0 - spec.garch_lambda - spec.garch_beta);
      double prev = 0.0;
      for (std::size_t t = 0; t < spec.burn_in + n; ++t) {
        var = spec.garch_omega + spec.garch_lambda * prev * prev + spec.garch_beta * var;
        prev = std::sqrt(var) * gauss(eng);
        if (t >= spec.burn_in) x[t - spec.burn_in] = prev;
      }
      break;
    }
    case ProcessSpec::Kind::IID: {
      GaussianSampler gauss;
      for (auto& v : x) {
        switch (spec.marginal) {
          case Marginal::Frechet: v = frechet(eng); break;
          case Marginal::Uniform: v = uniform_open(eng); break;
          case Marginal::Exponential: v = -std::log(uniform_open(eng)); break;
          case Marginal::Gaussian: v = gauss(eng); break;
        }
      }
      break;
    }
  }
  return TimeSeries(std::move(x));
}

}  // namespace exi
