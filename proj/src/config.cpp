#include "exi/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "exi/error.hpp"

namespace exi {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::InvalidConfig, "bad value '" + value + "' for key '" + key + "'");
}

Marginal parse_marginal(const std::string& text) {
  if (text == "frechet") return Marginal::Frechet;
  if (text == "uniform") return Marginal::Uniform;
  if (text == "exponential") return Marginal::Exponential;
  if (text == "gaussian") return Marginal::Gaussian;
  bad_value("marginal", text);
}

ProcessSpec::Kind parse_process_kind(const std::string& text) {
  using K = ProcessSpec::Kind;
  for (const K k : {K::MM, K::ARMAX, K::ARuPlus, K::ARuMinus, K::MA2, K::ARc, K::AR2Pareto,
                    K::GARCH11, K::IID}) {
    if (to_string(k) == text) return k;
  }
  bad_value("process", text);
}

}  // namespace

const std::string* KeyValueSection::find(const std::string& key) const {
  const std::string* out = nullptr;
  for (const auto& [k, v] : entries) {
    if (k == key) out = &v;
  }
  return out;
}

std::vector<KeyValueSection> parse_key_values(std::istream& in) {
  std::vector<KeyValueSection> sections(1);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unterminated section header");
      }
      sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty key");
    }
    sections.back().entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return sections;
}

std::vector<KeyValueSection> load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_key_values(in);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0' || !std::isfinite(v)) bad_value(key, value);
  return v;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    bad_value(key, value);
  }
  return static_cast<std::size_t>(std::stoull(value));
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) bad_value("levels", text);
    const double a = parse_double("levels", parts[0]);
    const double b = parse_double("levels", parts[1]);
    const double step = parse_double("levels", parts[2]);
    if (!(step > 0.0) || b < a) bad_value("levels", text);
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      // Round to 1e-12 so the grid is free of accumulated drift.
      out.push_back(std::round((a + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return out;
  }
  for (const auto& item : split(text, ',')) out.push_back(parse_double("levels", item));
  return out;
}

std::vector<std::size_t> parse_k_range(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) bad_value("K_range", text);
    const auto a = parse_size("K_range", parts[0]);
    const auto b = parse_size("K_range", parts[1]);
    if (b < a) bad_value("K_range", text);
    for (auto k = a; k <= b; ++k) out.push_back(k);
    return out;
  }
  for (const auto& item : split(text, ',')) out.push_back(parse_size("K_range", item));
  return out;
}

bool apply_selection_key(SelectionConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "levels") {
    cfg.levels = parse_levels(value);
  } else if (key == "mode") {
    if (value == "equation") {
      cfg.mode = DiscrepancyMode::Equation;
    } else if (value == "inequality") {
      cfg.mode = DiscrepancyMode::Inequality;
    } else {
      bad_value(key, value);
    }
  } else if (key == "delta1") {
    cfg.delta1 = parse_double(key, value);
  } else if (key == "delta2") {
    cfg.delta2 = parse_double(key, value);
  } else if (key == "k_rule") {
    cfg.k_rule = parse_k_rule(value);
  } else if (key == "estimator") {
    cfg.estimator.kind = parse_estimator_kind(value);
  } else if (key == "K") {
    cfg.estimator.param = parse_size(key, value);
  } else if (key == "K_range") {
    cfg.k_range = parse_k_range(value);
  } else if (key == "pilot") {
    cfg.pilot = EstimatorSpec{parse_estimator_kind(value), 0};
  } else if (key == "statistic_theta") {
    if (value == "pilot") {
      cfg.statistic_theta = StatisticTheta::Pilot;
    } else if (value == "target") {
      cfg.statistic_theta = StatisticTheta::Target;
    } else {
      bad_value(key, value);
    }
  } else if (key == "tolerance") {
    cfg.tolerance = parse_double(key, value);
  } else if (key == "w") {
    cfg.w = parse_double(key, value);
  } else if (key == "threads") {
    cfg.threads = std::max<std::size_t>(1, parse_size(key, value));
  } else {
    return false;
  }
  return true;
}

SelectionConfig selection_config_from(const KeyValueSection& section, bool strict) {
  SelectionConfig cfg;
  for (const auto& [key, value] : section.entries) {
    if (!apply_selection_key(cfg, key, value) && strict) {
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

std::string to_key_values(const SelectionConfig& cfg) {
  std::ostringstream os;
  os << "levels = ";
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    os << (i ? "," : "") << format_double(cfg.levels[i]);
  }
  os << "\nmode = " << (cfg.mode == DiscrepancyMode::Equation ? "equation" : "inequality")
     << "\ndelta1 = " << format_double(cfg.delta1)
     << "\ndelta2 = " << format_double(cfg.delta2)
     << "\nk_rule = " << to_string(cfg.k_rule)
     << "\nestimator = " << to_string(cfg.estimator.kind)
     << "\nK = " << cfg.estimator.param << "\nK_range = ";
  for (std::size_t i = 0; i < cfg.k_range.size(); ++i) os << (i ? "," : "") << cfg.k_range[i];
  os << "\npilot = " << to_string(cfg.pilot.kind)
     << "\nstatistic_theta = " << (cfg.statistic_theta == StatisticTheta::Pilot ? "pilot" : "target")
     << "\ntolerance = " << format_double(cfg.tolerance)
     << "\nw = " << format_double(cfg.w)
     << "\nthreads = " << cfg.threads << "\n";
  return os.str();
}

bool is_process_key(const std::string& key) {
  static const char* const keys[] = {"process", "weights", "alpha", "r",     "p",        "q",
                                     "tail",    "omega",   "lambda", "beta", "marginal", "burn_in"};
  return std::find(std::begin(keys), std::end(keys), key) != std::end(keys);
}

ProcessSpec process_from(const KeyValueSection& section, bool strict) {
  const std::string* kind = section.find("process");
  if (!kind) throw Error(ErrorCode::InvalidConfig, "missing key 'process'");
  ProcessSpec spec;
  spec.kind = parse_process_kind(*kind);
  if (spec.kind == ProcessSpec::Kind::MA2) spec.alpha = 2.0;
  for (const auto& [key, value] : section.entries) {
    if (key == "process") continue;
    if (key == "weights") {
      spec.weights.clear();
      for (const auto& item : split(value, ',')) spec.weights.push_back(parse_double(key, item));
    } else if (key == "alpha" || key == "tail") {
      spec.alpha = parse_double(key, value);
    } else if (key == "r") {
      spec.r = static_cast<int>(parse_size(key, value));
    } else if (key == "p") {
      spec.p = parse_double(key, value);
    } else if (key == "q") {
      spec.q = parse_double(key, value);
    } else if (key == "omega") {
      spec.garch_omega = parse_double(key, value);
    } else if (key == "lambda") {
      spec.garch_lambda = parse_double(key, value);
    } else if (key == "beta") {
      spec.garch_beta = parse_double(key, value);
    } else if (key == "marginal") {
      spec.marginal = parse_marginal(value);
    } else if (key == "burn_in") {
      spec.burn_in = parse_size(key, value);
    } else if (strict) {
      throw Error(ErrorCode::InvalidConfig, "unknown process key '" + key + "'");
    }
  }
  validate(spec);
  return spec;
}

std::string to_key_values(const ProcessSpec& spec) {
  std::ostringstream os;
  os << "process = " << to_string(spec.kind) << "\n";
  switch (spec.kind) {
    case ProcessSpec::Kind::MM:
      os << "weights = ";
      for (std::size_t i = 0; i < spec.weights.size(); ++i) {
        os << (i ? "," : "") << format_double(spec.weights[i]);
      }
      os << "\n";
      break;
    case ProcessSpec::Kind::ARMAX:
      os << "alpha = " << format_double(spec.alpha) << "\n";
      break;
    case ProcessSpec::Kind::ARuPlus:
    case ProcessSpec::Kind::ARuMinus:
      os << "r = " << spec.r << "\n";
      break;
    case ProcessSpec::Kind::MA2:
      os << "p = " << format_double(spec.p) << "\nq = " << format_double(spec.q)
         << "\ntail = " << format_double(spec.alpha) << "\n";
      break;
    case ProcessSpec::Kind::GARCH11:
      os << "omega = " << format_double(spec.garch_omega)
         << "\nlambda = " << format_double(spec.garch_lambda)
         << "\nbeta = " << format_double(spec.garch_beta) << "\n";
      break;
    case ProcessSpec::Kind::IID:
      os << "marginal = " << to_string(spec.marginal) << "\n";
      break;
    case ProcessSpec::Kind::ARc:
    case ProcessSpec::Kind::AR2Pareto:
      break;
  }
  os << "burn_in = " << spec.burn_in << "\n";
  return os.str();
}

}  // namespace exi
