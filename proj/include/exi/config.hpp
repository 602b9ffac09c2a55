#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "exi/selection.hpp"
#include "exi/simulators.hpp"

namespace exi {

/// A block of `key = value` lines. The unnamed leading block has an empty
/// header; later blocks start with `[header]`.
struct KeyValueSection {
  std::string header;
  std::vector<std::pair<std::string, std::string>> entries;

  /// Last value for the key, or nullptr.
  const std::string* find(const std::string& key) const;
};

/// Plain-text configuration: `#` starts a comment, blank lines are ignored,
/// `[name]` opens a section, everything else must be `key = value`.
/// Throws Error{ParseError} naming the offending line.
std::vector<KeyValueSection> parse_key_values(std::istream& in);
std::vector<KeyValueSection> load_key_values(const std::filesystem::path& path);

/// "a:b:step" (inclusive) or a comma list.
std::vector<double> parse_levels(const std::string& text);
/// "a:b" (inclusive) or a comma list.
std::vector<std::size_t> parse_k_range(const std::string& text);

double parse_double(const std::string& key, const std::string& value);
std::size_t parse_size(const std::string& key, const std::string& value);

/// Applies one selection key (levels, mode, delta1, delta2, k_rule,
/// estimator, K, K_range, pilot, statistic_theta, tolerance, w, threads).
/// Returns false for keys it does not know.
bool apply_selection_key(SelectionConfig& cfg, const std::string& key, const std::string& value);

/// Builds a config from a section; with strict set, unknown keys are an error.
SelectionConfig selection_config_from(const KeyValueSection& section, bool strict = true);

/// Serializes every key so that selection_config_from() reproduces cfg.
std::string to_key_values(const SelectionConfig& cfg);

bool is_process_key(const std::string& key);

/// Keys: process (mm|armax|aru_plus|aru_minus|ma2|arc|ar2|garch|iid), weights,
/// alpha, r, p, q, tail, omega, lambda, beta, marginal, burn_in.
ProcessSpec process_from(const KeyValueSection& section, bool strict = true);
std::string to_key_values(const ProcessSpec& spec);

}  // namespace exi
