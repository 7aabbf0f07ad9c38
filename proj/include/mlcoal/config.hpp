#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlcoal/cost.hpp"
#include "mlcoal/merge_event.hpp"

namespace mlcoal {

/// Invalid user input; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw UsageError("unknown format '" + std::string(s) + "'");
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunConfig {
  std::string subcommand = "simulate";
  std::vector<Size> n{1000};
  Size k = 1;
  EmbeddingKind embedding = EmbeddingKind::DirectChain;
  std::vector<Functional> functionals{kAllFunctionals.begin(), kAllFunctionals.end()};
  Size reps = 100;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> alpha_grid;  // unset: default grid
  std::optional<std::vector<double>> beta_grid;
  double tol = 1e-8;
  double epsilon = 0.15;
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::string> out;
  std::optional<std::string> raw_out;
  unsigned workers = 1;
  std::string oracle = "pmk";
  std::optional<std::string> only;
  bool mutate_pmk = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{
      "subcommand", "n",      "k",   "embedding", "functional", "reps", "seed",    "alpha-grid", "beta-grid",
      "tol",        "epsilon", "format", "out",   "raw-out",    "workers", "oracle", "only",       "mutate-pmk"};
  return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(s)};
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw UsageError("key '" + key + "': integer out of range");
  }
}

inline double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) throw UsageError("key '" + key + "': expected a number, got '" + v + "'");
  return d;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError("key '" + key + "': expected true or false");
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
  return s;
}

}  // namespace detail

/// Applies one `key = value` assignment. List-valued keys accumulate when a
/// key repeats within one source, so `fresh_lists` tracks which were reset.
inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value,
                               std::set<std::string>& fresh_lists) {
  using namespace detail;
  if (!config_keys().contains(key)) throw UsageError("unknown config key '" + key + "'");
  const bool first = fresh_lists.insert(key).second;
  try {
    if (key == "subcommand") cfg.subcommand = value;
    else if (key == "n") {
      if (first) cfg.n.clear();
      for (const auto& item : split_list(value)) cfg.n.push_back(parse_unsigned(key, item));
    } else if (key == "k") cfg.k = parse_unsigned(key, value);
    else if (key == "embedding") cfg.embedding = parse_embedding(value);
    else if (key == "functional") {
      if (first) cfg.functionals.clear();
      for (const auto& item : split_list(value)) cfg.functionals.push_back(parse_functional(item));
    } else if (key == "reps") cfg.reps = parse_unsigned(key, value);
    else if (key == "seed") cfg.seed = parse_unsigned(key, value);
    else if (key == "alpha-grid" || key == "beta-grid") {
      std::vector<double> grid;
      for (const auto& item : split_list(value)) grid.push_back(parse_real(key, item));
      (key == "alpha-grid" ? cfg.alpha_grid : cfg.beta_grid) = grid;
    } else if (key == "tol") cfg.tol = parse_real(key, value);
    else if (key == "epsilon") cfg.epsilon = parse_real(key, value);
    else if (key == "format") cfg.format = parse_format(value);
    else if (key == "out") cfg.out = value;
    else if (key == "raw-out") cfg.raw_out = value;
    else if (key == "workers") cfg.workers = static_cast<unsigned>(parse_unsigned(key, value));
    else if (key == "oracle") cfg.oracle = value;
    else if (key == "only") cfg.only = value;
    else if (key == "mutate-pmk") cfg.mutate_pmk = parse_bool(key, value);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError("key '" + key + "': " + e.what());
  }
}

/// Flat `key = value` text; '#' starts a comment line.
inline RunConfig parse_config(std::string_view text, RunConfig base = {}) {
  std::set<std::string> fresh;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_config_entry(base, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)), fresh);
  }
  return base;
}

inline std::string serialize(const RunConfig& cfg) {
  using detail::join;
  std::ostringstream out;
  out << "subcommand = " << cfg.subcommand << '\n';
  out << "n = " << join(cfg.n, [](Size v) { return std::to_string(v); }) << '\n';
  out << "k = " << cfg.k << '\n';
  out << "embedding = " << to_string(cfg.embedding) << '\n';
  out << "functional = " << join(cfg.functionals, [](Functional f) { return std::string(to_string(f)); }) << '\n';
  out << "reps = " << cfg.reps << '\n';
  out << "seed = " << cfg.seed << '\n';
  if (cfg.alpha_grid) out << "alpha-grid = " << join(*cfg.alpha_grid, format_double) << '\n';
  if (cfg.beta_grid) out << "beta-grid = " << join(*cfg.beta_grid, format_double) << '\n';
  out << "tol = " << format_double(cfg.tol) << '\n';
  out << "epsilon = " << format_double(cfg.epsilon) << '\n';
  out << "format = " << to_string(cfg.format) << '\n';
  if (cfg.out) out << "out = " << *cfg.out << '\n';
  if (cfg.raw_out) out << "raw-out = " << *cfg.raw_out << '\n';
  out << "workers = " << cfg.workers << '\n';
  out << "oracle = " << cfg.oracle << '\n';
  if (cfg.only) out << "only = " << *cfg.only << '\n';
  out << "mutate-pmk = " << (cfg.mutate_pmk ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace mlcoal
