#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mlcoal/config.hpp"

namespace mlcoal {

using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t>;

/// Column-named rows written as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline std::string csv_cell(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string quoted = "\"";
    for (char ch : *s) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return quoted + "\"";
  }
  if (auto d = std::get_if<double>(&c)) return std::isnan(*d) ? std::string() : format_double(*d);
  if (auto u = std::get_if<std::uint64_t>(&c)) return std::to_string(*u);
  return std::to_string(std::get<std::int64_t>(c));
}

inline nlohmann::json json_cell(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) return *s;
  if (auto d = std::get_if<double>(&c)) return std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(nullptr);
  if (auto u = std::get_if<std::uint64_t>(&c)) return *u;
  return std::get<std::int64_t>(c);
}

inline nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(obj));
  }
  return rows;
}

inline void write_table(const Table& t, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::Json) {
    out << to_json(t).dump(1) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

}  // namespace mlcoal
