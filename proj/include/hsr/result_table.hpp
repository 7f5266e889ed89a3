#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hsr {

// Numbers are written with 6 significant digits; cells are stored already
// rounded so a table equals what it serializes to.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  // Avoid a negative zero in the output.
  if (std::string_view(buf) == "-0") return "0";
  return buf;
}

inline double parse_number_cell(const std::string& cell) {
  if (cell == "nan") return std::nan("");
  if (cell == "inf") return HUGE_VAL;
  if (cell == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size()) {
    throw std::runtime_error("result table: bad numeric cell '" + cell + "'");
  }
  return v;
}

inline double round_to_format(double v) {
  return std::isfinite(v) ? parse_number_cell(format_number(v)) : v;
}

/// Position-indexed numeric table with `# provenance:` metadata.
struct ResultTable {
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> values) {
    if (values.size() != header.size()) {
      throw std::logic_error("result table: row width does not match header");
    }
    for (double& v : values) v = round_to_format(v);
    rows.push_back(std::move(values));
  }

  [[nodiscard]] std::size_t column(std::string_view name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw std::out_of_range("result table: no column '" + std::string(name) + "'");
  }

  [[nodiscard]] std::vector<double> column_values(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }

  [[nodiscard]] std::string provenance_value(std::string_view key) const {
    for (const auto& [k, v] : provenance) {
      if (k == key) return v;
    }
    return {};
  }

  bool operator==(const ResultTable& other) const {
    if (provenance != other.provenance || header != other.header) return false;
    if (rows.size() != other.rows.size()) return false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        const double a = rows[r][c];
        const double b = other.rows[r][c];
        if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
      }
    }
    return true;
  }
};

inline std::string write_csv(const ResultTable& t) {
  std::string out = "# provenance:";
  for (const auto& [k, v] : t.provenance) {
    out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  out += '\n';
  for (std::size_t k = 0; k < t.header.size(); ++k) {
    if (k) out += ',';
    out += t.header[k];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_number(row[k]);
    }
    out += '\n';
  }
  return out;
}

inline ResultTable read_csv(std::string_view text) {
  ResultTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (line.rfind("# provenance:", 0) == 0) {
      std::istringstream fields(line.substr(13));
      std::string field;
      while (fields >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw std::runtime_error("result table: bad provenance field");
        t.provenance.emplace_back(field.substr(0, eq), field.substr(eq + 1));
      }
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      t.header = split(line);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_number_cell(cell));
    if (row.size() != t.header.size()) throw std::runtime_error("result table: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace hsr
