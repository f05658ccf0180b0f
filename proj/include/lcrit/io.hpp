#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lcrit/errors.hpp"
#include "lcrit/measures.hpp"

namespace lcrit {

inline constexpr const char* kSchema = "lcrit-lab/1";

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DomainError("write failed for '" + path.string() + "'");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Rows of reals or strings under a header. Strings are quoted per RFC 4180
/// when they contain a comma, quote or line break.
struct Table {
  using Cell = std::variant<double, std::string>;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != header.size()) throw DimensionError("Table: row width differs from header");
    rows.push_back(std::move(row));
  }
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// '#'-prefixed metadata line, header, then rows; CRLF line ends.
inline std::string to_csv(const Table& t, const std::string& meta) {
  std::string out = "# " + meta + "\r\n";
  auto line = [&](const auto& cells, auto&& render) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += render(cells[k]);
    }
    out += "\r\n";
  };
  line(t.header, [](const std::string& s) { return csv_field(s); });
  for (const auto& row : t.rows) {
    line(row, [](const Table::Cell& c) {
      if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
      return csv_field(std::get<std::string>(c));
    });
  }
  return out;
}

inline std::string measure_meta(const EmpiricalMeasure& m, const std::string& hash, std::uint64_t seed) {
  return std::string(kSchema) + " dim=" + std::to_string(m.dim) + " provenance=" + to_string(m.provenance) + " config_hash=" + hash +
         " seed=" + std::to_string(seed);
}

inline Table measure_table(const EmpiricalMeasure& m) {
  Table t;
  for (std::size_t j = 1; 2 * j <= m.dim; ++j) {
    t.header.push_back("log_abs_" + std::to_string(j));
    t.header.push_back("arg_" + std::to_string(j));
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto p = m.point(i);
    t.add({p.begin(), p.end()});
  }
  return t;
}

inline std::string measure_csv(const EmpiricalMeasure& m, const std::string& hash, std::uint64_t seed) {
  return to_csv(measure_table(m), measure_meta(m, hash, seed));
}

inline EmpiricalMeasure parse_measure_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  EmpiricalMeasure m(0, Provenance::deterministic);
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        if (tok.rfind("provenance=", 0) == 0) m.provenance = provenance_from_string(tok.substr(11));
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      if (cells.empty() || cells.size() % 2 != 0) throw DimensionError("measure CSV: header must have 2J columns");
      m.dim = cells.size();
      have_header = true;
      continue;
    }
    if (cells.size() != m.dim) throw DimensionError("measure CSV line " + std::to_string(lineno) + ": wrong column count");
    for (const auto& c : cells) {
      double v = 0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) throw DomainError("measure CSV line " + std::to_string(lineno) + ": bad number");
      m.data.push_back(v);
    }
  }
  if (!have_header) throw DomainError("measure CSV: missing header");
  m.validate();
  return m;
}

inline EmpiricalMeasure read_measure_csv(const std::filesystem::path& path) { return parse_measure_csv(read_text(path)); }

}  // namespace lcrit
