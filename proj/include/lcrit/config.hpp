#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcrit/errors.hpp"
#include "lcrit/measures.hpp"

namespace lcrit {

/// RunConfig plus the knobs of every CLI command.
struct ExperimentConfig {
  RunConfig run;

  // charfn
  int grid_n = 9;
  double M = 1.0;
  double charfn_factor = 5.0;

  // discrepancy / sweep
  int permutations = 10;
  double discrepancy_factor = 5.0;
  int grid_resolution = 0;
  std::vector<double> T_sweep{1e3, 1e4, 1e5};

  // moments
  std::vector<int> k_list{1};
  std::vector<double> moment_sigmas{0.55, 0.6, 0.75};
  std::size_t moment_samples = 20000;
  /// Prime cutoff of the model used by `moments`. The check compares against
  /// the same truncated model, so its own tail tolerance can be loose.
  std::uint64_t moment_P = 10000;
  double moment_tail_tolerance = 1.0;

  // secondmoment
  std::vector<double> Y_list{1e2, 1e3, 1e4};
  /// When positive, also require the largest-Y gap below this multiple of the
  /// analytic tail sum.
  double tail_sum_factor = 0.0;

  // clt
  std::string clt_source = "synthetic";  // synthetic | random | deterministic
  std::size_t clt_n = 10000;
  std::vector<double> xi{1.0};
  double ks_constant = 1.63;
  /// Absolute KS tolerance; 0 means ks_constant / sqrt(n).
  double ks_tolerance = 0.0;

  // bs-check
  std::size_t bs_cases = 10000;
  double bs_slack = 1e-8;
  std::size_t bs_fourier_instances = 20;

  double tail_tolerance = 0.25;
  std::string out_dir = "out";
  std::string format = "csv";

  void validate() const {
    run.validate();
    if (grid_n < 2) throw DomainError("config: grid_n must be >= 2");
    if (!(M > 0)) throw DomainError("config: M must be positive");
    if (permutations < 1) throw DomainError("config: permutations must be >= 1");
    if (format != "csv" && format != "json") throw DomainError("config: format must be csv or json");
    if (clt_source != "synthetic" && clt_source != "random" && clt_source != "deterministic") {
      throw DomainError("config: clt_source must be synthetic, random or deterministic");
    }
    if (xi.size() != run.J() && clt_source != "synthetic") throw DimensionError("config: xi needs one entry per spec");
    if (moment_P < 2 || moment_samples < 1000) throw DomainError("config: moments need moment_P >= 2 and moment_samples >= 1000");
    if (T_sweep.empty() || Y_list.empty() || k_list.empty() || moment_sigmas.empty()) throw DomainError("config: empty list");
  }
};

using Json = nlohmann::json;

inline Json to_json(const ExperimentConfig& c) {
  return Json{{"T", c.run.T},
              {"G", c.run.G},
              {"Y", c.run.Y},
              {"n_t", c.run.n_t},
              {"n_rand", c.run.n_rand},
              {"P", c.run.P},
              {"seed", c.run.seed},
              {"specs", c.run.specs},
              {"grid_n", c.grid_n},
              {"M", c.M},
              {"charfn_factor", c.charfn_factor},
              {"permutations", c.permutations},
              {"discrepancy_factor", c.discrepancy_factor},
              {"grid_resolution", c.grid_resolution},
              {"T_sweep", c.T_sweep},
              {"k_list", c.k_list},
              {"moment_sigmas", c.moment_sigmas},
              {"moment_samples", c.moment_samples},
              {"moment_P", c.moment_P},
              {"moment_tail_tolerance", c.moment_tail_tolerance},
              {"Y_list", c.Y_list},
              {"tail_sum_factor", c.tail_sum_factor},
              {"clt_source", c.clt_source},
              {"clt_n", c.clt_n},
              {"xi", c.xi},
              {"ks_constant", c.ks_constant},
              {"ks_tolerance", c.ks_tolerance},
              {"bs_cases", c.bs_cases},
              {"bs_slack", c.bs_slack},
              {"bs_fourier_instances", c.bs_fourier_instances},
              {"tail_tolerance", c.tail_tolerance},
              {"out_dir", c.out_dir},
              {"format", c.format}};
}

inline ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("config: top level must be an object");
  ExperimentConfig c;
  const Json defaults = to_json(c);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!defaults.contains(it.key())) throw DomainError("config: unknown key '" + it.key() + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      try {
        j.at(key).get_to(field);
      } catch (const Json::exception& e) {
        throw DomainError(std::string("config: bad value for '") + key + "': " + e.what());
      }
    }
  };
  get("T", c.run.T);
  get("G", c.run.G);
  get("Y", c.run.Y);
  get("n_t", c.run.n_t);
  get("n_rand", c.run.n_rand);
  get("P", c.run.P);
  get("seed", c.run.seed);
  get("specs", c.run.specs);
  get("grid_n", c.grid_n);
  get("M", c.M);
  get("charfn_factor", c.charfn_factor);
  get("permutations", c.permutations);
  get("discrepancy_factor", c.discrepancy_factor);
  get("grid_resolution", c.grid_resolution);
  get("T_sweep", c.T_sweep);
  get("k_list", c.k_list);
  get("moment_sigmas", c.moment_sigmas);
  get("moment_samples", c.moment_samples);
  get("moment_P", c.moment_P);
  get("moment_tail_tolerance", c.moment_tail_tolerance);
  get("Y_list", c.Y_list);
  get("tail_sum_factor", c.tail_sum_factor);
  get("clt_source", c.clt_source);
  get("clt_n", c.clt_n);
  get("xi", c.xi);
  get("ks_constant", c.ks_constant);
  get("ks_tolerance", c.ks_tolerance);
  get("bs_cases", c.bs_cases);
  get("bs_slack", c.bs_slack);
  get("bs_fourier_instances", c.bs_fourier_instances);
  get("tail_tolerance", c.tail_tolerance);
  get("out_dir", c.out_dir);
  get("format", c.format);
  return c;
}

namespace detail {

// Drops a trailing '#' comment that is not inside a JSON string.
inline std::string strip_comment(const std::string& line) {
  bool in_string = false, escaped = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (ch == '\\') escaped = true;
      else if (ch == '"') in_string = false;
    } else if (ch == '"') {
      in_string = true;
    } else if (ch == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace detail

/// Either a whole JSON object, or `key = <JSON literal>` lines with '#' comments.
inline ExperimentConfig parse_config(const std::string& text) {
  const std::string body = detail::trim(text);
  if (!body.empty() && body.front() == '{') {
    try {
      return config_from_json(Json::parse(body));
    } catch (const Json::parse_error& e) {
      throw DomainError(std::string("config: ") + e.what());
    }
  }
  Json j = Json::object();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::trim(detail::strip_comment(line));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (j.contains(key)) throw DomainError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      j[key] = Json::parse(value);
    } catch (const Json::parse_error&) {
      throw DomainError("config line " + std::to_string(lineno) + ": value is not a JSON literal");
    }
  }
  return config_from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Key-value form, keys sorted.
inline std::string emit_config(const ExperimentConfig& c) {
  std::string out;
  const Json j = to_json(c);
  for (auto it = j.begin(); it != j.end(); ++it) out += it.key() + " = " + it.value().dump() + "\n";
  return out;
}

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits. The output
/// directory is left out so that a relocated run reproduces the same bytes.
inline std::string config_hash(const ExperimentConfig& c) {
  Json j = to_json(c);
  j.erase("out_dir");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lcrit
