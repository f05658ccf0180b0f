#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "lcrit/clt.hpp"
#include "lcrit/config.hpp"
#include "lcrit/discrepancy.hpp"
#include "lcrit/io.hpp"
#include "lcrit/measures.hpp"
#include "lcrit/random_model.hpp"
#include "lcrit/smoothing.hpp"

namespace lcrit {

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct NamedTable {
  std::string name;
  Table table;
  /// Overrides the default metadata line (measure files carry dim and provenance).
  std::string meta;
};

struct CommandResult {
  std::string command;
  Json report = Json::object();
  std::vector<NamedTable> tables;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  void check(std::string name, bool ok, std::string detail) { checks.push_back({std::move(name), ok, std::move(detail)}); }
};

struct CommandContext {
  ExperimentConfig config;
  unsigned workers = 1;
  std::vector<std::string> inputs;  // measure CSV files
  SpecRegistry registry;
};

namespace detail {

inline CollectOptions collect_options(const CommandContext& ctx) {
  CollectOptions o;
  o.workers = ctx.workers;
  o.model.tail_tolerance = ctx.config.tail_tolerance;
  return o;
}

inline std::string fmt(double v) { return format_real(v); }

// Measures to compare: two input files, or a fresh deterministic/random pair.
inline std::pair<EmpiricalMeasure, EmpiricalMeasure> measure_pair(const CommandContext& ctx, const RunConfig& run) {
  if (ctx.inputs.size() == 2) return {read_measure_csv(ctx.inputs[0]), read_measure_csv(ctx.inputs[1])};
  if (!ctx.inputs.empty()) throw DomainError("expected exactly two measure files");
  const auto options = collect_options(ctx);
  return {collect_deterministic(run, ctx.registry, options).measure, collect_random(run, ctx.registry, options).measure};
}

struct DiscrepancyRow {
  double d_hat = 0, noise_floor = 0;
  bool exact = true;
  int resolution = 0;
  std::size_t n1 = 0, n2 = 0;
};

inline DiscrepancyRow discrepancy_row(const CommandContext& ctx, const EmpiricalMeasure& m1, const EmpiricalMeasure& m2) {
  if (m1.dim != m2.dim) throw DimensionError("discrepancy: measures have different dimensions");
  DiscrepancyOptions opts;
  opts.grid_resolution = ctx.config.grid_resolution;
  const auto d = discrepancy(m1, m2, opts);
  const auto nf = permutation_noise_floor(m1, m2, ctx.config.permutations, ctx.config.run.seed, ctx.workers, opts);
  return {d.value, nf.mean, d.exact, d.resolution, m1.size(), m2.size()};
}

}  // namespace detail

inline CommandResult cmd_sample(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto options = detail::collect_options(ctx);
  const auto det = collect_deterministic(c.run, ctx.registry, options);
  const auto rnd = collect_random(c.run, ctx.registry, options);
  const auto hash = config_hash(c);

  CommandResult r;
  r.command = "sample";
  r.tables.push_back({"deterministic", measure_table(det.measure), measure_meta(det.measure, hash, c.run.seed)});
  r.tables.push_back({"random", measure_table(rnd.measure), measure_meta(rnd.measure, hash, c.run.seed)});
  Table ord;
  ord.header = {"stratum", "t", "rejections"};
  for (std::size_t i = 0; i < det.ordinates.size(); ++i) {
    ord.add({static_cast<double>(i), det.ordinates[i], static_cast<double>(det.rejections[i])});
  }
  r.tables.push_back({"ordinates", std::move(ord), {}});
  r.report = {{"sigma", c.run.sigma()},
              {"dim", c.run.dim()},
              {"n_t", c.run.n_t},
              {"n_rand", c.run.n_rand},
              {"rejections", det.total_rejections()},
              {"random_tail_bounds", rnd.tail_bounds}};
  return r;
}

inline CommandResult cmd_discrepancy(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto [m1, m2] = detail::measure_pair(ctx, c.run);
  const auto row = detail::discrepancy_row(ctx, m1, m2);
  CommandResult r;
  r.command = "discrepancy";
  r.report = {{"d_hat", row.d_hat},
              {"noise_floor", row.noise_floor},
              {"bound_shape_value", c.run.bound_shape()},
              {"regime_flag", c.run.regime_flag()},
              {"exact", row.exact},
              {"grid_resolution", row.resolution},
              {"n1", row.n1},
              {"n2", row.n2},
              {"permutations", c.permutations}};
  r.check("d_hat <= discrepancy_factor * noise_floor", row.d_hat <= c.discrepancy_factor * row.noise_floor,
          "d_hat = " + detail::fmt(row.d_hat) + ", noise floor = " + detail::fmt(row.noise_floor));
  return r;
}

inline CommandResult cmd_sweep(const CommandContext& ctx) {
  const auto& c = ctx.config;
  if (!ctx.inputs.empty()) throw DomainError("sweep collects its own samples; no input files accepted");
  CommandResult r;
  r.command = "sweep";
  Table t;
  t.header = {"T", "d_hat", "noise_floor", "bound_shape_value", "regime_flag", "exact"};
  std::vector<detail::DiscrepancyRow> rows;
  Json jrows = Json::array();
  for (double T : c.T_sweep) {
    RunConfig run = c.run;
    run.T = T;
    const auto [m1, m2] = detail::measure_pair(ctx, run);
    rows.push_back(detail::discrepancy_row(ctx, m1, m2));
    const auto& row = rows.back();
    t.add({T, row.d_hat, row.noise_floor, run.bound_shape(), run.regime_flag() ? 1.0 : 0.0, row.exact ? 1.0 : 0.0});
    jrows.push_back({{"T", T},
                     {"d_hat", row.d_hat},
                     {"noise_floor", row.noise_floor},
                     {"bound_shape_value", run.bound_shape()},
                     {"regime_flag", run.regime_flag()}});
  }
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double slack = 2.0 * std::max(rows[k - 1].noise_floor, rows[k].noise_floor);
    r.check("d_hat non-increasing from T = " + detail::fmt(c.T_sweep[k - 1]) + " to " + detail::fmt(c.T_sweep[k]),
            rows[k].d_hat <= rows[k - 1].d_hat + slack,
            detail::fmt(rows[k - 1].d_hat) + " -> " + detail::fmt(rows[k].d_hat) + ", slack " + detail::fmt(slack));
  }
  r.report = {{"rows", jrows}};
  r.tables.push_back({"sweep", std::move(t), {}});
  return r;
}

inline CommandResult cmd_charfn(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto [m1, m2] = detail::measure_pair(ctx, c.run);
  const auto gap = char_fn_gap(m1, m2, c.M, c.grid_n, ctx.workers);
  CommandResult r;
  r.command = "charfn";
  r.report = {{"gap", gap.gap}, {"noise_floor", gap.noise_floor}, {"argmax", gap.argmax}, {"M", c.M}, {"grid_n", c.grid_n}};
  r.check("gap <= charfn_factor * noise_floor", gap.gap <= c.charfn_factor * gap.noise_floor,
          "gap = " + detail::fmt(gap.gap) + ", noise floor = " + detail::fmt(gap.noise_floor));
  return r;
}

inline CommandResult cmd_moments(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto spec = ctx.registry.resolve(c.run.specs.front());
  const auto primes = std::make_shared<const PrimeTable>(primes_up_to(c.moment_P));
  ModelOptions mo;
  mo.tail_tolerance = c.moment_tail_tolerance;
  CommandResult r;
  r.command = "moments";
  Table t;
  t.header = {"sigma", "k", "empirical", "std_error", "analytic", "z"};
  Json jrows = Json::array();
  for (double sigma : c.moment_sigmas) {
    const RandomModel model(spec, sigma, primes, mo);
    const auto values = sample_log_l(model, c.moment_samples, c.run.seed, ctx.workers);
    std::vector<double> re(values.size()), im(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) re[i] = values[i].real(), im[i] = values[i].imag();
    const auto er = mean_and_error(re), ei = mean_and_error(im);
    r.check("mean of log L is 0 at sigma = " + detail::fmt(sigma),
            std::abs(er.mean) <= 4 * er.std_error && std::abs(ei.mean) <= 4 * ei.std_error,
            "mean = " + detail::fmt(er.mean) + " + " + detail::fmt(ei.mean) + "i");
    for (int k : c.k_list) {
      if (k < 1) throw DomainError("moments: k must be >= 1");
      std::vector<double> powers(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) powers[i] = std::pow(std::norm(values[i]), k);
      const auto est = mean_and_error(powers);
      Json row = {{"sigma", sigma}, {"k", k}, {"empirical", est.mean}, {"std_error", est.std_error}};
      if (k == 1) {
        // Same truncated model, so the cutoff does not enter the comparison.
        const double analytic = model.second_moment();
        const double z = (est.mean - analytic) / est.std_error;
        row["analytic"] = analytic;
        row["z"] = z;
        t.add({sigma, static_cast<double>(k), est.mean, est.std_error, analytic, z});
        r.check("E|log L|^2 matches analytic at sigma = " + detail::fmt(sigma), std::abs(z) <= 4.0, "z = " + detail::fmt(z));
      } else {
        t.add({sigma, static_cast<double>(k), est.mean, est.std_error, std::string{}, std::string{}});
      }
      jrows.push_back(row);
    }
  }
  r.report = {{"rows", jrows}, {"samples", c.moment_samples}, {"P", c.moment_P}};
  r.tables.push_back({"moments", std::move(t), {}});
  return r;
}

inline CommandResult cmd_secondmoment(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto gap = second_moment_gap(c.run, ctx.registry, c.Y_list, detail::collect_options(ctx));
  const auto spec = ctx.registry.resolve(c.run.specs.front());
  CommandResult r;
  r.command = "secondmoment";
  Table t;
  t.header = {"Y", "mean", "std_error", "tail_sum"};
  Json jrows = Json::array();
  std::vector<double> tails;
  for (const auto& row : gap.rows) {
    tails.push_back(dirichlet_tail_sum(spec, c.run.sigma(), row.Y));
    t.add({row.Y, row.mean, row.std_error, tails.back()});
    jrows.push_back({{"Y", row.Y}, {"mean", row.mean}, {"std_error", row.std_error}, {"tail_sum", tails.back()}});
  }
  for (std::size_t k = 1; k < gap.rows.size(); ++k) {
    const auto &a = gap.rows[k - 1], &b = gap.rows[k];
    const double slack = 2.0 * std::hypot(a.std_error, b.std_error);
    r.check("gap non-increasing from Y = " + detail::fmt(a.Y) + " to " + detail::fmt(b.Y), b.mean <= a.mean + slack,
            detail::fmt(a.mean) + " -> " + detail::fmt(b.mean) + ", slack " + detail::fmt(slack));
  }
  if (c.tail_sum_factor > 0) {
    for (std::size_t k = 0; k < gap.rows.size(); ++k) {
      r.check("gap below tail_sum_factor * tail sum at Y = " + detail::fmt(gap.rows[k].Y), gap.rows[k].mean <= c.tail_sum_factor * tails[k],
              detail::fmt(gap.rows[k].mean) + " vs " + detail::fmt(tails[k]));
    }
  }
  r.report = {{"sigma", c.run.sigma()}, {"rows", jrows}, {"rejections", gap.rejections}};
  r.tables.push_back({"secondmoment", std::move(t), {}});
  return r;
}

inline CommandResult cmd_clt(const CommandContext& ctx) {
  const auto& c = ctx.config;
  EmpiricalMeasure m;
  CLTConfig cc;
  cc.G = c.run.G;
  cc.ks_constant = c.ks_constant;
  if (!ctx.inputs.empty()) {
    if (ctx.inputs.size() != 1) throw DomainError("clt: expected at most one measure file");
    m = read_measure_csv(ctx.inputs[0]);
    cc.xi = c.xi;
  } else if (c.clt_source == "synthetic") {
    m = synthetic_clt_measure(c.clt_n, c.run.J(), c.run.G, c.run.seed);
    cc.xi.assign(c.run.J(), 1.0);
  } else {
    RunConfig run = c.run;
    run.n_t = run.n_rand = c.clt_n;
    const auto options = detail::collect_options(ctx);
    m = c.clt_source == "random" ? collect_random(run, ctx.registry, options).measure
                                 : collect_deterministic(run, ctx.registry, options).measure;
    cc.xi = c.xi;
  }
  cc.coeffs = ExpansionCoefficients::leading(cc.xi.size());
  const auto rep = clt_fit(m, cc, ctx.workers);
  const double tol = c.ks_tolerance > 0 ? c.ks_tolerance : rep.ks_threshold;

  CommandResult r;
  r.command = "clt";
  Table t;
  t.header = {"box", "empirical", "predicted", "std_error"};
  Json boxes = Json::array();
  for (std::size_t i = 0; i < rep.boxes.size(); ++i) {
    const auto& b = rep.boxes[i];
    t.add({static_cast<double>(i), b.empirical, b.predicted, b.std_error});
    boxes.push_back({{"a", b.rect.a}, {"b", b.rect.b}, {"c", b.rect.c}, {"d", b.rect.d}, {"empirical", b.empirical}, {"predicted", b.predicted}, {"std_error", b.std_error}});
  }
  for (std::size_t k = 0; k < rep.ks.size(); ++k) {
    const std::string col = (k % 2 == 0 ? "log_abs_" : "arg_") + std::to_string(k / 2 + 1);
    r.check("KS of " + col + " within tolerance", rep.ks[k] <= tol, "ks = " + detail::fmt(rep.ks[k]) + ", tolerance " + detail::fmt(tol));
  }
  r.report = {{"n", rep.n}, {"psi", rep.psi}, {"ks", rep.ks}, {"ks_tolerance", tol}, {"source", ctx.inputs.empty() ? c.clt_source : "file"}, {"boxes", boxes}};
  r.tables.push_back({"clt_boxes", std::move(t), {}});
  return r;
}

inline CommandResult cmd_bs_check(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto cert = bs_certificate_batch(c.bs_cases, c.run.seed, c.bs_slack, ctx.workers);
  const auto four = bs_fourier_battery(c.bs_fourier_instances, c.run.seed + 1, ctx.workers);
  CommandResult r;
  r.command = "bs-check";
  r.report = {{"cases", cert.cases},
              {"bound_violations", cert.bound_violations},
              {"sandwich_violations", cert.sandwich_violations},
              {"worst_excess", cert.worst_excess},
              {"fourier_instances", four.instances},
              {"fourier_worst_outside", four.worst_outside},
              {"fourier_worst_inside_scaled", four.worst_inside},
              {"tent_worst", four.worst_tent}};
  r.check("|F| <= 1", cert.bound_violations == 0, std::to_string(cert.bound_violations) + " violations");
  r.check("sandwich 0 <= 1 - F <= K + K", cert.sandwich_violations == 0, std::to_string(cert.sandwich_violations) + " violations");
  r.check("Fourier support and indicator approximation", four.failures == 0, std::to_string(four.failures) + " failures");
  return r;
}

inline CommandResult run_command(const std::string& name, const CommandContext& ctx) {
  ctx.config.validate();
  if (name == "sample") return cmd_sample(ctx);
  if (name == "discrepancy") return cmd_discrepancy(ctx);
  if (name == "sweep") return cmd_sweep(ctx);
  if (name == "charfn") return cmd_charfn(ctx);
  if (name == "moments") return cmd_moments(ctx);
  if (name == "secondmoment") return cmd_secondmoment(ctx);
  if (name == "clt") return cmd_clt(ctx);
  if (name == "bs-check") return cmd_bs_check(ctx);
  throw DomainError("unknown command '" + name + "'");
}

/// Writes the result under config.out_dir and returns the paths written.
/// Nothing here depends on timing or worker count.
inline std::vector<std::filesystem::path> write_result(const CommandResult& r, const ExperimentConfig& c) {
  const std::filesystem::path dir = c.out_dir;
  const auto hash = config_hash(c);
  std::vector<std::filesystem::path> written;
  Json sidecar = {{"schema", kSchema},
                  {"command", r.command},
                  {"config_hash", hash},
                  {"seed", c.run.seed},
                  {"config", to_json(c)},
                  {"report", r.report},
                  {"pass", r.pass()}};
  sidecar["config"].erase("out_dir");
  Json checks = Json::array();
  for (const auto& ch : r.checks) checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
  sidecar["checks"] = checks;

  Json files = Json::array();
  Json tables = Json::object();
  for (const auto& t : r.tables) {
    if (c.format == "csv") {
      const std::string meta = t.meta.empty() ? std::string(kSchema) + " table=" + t.name + " config_hash=" + hash +
                                                    " seed=" + std::to_string(c.run.seed)
                                              : t.meta;
      const auto path = dir / (t.name + ".csv");
      write_text(path, to_csv(t.table, meta));
      written.push_back(path);
      files.push_back(t.name + ".csv");
    } else {
      Json rows = Json::array();
      for (const auto& row : t.table.rows) {
        Json jr = Json::array();
        for (const auto& cell : row) {
          if (const auto* d = std::get_if<double>(&cell)) jr.push_back(*d);
          else jr.push_back(std::get<std::string>(cell));
        }
        rows.push_back(jr);
      }
      tables[t.name] = {{"header", t.table.header}, {"rows", rows}};
    }
  }
  if (c.format == "csv") sidecar["files"] = files;
  else sidecar["tables"] = tables;

  const auto path = dir / (r.command + ".json");
  write_text(path, sidecar.dump(2) + "\n");
  written.push_back(path);
  return written;
}

}  // namespace lcrit
