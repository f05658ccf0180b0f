#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcrit/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lcrit-lab: value distribution experiments for L-functions near the critical line"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir, format;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::vector<std::string> inputs;
  bool print_config = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sample", "collect the deterministic and random measures"},
      {"discrepancy", "rectangle discrepancy between two measures with a permutation noise floor"},
      {"sweep", "discrepancy over the T_sweep list"},
      {"charfn", "characteristic function gap on a grid"},
      {"moments", "random-model moments against the analytic second moment"},
      {"secondmoment", "mean |log L - R_Y|^2 over the Y_list"},
      {"clt", "leading-order Gaussian fit"},
      {"bs-check", "Beurling-Selberg certificate and Fourier support batteries"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "config file (key = JSON value lines, or one JSON object)");
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--seed", seed, "master seed (overrides seed)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--print-config", print_config, "print the resolved config and exit");
    if (name == "discrepancy" || name == "charfn" || name == "clt") sub->add_option("inputs", inputs, "measure CSV files");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    lcrit::CommandContext ctx;
    if (!config_path.empty()) ctx.config = lcrit::load_config(config_path);
    if (!out_dir.empty()) ctx.config.out_dir = out_dir;
    if (!format.empty()) ctx.config.format = format;
    if (seed) ctx.config.run.seed = *seed;
    ctx.workers = workers;
    ctx.inputs = inputs;
    ctx.config.validate();
    if (print_config) {
      std::cout << lcrit::emit_config(ctx.config);
      return 0;
    }

    const auto start = std::chrono::steady_clock::now();
    const auto result = lcrit::run_command(command, ctx);
    const auto written = lcrit::write_result(result, ctx.config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::fprintf(stderr, "%s: config %s, %u worker(s), %.2f s\n", command.c_str(), lcrit::config_hash(ctx.config).c_str(), workers, seconds);
    for (const auto& p : written) std::fprintf(stderr, "  wrote %s\n", p.string().c_str());
    if (!result.pass()) {
      for (const auto& c : result.checks) {
        if (!c.pass) std::fprintf(stderr, "FAILED %s: %s\n", c.name.c_str(), c.detail.c_str());
      }
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
