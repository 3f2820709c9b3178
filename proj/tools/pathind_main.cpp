#include <CLI11.hpp>
#include <iostream>

#include "pathind/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "pathind: path-independence laboratory for Girsanov densities of SDEs"};
  app.require_subcommand(1);
  app.footer(
      "Flags (per command):\n"
      "  --config <file>   configuration file (JSON), required\n"
      "  --out <dir>       output directory (default .)\n"
      "  --seed <n>        override the configured seed\n"
      "  --threads <n>     worker threads (default 1)\n"
      "  --expect <independent|dependent>   verify only; exit 2 on mismatch\n"
      "Exit status: 0 success, 2 quantitative failure, 1 error.");

  pathind::CommandOptions opts;
  std::string expect;
  std::uint64_t seed = 0;

  for (const auto& name : pathind::kCommands) {
    CLI::App* sub = nullptr;
    if (name == "simulate") {
      sub = app.add_subcommand(name, "simulate paths; writes paths.csv");
    } else if (name == "verify") {
      sub = app.add_subcommand(
          name, "refinement study and verdict; writes report.json, study.csv, terminal.csv");
    } else if (name == "kpz-solve") {
      sub = app.add_subcommand(
          name, "Cole-Hopf solve from terminal data; writes kpz_<k>.csv");
    } else if (name == "burgers-check") {
      sub = app.add_subcommand(name, "generalized Burgers residual scan; writes burgers.csv");
    } else if (name == "gradient-check") {
      sub = app.add_subcommand(name, "curl test of a^{-1} b; writes gradient.json");
    } else {
      sub = app.add_subcommand(name, "E[exp(-Zhat_T)] = 1 check; writes martingale.json");
    }
    sub->add_option("--config", opts.config, "configuration file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory")
        ->capture_default_str();
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--threads", opts.threads, "worker threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    if (name == "verify") {
      sub->add_option("--expect", expect,
                      "exit 2 unless the verdict matches")
          ->check(CLI::IsMember({"independent", "dependent"}));
    }
    sub->callback([&, name, sub] {
      opts.command = name;
      if (sub->count("--seed")) opts.seed = seed;
      if (name == "verify" && sub->count("--expect")) opts.expect = expect;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return pathind::run_command(opts, std::cout, std::cerr);
}
