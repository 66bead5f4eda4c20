#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "estim/cli.hpp"

using estim::Error;
using estim::cli::AnalyzeOptions;
using estim::cli::GlobalOptions;

int main(int argc, char** argv) {
  CLI::App app{"estim: electrode switch-schedule compiler, charge auditor, skin-circuit "
               "simulator, and vibration analyzer"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Override experiment.seed");
  app.add_option("--config", global.config_path, "Experiment config file");
  app.add_option("--out", global.out_override, "Override experiment.out_dir");
  app.add_option("--set", global.overrides,
                 "Override a config value, section.key=value (repeatable)");
  app.add_flag("--quiet", global.quiet, "Suppress informational output");

  auto* compile = app.add_subcommand("compile", "Compile the configured pattern, audit it, and "
                                                "write the .estp packet");
  bool allow_unbalanced = false;
  compile->add_flag("--allow-unbalanced", allow_unbalanced,
                    "Write the packet even when the audit fails");

  auto* run = app.add_subcommand("run", "Simulate stimulated + baseline conditions, write trace "
                                        "CSVs and the comparison report");
  bool gnuplot = false;
  run->add_flag("--gnuplot-script", gnuplot, "Also write a gnuplot script for the traces");

  auto* sweep = app.add_subcommand("sweep", "Run the experiment across values of one config key");
  std::string axis;
  std::vector<double> values;
  unsigned jobs = std::thread::hardware_concurrency();
  sweep->add_option("--axis", axis, "Config key to sweep, e.g. electroadhesion.current_ma")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")->delimiter(',');
  sweep->add_option("--jobs", jobs, "Max concurrent runs");

  auto* analyze = app.add_subcommand("analyze", "Detrend + RMS + spectral peak of a trace CSV");
  AnalyzeOptions analyze_options;
  analyze->add_option("csv", analyze_options.csv_path, "Trace CSV (full trace or t_s,accel_G)")
      ->required();
  analyze->add_option("--window-s", analyze_options.window_s, "Detrend window in seconds");
  analyze->add_flag("--trailing", analyze_options.trailing,
                    "Trailing moving-average window instead of centered");
  analyze->add_flag("--hann", analyze_options.hann, "Hann window before the DFT");
  analyze->add_option("--csv-out", analyze_options.detrended_csv_out,
                      "Write the detrended series as CSV");

  auto* audit = app.add_subcommand("audit", "Charge balance + safety audit of the configured "
                                            "pattern");
  std::string charge_csv;
  audit->add_option("--charge-csv", charge_csv, "Write per-electrode net charge as CSV");

  auto* decode = app.add_subcommand("decode", "Dump an .estp packet in human-readable form");
  std::string packet_path;
  bool full = false;
  decode->add_option("packet", packet_path, "Packet file")->required();
  decode->add_flag("--full", full, "Print the full role grid per frame");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return estim::cli::kExitInvalid;
  }
  if (seed_opt->count() > 0) global.seed_override = seed_value;

  try {
    if (analyze->parsed()) return estim::cli::cmd_analyze(analyze_options, global.quiet, std::cout);
    if (decode->parsed())
      return estim::cli::cmd_decode(packet_path, full, global.quiet, std::cout);

    const estim::ExperimentConfig config = estim::cli::load_config(global);
    if (compile->parsed())
      return estim::cli::cmd_compile(config, allow_unbalanced, global.quiet, std::cout);
    if (run->parsed()) return estim::cli::cmd_run(config, gnuplot, global.quiet, std::cout);
    if (sweep->parsed())
      return estim::cli::cmd_sweep(config, axis, values, jobs, global.quiet, std::cout);
    if (audit->parsed()) return estim::cli::cmd_audit(config, charge_csv, global.quiet, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return estim::cli::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return estim::cli::kExitRuntime;
  }
  return estim::cli::kExitInvalid;
}
