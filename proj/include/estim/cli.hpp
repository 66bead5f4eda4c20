#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "estim/config.hpp"

namespace estim::cli {

// Exit codes, stable contract: 0 success, 1 runtime failure (simulation
// divergence, I/O, failed audit), 2 invalid input/config.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvalid = 2;

int exit_code_for(const Error& e);

struct GlobalOptions {
  std::string config_path;              // empty = built-in defaults
  std::string out_override;             // --out
  std::optional<std::uint64_t> seed_override;  // --seed
  std::vector<std::string> overrides;   // --set section.key=value
  bool quiet = false;
};

/// Config file (or defaults) + --set/--seed/--out overrides.
ExperimentConfig load_config(const GlobalOptions& options);

struct AnalyzeOptions {
  std::string csv_path;
  double window_s = 0.2;
  bool trailing = false;
  bool hann = false;
  std::string detrended_csv_out;  // empty = none
};

int cmd_compile(const ExperimentConfig& config, bool allow_unbalanced, bool quiet,
                std::ostream& out);
int cmd_run(const ExperimentConfig& config, bool gnuplot_script, bool quiet, std::ostream& out);
int cmd_sweep(const ExperimentConfig& config, const std::string& axis,
              const std::vector<double>& values, unsigned jobs, bool quiet, std::ostream& out);
int cmd_analyze(const AnalyzeOptions& options, bool quiet, std::ostream& out);
int cmd_audit(const ExperimentConfig& config, const std::string& charge_csv, bool quiet,
              std::ostream& out);
int cmd_decode(const std::string& packet_path, bool full, bool quiet, std::ostream& out);

}  // namespace estim::cli
