#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estim/array.hpp"
#include "estim/charge.hpp"
#include "estim/compiler.hpp"
#include "estim/sim.hpp"

namespace estim {

/// Everything one experiment needs, mirrored one-to-one by the config file
/// keys (section.key). Parsing is strict: unknown or duplicate keys are
/// errors, values must parse completely.
struct ExperimentConfig {
  enum class Mode { Electroadhesion, Electrotactile, Baseline };

  Mode mode = Mode::Electroadhesion;
  ArrayGeometry geometry{};
  ElectroadhesionParams electroadhesion{};
  ElectrotactileParams electrotactile{};
  SkinContactModel skin{};
  MechModel mech{};
  FingerTrajectory trajectory{};
  SafetyLimits safety{};

  double dt_s = 5e-6;
  double duration_s = 1.0;
  double noise_sigma_G = 5.8e-4;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  // Trajectory center follows the array center unless the config pins it.
  bool trajectory_center_set = false;

  static ExperimentConfig defaults();
  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  /// Sets one value by its config key, e.g. "electroadhesion.current_ma".
  /// Unknown keys are errors (this is also how sweep axes are validated).
  void apply_override(const std::string& dotted_key, const std::string& value);

  /// Cross-field checks plus sub-model validation.
  void validate() const;

  /// All recognized "section.key" names.
  static std::vector<std::string> known_keys();
};

const char* mode_name(ExperimentConfig::Mode mode);

/// Sample config with every key at its default, suitable as a template.
std::string default_config_text();

}  // namespace estim
