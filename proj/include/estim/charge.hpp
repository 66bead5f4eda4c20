#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estim/array.hpp"

namespace estim {

/// Signed per-electrode charge ledger, in uC. Positive means current sourced
/// out of the electrode into the skin.
struct ChargeReport {
  std::vector<double> per_electrode_net_uC;  // linear index order
  double max_abs_net_uC = 0.0;
  /// Worst per-electrode |running net charge| seen at any frame boundary.
  double max_instantaneous_imbalance_uC = 0.0;

  double total_net_uC() const;
};

/// Static drive limits. max_net_charge_uC defaults to 0 because the safety
/// story is exact balance; compliance is checked post-simulation.
struct SafetyLimits {
  double max_current_mA = 10.0;
  std::uint32_t max_pulse_width_us = 50;
  double max_net_charge_uC = 0.0;
  double max_compliance_V = 300.0;
};

struct SafetyViolation {
  enum class Kind { Current, PulseWidth, NetCharge };
  Kind kind;
  // Frame index for Current/PulseWidth, electrode linear index for NetCharge.
  std::size_t index;
  double measured;
  double limit;
  std::string message;
};

struct SafetyReport {
  bool pass = true;
  std::vector<SafetyViolation> violations;
};

const char* violation_kind_name(SafetyViolation::Kind kind);

/// Per-frame equal-split attribution: commanded current divides evenly among
/// same-role electrodes, +I/|sources| out of each source and -I/|grounds|
/// into each ground, times the frame duration. This is a conservative static
/// rule; the simulator recomputes true coverage-dependent currents.
/// Throws Error(OpenCircuit) for a frame driving current without a complete
/// path.
ChargeReport net_charge(const PulseSchedule& s);

/// Flags stimulation frames above the current or pulse-width limit and
/// electrodes whose final net charge exceeds the balance limit. Pulse-width
/// applies to current-carrying frames only; idle pause frames may be long.
/// Violations are report entries, not exceptions.
SafetyReport check_safety(const PulseSchedule& s, const SafetyLimits& limits = {});

}  // namespace estim
