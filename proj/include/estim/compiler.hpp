#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "estim/array.hpp"

namespace estim {

enum class PartitionKind : std::uint8_t { RowAlternate, Checkerboard, Custom };

/// Splits the array into group A and its complement B for electroadhesion
/// drive. RowAlternate puts even rows in A, Checkerboard puts (row+col)-even
/// electrodes in A, Custom takes an explicit group-A mask.
struct PartitionPattern {
  PartitionKind kind = PartitionKind::RowAlternate;
  std::vector<ElectrodeId> custom_mask;  // group A, Custom only

  static PartitionPattern row_alternate() { return {PartitionKind::RowAlternate, {}}; }
  static PartitionPattern checkerboard() { return {PartitionKind::Checkerboard, {}}; }
  static PartitionPattern custom(std::vector<ElectrodeId> mask) {
    return {PartitionKind::Custom, std::move(mask)};
  }
};

const char* partition_kind_name(PartitionKind kind);

/// Electroadhesion burst/pause pattern. Defaults encode the 125 Hz drive:
/// 50 us pulses swapped for 4 ms, then a 4 ms pause.
struct ElectroadhesionParams {
  std::uint32_t pulse_width_us = 50;
  std::uint32_t burst_us = 4000;
  std::uint32_t pause_us = 4000;
  double current_mA = 10.0;
  PartitionPattern pattern{};
  std::uint32_t periods = 1;
  // Optional all-Floating settling gap between role swaps. Off by default;
  // real switch hardware may need it, the reference drive does not use it.
  std::uint32_t dead_time_us = 0;
  // Pause frames ground every electrode by default (bleeds residual charge);
  // set to true to leave the array floating instead.
  bool pause_floating = false;

  std::uint32_t swap_cycles_per_burst() const {
    if (pulse_width_us == 0) fail(ErrorCode::Timing, "pulse width must be > 0 us");
    return burst_us / (2 * pulse_width_us);
  }
  /// Duration of one compiled period in us, including dead-time frames.
  std::uint64_t period_us() const;
  /// Burst/pause repetition rate; 125 Hz for the defaults.
  double envelope_frequency_hz() const { return 1e6 / static_cast<double>(period_us()); }
};

enum class Polarity : std::uint8_t { Anodic, Cathodic };

/// Single-electrode electrotactile pulse train. Anodic drives the target as
/// the sole current source with every other electrode grounded; cathodic is
/// the inverse.
struct ElectrotactileParams {
  ElectrodeId target{};
  Polarity polarity = Polarity::Anodic;
  std::uint32_t pulse_width_us = 200;
  double current_mA = 1.0;
  double repetition_frequency_hz = 50.0;
  std::uint32_t pulses = 50;
};

/// Resolves a partition to its group-A electrode set (sorted row-major).
/// Custom masks must be a non-empty proper subset of the array.
std::vector<ElectrodeId> partition_mask(const PartitionPattern& pattern,
                                        const ArrayGeometry& geometry);

/// Expands the burst/pause pattern into frames. Each period holds
/// burst/(2*pulse_width) swap cycles of A-source/B-ground then A-ground/
/// B-source frames, followed by one amplitude-0 pause frame. Bursts that are
/// not a whole number of swap cycles are rejected, never rounded: charge
/// balance depends on complete A/B pairs.
PulseSchedule compile_electroadhesion(const ElectroadhesionParams& params,
                                      const ArrayGeometry& geometry);

/// Expands a pulse train; each pulse occupies one full repetition period
/// (stimulation frame followed by an amplitude-0 all-Ground gap frame).
PulseSchedule compile_electrotactile(const ElectrotactileParams& params,
                                     const ArrayGeometry& geometry);

struct ScheduleStats {
  /// Burst/pause repetition rate, detected from the amplitude>0 run pattern;
  /// absent when the schedule is not periodic in that sense.
  std::optional<double> envelope_frequency_hz;
  double active_duty_fraction = 0.0;
  /// Number of adjacent stimulation-frame pairs that are exact role swaps of
  /// each other; absent when the schedule has no swap structure.
  std::optional<std::uint32_t> swap_cycle_count;
  double max_amplitude_mA = 0.0;
  std::uint64_t total_duration_us = 0;
  std::size_t stimulation_frame_count = 0;
};

ScheduleStats schedule_stats(const PulseSchedule& s);

}  // namespace estim
