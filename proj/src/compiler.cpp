#include "estim/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace estim {

const char* partition_kind_name(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::RowAlternate: return "row-alternate";
    case PartitionKind::Checkerboard: return "checkerboard";
    case PartitionKind::Custom: return "custom";
  }
  return "unknown";
}

std::vector<ElectrodeId> partition_mask(const PartitionPattern& pattern,
                                        const ArrayGeometry& geometry) {
  geometry.validate();
  std::vector<ElectrodeId> group_a;
  switch (pattern.kind) {
    case PartitionKind::RowAlternate:
      for (int r = 0; r < geometry.rows; ++r)
        for (int c = 0; c < geometry.cols; ++c)
          if (r % 2 == 0) group_a.push_back({r, c});
      break;
    case PartitionKind::Checkerboard:
      for (int r = 0; r < geometry.rows; ++r)
        for (int c = 0; c < geometry.cols; ++c)
          if ((r + c) % 2 == 0) group_a.push_back({r, c});
      break;
    case PartitionKind::Custom: {
      std::set<ElectrodeId> unique;
      for (ElectrodeId id : pattern.custom_mask) {
        if (!geometry.contains(id))
          fail(ErrorCode::OutOfBounds, "custom partition electrode (" + std::to_string(id.row) +
                                           "," + std::to_string(id.col) + ") outside array");
        unique.insert(id);
      }
      group_a.assign(unique.begin(), unique.end());
      break;
    }
  }
  const auto total = static_cast<std::size_t>(geometry.electrode_count());
  if (group_a.empty() || group_a.size() >= total)
    fail(ErrorCode::InvalidPartition,
         "group A has " + std::to_string(group_a.size()) + " of " + std::to_string(total) +
             " electrodes; need a non-empty proper subset");
  return group_a;
}

std::uint64_t ElectroadhesionParams::period_us() const {
  const std::uint64_t cycles = swap_cycles_per_burst();
  const std::uint64_t stim_frames = 2 * cycles;
  const std::uint64_t dead_frames = (dead_time_us > 0 && stim_frames > 0) ? stim_frames - 1 : 0;
  return stim_frames * pulse_width_us + dead_frames * dead_time_us + pause_us;
}

namespace {

Frame partition_frame(const ArrayGeometry& geometry, const std::vector<ElectrodeId>& group_a,
                      ElectrodeRole role_a, ElectrodeRole role_b, std::uint32_t duration_us,
                      double amplitude_mA) {
  Frame f;
  f.duration_us = duration_us;
  f.amplitude_mA = amplitude_mA;
  f.roles.assign(static_cast<std::size_t>(geometry.electrode_count()), role_b);
  for (ElectrodeId id : group_a) f.roles[static_cast<std::size_t>(linear_index(id, geometry))] = role_a;
  return f;
}

}  // namespace

PulseSchedule compile_electroadhesion(const ElectroadhesionParams& params,
                                      const ArrayGeometry& geometry) {
  if (params.pulse_width_us == 0) fail(ErrorCode::Timing, "pulse width must be > 0 us");
  if (params.current_mA < 0.0 || !std::isfinite(params.current_mA))
    fail(ErrorCode::Range, "current must be finite and >= 0 mA");
  if (params.periods == 0) fail(ErrorCode::EmptySchedule, "periods must be >= 1");
  if (params.burst_us == 0 || params.burst_us % (2 * params.pulse_width_us) != 0)
    fail(ErrorCode::Alignment, "burst " + std::to_string(params.burst_us) +
                                   " us is not a whole number of " +
                                   std::to_string(2 * params.pulse_width_us) +
                                   " us swap cycles");

  const std::vector<ElectrodeId> group_a = partition_mask(params.pattern, geometry);
  const std::uint32_t cycles = params.swap_cycles_per_burst();

  const Frame a_source = partition_frame(geometry, group_a, ElectrodeRole::Source,
                                         ElectrodeRole::Ground, params.pulse_width_us,
                                         params.current_mA);
  const Frame b_source = partition_frame(geometry, group_a, ElectrodeRole::Ground,
                                         ElectrodeRole::Source, params.pulse_width_us,
                                         params.current_mA);
  const Frame dead = uniform_frame(geometry, params.dead_time_us, ElectrodeRole::Floating);
  const Frame pause = uniform_frame(geometry, params.pause_us,
                                    params.pause_floating ? ElectrodeRole::Floating
                                                          : ElectrodeRole::Ground);

  PulseSchedule s;
  s.geometry = geometry;
  s.frames.reserve(static_cast<std::size_t>(params.periods) * (2 * cycles + 1));
  for (std::uint32_t p = 0; p < params.periods; ++p) {
    for (std::uint32_t c = 0; c < cycles; ++c) {
      s.frames.push_back(a_source);
      if (params.dead_time_us > 0) s.frames.push_back(dead);
      s.frames.push_back(b_source);
      if (params.dead_time_us > 0 && c + 1 < cycles) s.frames.push_back(dead);
    }
    if (params.pause_us > 0) s.frames.push_back(pause);
  }
  s.label = std::string("electroadhesion ") + partition_kind_name(params.pattern.kind) + " pw=" +
            std::to_string(params.pulse_width_us) + "us burst=" + std::to_string(params.burst_us) +
            "us pause=" + std::to_string(params.pause_us) + "us periods=" +
            std::to_string(params.periods);
  return s;
}

PulseSchedule compile_electrotactile(const ElectrotactileParams& params,
                                     const ArrayGeometry& geometry) {
  geometry.validate();
  if (!geometry.contains(params.target))
    fail(ErrorCode::OutOfBounds, "target electrode outside array");
  if (params.pulses == 0) fail(ErrorCode::EmptySchedule, "pulse count must be >= 1");
  if (params.pulse_width_us == 0) fail(ErrorCode::Timing, "pulse width must be > 0 us");
  if (params.current_mA < 0.0 || !std::isfinite(params.current_mA))
    fail(ErrorCode::Range, "current must be finite and >= 0 mA");
  if (!(params.repetition_frequency_hz > 0.0))
    fail(ErrorCode::Timing, "repetition frequency must be > 0 Hz");

  // Repetition period realized at 1 us resolution (the firmware tick).
  const auto period_us =
      static_cast<std::uint64_t>(std::llround(1e6 / params.repetition_frequency_hz));
  if (period_us <= params.pulse_width_us)
    fail(ErrorCode::Timing, "duty >= 100%: period " + std::to_string(period_us) +
                                " us <= pulse width " + std::to_string(params.pulse_width_us) +
                                " us");

  const bool anodic = params.polarity == Polarity::Anodic;
  Frame stim = partition_frame(geometry, {params.target},
                               anodic ? ElectrodeRole::Source : ElectrodeRole::Ground,
                               anodic ? ElectrodeRole::Ground : ElectrodeRole::Source,
                               params.pulse_width_us, params.current_mA);
  const Frame gap = uniform_frame(
      geometry, static_cast<std::uint32_t>(period_us - params.pulse_width_us), ElectrodeRole::Ground);

  PulseSchedule s;
  s.geometry = geometry;
  s.frames.reserve(static_cast<std::size_t>(params.pulses) * 2);
  for (std::uint32_t p = 0; p < params.pulses; ++p) {
    s.frames.push_back(stim);
    s.frames.push_back(gap);
  }
  s.label = std::string("electrotactile ") + (anodic ? "anodic" : "cathodic") + " target=(" +
            std::to_string(params.target.row) + "," + std::to_string(params.target.col) +
            ") pw=" + std::to_string(params.pulse_width_us) + "us pulses=" +
            std::to_string(params.pulses);
  return s;
}

namespace {

bool is_role_swap(const Frame& a, const Frame& b) {
  if (a.roles.size() != b.roles.size()) return false;
  if (a.duration_us != b.duration_us || a.amplitude_mA != b.amplitude_mA) return false;
  for (std::size_t i = 0; i < a.roles.size(); ++i) {
    switch (a.roles[i]) {
      case ElectrodeRole::Source:
        if (b.roles[i] != ElectrodeRole::Ground) return false;
        break;
      case ElectrodeRole::Ground:
        if (b.roles[i] != ElectrodeRole::Source) return false;
        break;
      case ElectrodeRole::Floating:
        if (b.roles[i] != ElectrodeRole::Floating) return false;
        break;
    }
  }
  return true;
}

}  // namespace

ScheduleStats schedule_stats(const PulseSchedule& s) {
  ScheduleStats stats;
  stats.total_duration_us = schedule_total_duration_us(s);
  if (s.frames.empty()) return stats;

  // Merge frames into runs of constant activity.
  struct Run {
    bool active;
    std::uint64_t duration_us;
  };
  std::vector<Run> runs;
  std::uint64_t active_us = 0;
  for (const Frame& f : s.frames) {
    const bool active = f.amplitude_mA > 0.0;
    if (active) {
      active_us += f.duration_us;
      ++stats.stimulation_frame_count;
    }
    stats.max_amplitude_mA = std::max(stats.max_amplitude_mA, f.amplitude_mA);
    if (!runs.empty() && runs.back().active == active)
      runs.back().duration_us += f.duration_us;
    else
      runs.push_back({active, f.duration_us});
  }
  if (stats.total_duration_us > 0)
    stats.active_duty_fraction =
        static_cast<double>(active_us) / static_cast<double>(stats.total_duration_us);

  // Envelope frequency: the schedule must be an exact repetition of one
  // active run followed by one idle run.
  if (runs.size() >= 2 && runs.size() % 2 == 0 && runs[0].active) {
    bool periodic = true;
    for (std::size_t i = 0; i < runs.size(); i += 2) {
      if (!runs[i].active || runs[i + 1].active || runs[i].duration_us != runs[0].duration_us ||
          runs[i + 1].duration_us != runs[1].duration_us) {
        periodic = false;
        break;
      }
    }
    if (periodic)
      stats.envelope_frequency_hz =
          1e6 / static_cast<double>(runs[0].duration_us + runs[1].duration_us);
  }

  // Swap cycles: greedy pairing over the stimulation-frame subsequence.
  std::uint32_t cycles = 0;
  const Frame* pending = nullptr;
  for (const Frame& f : s.frames) {
    if (!(f.amplitude_mA > 0.0)) continue;
    if (pending && is_role_swap(*pending, f)) {
      ++cycles;
      pending = nullptr;
    } else {
      pending = &f;
    }
  }
  if (cycles > 0) stats.swap_cycle_count = cycles;
  return stats;
}

}  // namespace estim
