#include "estim/array.hpp"

#include <cmath>

namespace estim {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfBounds: return "out-of-bounds";
    case ErrorCode::InvalidGeometry: return "invalid-geometry";
    case ErrorCode::InvalidPartition: return "invalid-partition";
    case ErrorCode::Alignment: return "alignment";
    case ErrorCode::Timing: return "timing";
    case ErrorCode::EmptySchedule: return "empty-schedule";
    case ErrorCode::InvalidFrame: return "invalid-frame";
    case ErrorCode::OpenCircuit: return "open-circuit";
    case ErrorCode::StepSize: return "step-size";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::BadConfig: return "config";
    case ErrorCode::BadFormat: return "format";
    case ErrorCode::Length: return "length";
    case ErrorCode::Integrity: return "integrity";
    case ErrorCode::InvalidRole: return "invalid-role";
    case ErrorCode::Range: return "range";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::TooShort: return "too-short";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

void ArrayGeometry::validate() const {
  if (rows < 1 || cols < 1) fail(ErrorCode::InvalidGeometry, "array needs at least one electrode");
  if (electrode_diameter_mm <= 0.0 || pitch_mm <= 0.0)
    fail(ErrorCode::InvalidGeometry, "electrode diameter and pitch must be positive");
  if (electrode_diameter_mm >= pitch_mm && (rows > 1 || cols > 1))
    fail(ErrorCode::InvalidGeometry, "electrodes overlap: diameter " +
                                         std::to_string(electrode_diameter_mm) + " mm >= pitch " +
                                         std::to_string(pitch_mm) + " mm");
}

int linear_index(ElectrodeId id, const ArrayGeometry& geometry) {
  if (!geometry.contains(id))
    fail(ErrorCode::OutOfBounds, "electrode (" + std::to_string(id.row) + "," +
                                     std::to_string(id.col) + ") outside " +
                                     std::to_string(geometry.rows) + "x" +
                                     std::to_string(geometry.cols) + " array");
  return id.row * geometry.cols + id.col;
}

ElectrodeId electrode_at(int linear, const ArrayGeometry& geometry) {
  if (linear < 0 || linear >= geometry.electrode_count())
    fail(ErrorCode::OutOfBounds, "linear index " + std::to_string(linear) + " outside array");
  return {linear / geometry.cols, linear % geometry.cols};
}

Vec2 electrode_center(ElectrodeId id, const ArrayGeometry& geometry) {
  if (!geometry.contains(id))
    fail(ErrorCode::OutOfBounds, "electrode (" + std::to_string(id.row) + "," +
                                     std::to_string(id.col) + ") outside array");
  return {geometry.origin_mm.x + id.col * geometry.pitch_mm,
          geometry.origin_mm.y + id.row * geometry.pitch_mm};
}

std::uint64_t schedule_total_duration_us(const PulseSchedule& s) {
  std::uint64_t total = 0;
  for (const Frame& f : s.frames) total += f.duration_us;
  return total;
}

int count_role(const Frame& frame, ElectrodeRole role) {
  int n = 0;
  for (ElectrodeRole r : frame.roles)
    if (r == role) ++n;
  return n;
}

void validate_frame(const Frame& frame, const ArrayGeometry& geometry) {
  if (frame.duration_us == 0) fail(ErrorCode::InvalidFrame, "frame duration must be > 0 us");
  if (!(frame.amplitude_mA >= 0.0) || !std::isfinite(frame.amplitude_mA))
    fail(ErrorCode::InvalidFrame, "frame amplitude must be finite and >= 0 mA");
  if (static_cast<int>(frame.roles.size()) != geometry.electrode_count())
    fail(ErrorCode::InvalidFrame,
         "frame assigns " + std::to_string(frame.roles.size()) + " roles for " +
             std::to_string(geometry.electrode_count()) + " electrodes");
  for (ElectrodeRole r : frame.roles) {
    if (r != ElectrodeRole::Ground && r != ElectrodeRole::Source && r != ElectrodeRole::Floating)
      fail(ErrorCode::InvalidRole, "frame contains an invalid role value");
  }
  if (frame.amplitude_mA > 0.0) {
    if (count_role(frame, ElectrodeRole::Source) == 0 || count_role(frame, ElectrodeRole::Ground) == 0)
      fail(ErrorCode::InvalidFrame, "frame drives current without a complete source/ground path");
  }
}

void validate_schedule(const PulseSchedule& s) {
  s.geometry.validate();
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    try {
      validate_frame(s.frames[i], s.geometry);
    } catch (const Error& e) {
      throw Error(e.code(), "frame " + std::to_string(i) + ": " + e.what());
    }
  }
}

Frame uniform_frame(const ArrayGeometry& geometry, std::uint32_t duration_us, ElectrodeRole role) {
  Frame f;
  f.duration_us = duration_us;
  f.amplitude_mA = 0.0;
  f.roles.assign(static_cast<std::size_t>(geometry.electrode_count()), role);
  return f;
}

}  // namespace estim
