#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "estim/errors.hpp"

namespace estim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

/// Address of one electrode in the grid.
struct ElectrodeId {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const ElectrodeId&, const ElectrodeId&) = default;
};

/// Physical layout of the electrode grid. Defaults describe an 8x8 array of
/// 2 mm gold pads at 3 mm pitch (23 mm x 23 mm overall).
struct ArrayGeometry {
  int rows = 8;
  int cols = 8;
  double electrode_diameter_mm = 2.0;
  double pitch_mm = 3.0;
  Vec2 origin_mm{0.0, 0.0};  // center of electrode (0,0)

  int electrode_count() const { return rows * cols; }
  bool contains(ElectrodeId id) const {
    return id.row >= 0 && id.row < rows && id.col >= 0 && id.col < cols;
  }
  /// Overall extent per axis: (count-1)*pitch + diameter.
  Vec2 extent_mm() const {
    return {(cols - 1) * pitch_mm + electrode_diameter_mm,
            (rows - 1) * pitch_mm + electrode_diameter_mm};
  }
  /// Geometric center of the electrode centers.
  Vec2 center_mm() const {
    return {origin_mm.x + (cols - 1) * pitch_mm / 2.0, origin_mm.y + (rows - 1) * pitch_mm / 2.0};
  }

  /// Throws Error(InvalidGeometry) for degenerate layouts or overlapping pads.
  void validate() const;

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

/// State of one electrode's switch-pair during a frame. The upper and lower
/// switch are never both closed; the enumeration makes that unrepresentable.
/// Values match the 2-bit wire encoding.
enum class ElectrodeRole : std::uint8_t {
  Ground = 0,    // lower switch closed
  Source = 1,    // upper switch closed, connected to the current source
  Floating = 2,  // both switches open
};

/// One constant-configuration interval of the drive timeline: every electrode
/// holds its role for duration_us while the source pushes amplitude_mA.
struct Frame {
  std::uint32_t duration_us = 0;
  double amplitude_mA = 0.0;
  std::vector<ElectrodeRole> roles;  // one per electrode, row-major linear index

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Ordered frame timeline over a fixed geometry.
struct PulseSchedule {
  ArrayGeometry geometry{};
  std::vector<Frame> frames;
  std::string label;
};

/// Row-major linear index; bijective onto [0, rows*cols).
int linear_index(ElectrodeId id, const ArrayGeometry& geometry);

/// Inverse of linear_index.
ElectrodeId electrode_at(int linear, const ArrayGeometry& geometry);

/// Center position of an electrode in mm: origin + (col*pitch, row*pitch).
Vec2 electrode_center(ElectrodeId id, const ArrayGeometry& geometry);

std::uint64_t schedule_total_duration_us(const PulseSchedule& s);

int count_role(const Frame& frame, ElectrodeRole role);

/// Checks the frame contract: positive duration, a role for every electrode,
/// non-negative amplitude, and a complete current path (>=1 source and
/// >=1 ground) whenever amplitude > 0.
void validate_frame(const Frame& frame, const ArrayGeometry& geometry);

/// Validates geometry plus every frame. An empty frame list is legal here;
/// the compilers guarantee non-empty output themselves.
void validate_schedule(const PulseSchedule& s);

/// Frame with every electrode in the same role (pause / dead-time frames).
Frame uniform_frame(const ArrayGeometry& geometry, std::uint32_t duration_us, ElectrodeRole role);

}  // namespace estim
