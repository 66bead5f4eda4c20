#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "estim/array.hpp"

namespace estim {

// Schedule packet layout (all multi-byte integers little-endian):
//
//   offset  size  field
//   0       4     magic "EST1" (0x45 0x53 0x54 0x31)
//   4       1     version, currently 1
//   5       1     rows
//   6       1     cols
//   7       3     reserved, must be zero
//   10      4     frame_count (u32)
//   14      ...   frames
//   end-4   4     CRC-32 (IEEE) over all preceding bytes
//
// Each frame is duration_us (u32), amplitude_uA (u32), then a role bitmap of
// 2 bits per electrode in row-major order, LSB-first within each byte, padded
// to whole bytes: 00=Ground, 01=Source, 10=Floating, 11=reserved (rejected).
// Amplitude converts mA -> uA with half-up integer rounding; values below
// 1 uA granularity are not round-trippable. The packet carries electrical
// content only: rows/cols travel, mm geometry and the label do not, and a
// decoded schedule gets default physical dimensions.

inline constexpr std::uint8_t kPacketMagic[4] = {0x45, 0x53, 0x54, 0x31};
inline constexpr std::uint8_t kPacketVersion = 1;

/// Exact encoded byte count: 14 + frame_count*(8 + ceil(rows*cols/4)) + 4.
std::size_t encoded_size(int rows, int cols, std::size_t frame_count);

/// Serializes a schedule. Throws Error(Range) when the geometry exceeds
/// 255x255 or an amplitude overflows u32 uA, Error(InvalidFrame/InvalidRole)
/// for frames violating the schedule contract.
std::vector<std::uint8_t> encode_schedule(const PulseSchedule& s);

/// Parses and validates a packet. Hostile input is safe: every failure is a
/// thrown Error (BadFormat, Length, Integrity, InvalidRole, InvalidFrame);
/// the decoder never reads past the buffer and never returns a partial
/// schedule.
PulseSchedule decode_schedule(std::span<const std::uint8_t> packet);

/// CRC-32, IEEE 802.3 polynomial (reflected 0xEDB88320), init/xorout
/// 0xFFFFFFFF. crc32_ieee("123456789") == 0xCBF43926.
std::uint32_t crc32_ieee(std::span<const std::uint8_t> data);

void write_packet_file(const std::string& path, std::span<const std::uint8_t> packet);
std::vector<std::uint8_t> read_packet_file(const std::string& path);

/// Timing/amplitude envelope a concrete stimulator can realize.
struct DeviceProfile {
  std::uint32_t min_frame_us = 10;
  std::uint32_t max_amplitude_uA = 20000;
  int rows = 8;
  int cols = 8;
};

struct FeasibilityIssue {
  enum class Kind { FrameTooShort, AmplitudeTooHigh, GeometryMismatch };
  Kind kind;
  std::size_t frame_index;  // 0 for GeometryMismatch
  std::string message;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<FeasibilityIssue> issues;
};

FeasibilityReport validate_for_device(const PulseSchedule& s, const DeviceProfile& profile = {});

}  // namespace estim
