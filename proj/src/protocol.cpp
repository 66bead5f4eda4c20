#include "estim/protocol.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

namespace estim {

namespace {

constexpr std::size_t kHeaderSize = 14;
constexpr std::size_t kTrailerSize = 4;

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::size_t role_bitmap_bytes(int rows, int cols) {
  return (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) + 3) / 4;
}

}  // namespace

std::uint32_t crc32_ieee(std::span<const std::uint8_t> data) {
  static const std::array<std::uint32_t, 256> table = make_crc_table();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::uint8_t b : data) crc = table[(crc ^ b) & 0xFFu] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

std::size_t encoded_size(int rows, int cols, std::size_t frame_count) {
  return kHeaderSize + frame_count * (8 + role_bitmap_bytes(rows, cols)) + kTrailerSize;
}

std::vector<std::uint8_t> encode_schedule(const PulseSchedule& s) {
  validate_schedule(s);
  if (s.geometry.rows > 255 || s.geometry.cols > 255)
    fail(ErrorCode::Range, "geometry exceeds the 255x255 wire limit");
  if (s.frames.size() > 0xFFFFFFFFu) fail(ErrorCode::Range, "frame count exceeds u32");

  std::vector<std::uint8_t> out;
  out.reserve(encoded_size(s.geometry.rows, s.geometry.cols, s.frames.size()));

  out.insert(out.end(), std::begin(kPacketMagic), std::end(kPacketMagic));
  out.push_back(kPacketVersion);
  out.push_back(static_cast<std::uint8_t>(s.geometry.rows));
  out.push_back(static_cast<std::uint8_t>(s.geometry.cols));
  out.insert(out.end(), 3, 0);  // reserved
  put_u32le(out, static_cast<std::uint32_t>(s.frames.size()));

  const std::size_t bitmap_bytes = role_bitmap_bytes(s.geometry.rows, s.geometry.cols);
  for (const Frame& f : s.frames) {
    const double amplitude_uA = f.amplitude_mA * 1000.0;
    const long long rounded = std::llround(amplitude_uA);
    if (rounded < 0 || rounded > 0xFFFFFFFFll)
      fail(ErrorCode::Range, "amplitude " + std::to_string(f.amplitude_mA) +
                                 " mA does not fit the u32 uA wire range");
    put_u32le(out, f.duration_us);
    put_u32le(out, static_cast<std::uint32_t>(rounded));
    const std::size_t base = out.size();
    out.insert(out.end(), bitmap_bytes, 0);
    for (std::size_t e = 0; e < f.roles.size(); ++e)
      out[base + e / 4] |= static_cast<std::uint8_t>(
          static_cast<std::uint8_t>(f.roles[e]) << (2 * (e % 4)));
  }

  put_u32le(out, crc32_ieee({out.data(), out.size()}));
  return out;
}

PulseSchedule decode_schedule(std::span<const std::uint8_t> packet) {
  if (packet.size() < kHeaderSize + kTrailerSize)
    fail(ErrorCode::Length, "packet shorter than header + CRC (" +
                                std::to_string(packet.size()) + " bytes)");
  if (std::memcmp(packet.data(), kPacketMagic, 4) != 0)
    fail(ErrorCode::BadFormat, "bad magic");
  if (packet[4] != kPacketVersion)
    fail(ErrorCode::BadFormat, "unsupported version " + std::to_string(packet[4]));
  const int rows = packet[5];
  const int cols = packet[6];
  if (rows == 0 || cols == 0) fail(ErrorCode::BadFormat, "zero-sized geometry");
  if (packet[7] != 0 || packet[8] != 0 || packet[9] != 0)
    fail(ErrorCode::BadFormat, "reserved header bytes set");
  const std::uint32_t frame_count = get_u32le(packet.data() + 10);

  const std::size_t expected = encoded_size(rows, cols, frame_count);
  if (packet.size() != expected)
    fail(ErrorCode::Length, "packet is " + std::to_string(packet.size()) + " bytes, layout needs " +
                                std::to_string(expected) + " for " + std::to_string(frame_count) +
                                " frames");

  const std::uint32_t stored_crc = get_u32le(packet.data() + packet.size() - 4);
  const std::uint32_t actual_crc = crc32_ieee(packet.first(packet.size() - 4));
  if (stored_crc != actual_crc) fail(ErrorCode::Integrity, "CRC mismatch");

  PulseSchedule s;
  s.geometry = ArrayGeometry{};
  s.geometry.rows = rows;
  s.geometry.cols = cols;
  const auto electrodes = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  const std::size_t bitmap_bytes = role_bitmap_bytes(rows, cols);

  const std::uint8_t* p = packet.data() + kHeaderSize;
  s.frames.reserve(frame_count);
  for (std::uint32_t fi = 0; fi < frame_count; ++fi) {
    Frame f;
    f.duration_us = get_u32le(p);
    f.amplitude_mA = static_cast<double>(get_u32le(p + 4)) / 1000.0;
    p += 8;
    f.roles.resize(electrodes);
    for (std::size_t e = 0; e < electrodes; ++e) {
      const std::uint8_t bits = (p[e / 4] >> (2 * (e % 4))) & 0x3u;
      if (bits == 3)
        fail(ErrorCode::InvalidRole,
             "frame " + std::to_string(fi) + ": reserved role bits at electrode " +
                 std::to_string(e));
      f.roles[e] = static_cast<ElectrodeRole>(bits);
    }
    p += bitmap_bytes;
    try {
      validate_frame(f, s.geometry);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidFrame, "frame " + std::to_string(fi) + ": " + e.what());
    }
    s.frames.push_back(std::move(f));
  }
  return s;
}

void write_packet_file(const std::string& path, std::span<const std::uint8_t> packet) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(packet.data()),
            static_cast<std::streamsize>(packet.size()));
  if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

std::vector<std::uint8_t> read_packet_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::Io, "read failed: " + path);
  return data;
}

FeasibilityReport validate_for_device(const PulseSchedule& s, const DeviceProfile& profile) {
  FeasibilityReport report;
  if (s.geometry.rows != profile.rows || s.geometry.cols != profile.cols) {
    report.issues.push_back({FeasibilityIssue::Kind::GeometryMismatch, 0,
                             "schedule is " + std::to_string(s.geometry.rows) + "x" +
                                 std::to_string(s.geometry.cols) + ", device supports " +
                                 std::to_string(profile.rows) + "x" +
                                 std::to_string(profile.cols)});
  }
  for (std::size_t fi = 0; fi < s.frames.size(); ++fi) {
    const Frame& f = s.frames[fi];
    if (f.duration_us < profile.min_frame_us) {
      report.issues.push_back({FeasibilityIssue::Kind::FrameTooShort, fi,
                               "frame " + std::to_string(fi) + ": " +
                                   std::to_string(f.duration_us) + " us below device minimum " +
                                   std::to_string(profile.min_frame_us) + " us"});
    }
    const double amplitude_uA = f.amplitude_mA * 1000.0;
    if (amplitude_uA > static_cast<double>(profile.max_amplitude_uA)) {
      report.issues.push_back({FeasibilityIssue::Kind::AmplitudeTooHigh, fi,
                               "frame " + std::to_string(fi) + ": " +
                                   std::to_string(f.amplitude_mA) + " mA above device maximum " +
                                   std::to_string(profile.max_amplitude_uA / 1000.0) + " mA"});
    }
  }
  report.feasible = report.issues.empty();
  return report;
}

}  // namespace estim
