#pragma once

#include <stdexcept>
#include <string>

namespace estim {

enum class ErrorCode {
  OutOfBounds,       // electrode id or index outside the array
  InvalidGeometry,   // degenerate or overlapping electrode layout
  InvalidPartition,  // custom partition empty or covering the whole array
  Alignment,         // burst not a whole number of swap cycles
  Timing,            // pulse timing impossible (duty >= 100%, zero width, ...)
  EmptySchedule,     // compilation would produce no frames
  InvalidFrame,      // frame violates the role/current-path contract
  OpenCircuit,       // current commanded with no source or no ground
  StepSize,          // simulation step too coarse for the shortest frame
  Divergence,        // non-finite simulation state
  BadConfig,         // config file parse/validation failure
  BadFormat,         // packet structure invalid (magic, version, reserved, ...)
  Length,            // packet length does not match its declared content
  Integrity,         // packet CRC mismatch
  InvalidRole,       // reserved role bits set in a packet
  Range,             // numeric value outside its representable/valid range
  EmptyInput,        // analysis input series is empty
  TooShort,          // analysis input series below minimum length
  Io,                // file read/write failure
};

const char* error_code_name(ErrorCode code);

/// Single exception type for the whole library; the code gives callers
/// (and the CLI exit-code mapping) a stable classification of the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace estim
