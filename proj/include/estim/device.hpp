#pragma once

#include "estim/protocol.hpp"
#include "estim/sim.hpp"

namespace estim {

/// Stand-in for the stimulator firmware end of the link: decodes a packet,
/// checks it against the device timing/amplitude envelope, and replays the
/// schedule into the circuit simulator. Single consumer, one schedule at a
/// time.
class MockDevice {
 public:
  explicit MockDevice(DeviceProfile profile = {}) : profile_(profile) {}

  /// Decode + feasibility check. Decode failures throw; feasibility issues
  /// are returned. The schedule is retained only when feasible.
  FeasibilityReport load(std::span<const std::uint8_t> packet);

  bool has_schedule() const { return loaded_.has_value(); }
  const PulseSchedule& schedule() const;

  /// Runs the loaded schedule through simulate().
  SimTrace replay(const SkinContactModel& skin, const MechModel& mech,
                  const FingerTrajectory& traj, double dt_s, double duration_s) const;

 private:
  DeviceProfile profile_;
  std::optional<PulseSchedule> loaded_;
};

}  // namespace estim
