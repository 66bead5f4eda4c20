#include "estim/device.hpp"

namespace estim {

FeasibilityReport MockDevice::load(std::span<const std::uint8_t> packet) {
  PulseSchedule s = decode_schedule(packet);
  FeasibilityReport report = validate_for_device(s, profile_);
  if (report.feasible)
    loaded_ = std::move(s);
  else
    loaded_.reset();
  return report;
}

const PulseSchedule& MockDevice::schedule() const {
  if (!loaded_) fail(ErrorCode::EmptySchedule, "no feasible schedule loaded");
  return *loaded_;
}

SimTrace MockDevice::replay(const SkinContactModel& skin, const MechModel& mech,
                            const FingerTrajectory& traj, double dt_s, double duration_s) const {
  return simulate(schedule(), skin, mech, traj, dt_s, duration_s);
}

}  // namespace estim
