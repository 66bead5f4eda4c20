#include "estim/charge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace estim {

double ChargeReport::total_net_uC() const {
  double sum = 0.0;
  for (double q : per_electrode_net_uC) sum += q;
  return sum;
}

const char* violation_kind_name(SafetyViolation::Kind kind) {
  switch (kind) {
    case SafetyViolation::Kind::Current: return "current";
    case SafetyViolation::Kind::PulseWidth: return "pulse-width";
    case SafetyViolation::Kind::NetCharge: return "net-charge";
  }
  return "unknown";
}

ChargeReport net_charge(const PulseSchedule& s) {
  validate_schedule(s);
  const auto n = static_cast<std::size_t>(s.geometry.electrode_count());

  ChargeReport report;
  report.per_electrode_net_uC.assign(n, 0.0);
  std::vector<double>& net = report.per_electrode_net_uC;

  for (std::size_t fi = 0; fi < s.frames.size(); ++fi) {
    const Frame& f = s.frames[fi];
    if (!(f.amplitude_mA > 0.0)) continue;
    const int sources = count_role(f, ElectrodeRole::Source);
    const int grounds = count_role(f, ElectrodeRole::Ground);
    if (sources == 0 || grounds == 0)
      fail(ErrorCode::OpenCircuit, "frame " + std::to_string(fi) +
                                       " commands current without a source/ground path");
    // mA * us = nC; /1000 -> uC
    const double q_uC = f.amplitude_mA * static_cast<double>(f.duration_us) * 1e-3;
    const double q_source = q_uC / sources;
    const double q_ground = q_uC / grounds;
    for (std::size_t e = 0; e < n; ++e) {
      if (f.roles[e] == ElectrodeRole::Source)
        net[e] += q_source;
      else if (f.roles[e] == ElectrodeRole::Ground)
        net[e] -= q_ground;
    }
    double frame_max = 0.0;
    for (double q : net) frame_max = std::max(frame_max, std::abs(q));
    report.max_instantaneous_imbalance_uC =
        std::max(report.max_instantaneous_imbalance_uC, frame_max);
  }

  for (double q : net) report.max_abs_net_uC = std::max(report.max_abs_net_uC, std::abs(q));
  return report;
}

namespace {

std::string format_value(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

SafetyReport check_safety(const PulseSchedule& s, const SafetyLimits& limits) {
  SafetyReport report;

  for (std::size_t fi = 0; fi < s.frames.size(); ++fi) {
    const Frame& f = s.frames[fi];
    if (!(f.amplitude_mA > 0.0)) continue;
    if (f.amplitude_mA > limits.max_current_mA) {
      report.violations.push_back(
          {SafetyViolation::Kind::Current, fi, f.amplitude_mA, limits.max_current_mA,
           "frame " + std::to_string(fi) + ": " + format_value("%.6g", f.amplitude_mA) +
               " mA exceeds limit " + format_value("%.6g", limits.max_current_mA) + " mA"});
    }
    if (f.duration_us > limits.max_pulse_width_us) {
      report.violations.push_back(
          {SafetyViolation::Kind::PulseWidth, fi, static_cast<double>(f.duration_us),
           static_cast<double>(limits.max_pulse_width_us),
           "frame " + std::to_string(fi) + ": " + std::to_string(f.duration_us) +
               " us pulse exceeds limit " + std::to_string(limits.max_pulse_width_us) + " us"});
    }
  }

  const ChargeReport charge = net_charge(s);
  // Exact-balance limit 0 still accepts floating-point dust.
  const double tolerance = 1e-12;
  for (std::size_t e = 0; e < charge.per_electrode_net_uC.size(); ++e) {
    const double q = charge.per_electrode_net_uC[e];
    if (std::abs(q) > limits.max_net_charge_uC + tolerance) {
      const ElectrodeId id = electrode_at(static_cast<int>(e), s.geometry);
      report.violations.push_back(
          {SafetyViolation::Kind::NetCharge, e, q, limits.max_net_charge_uC,
           "electrode (" + std::to_string(id.row) + "," + std::to_string(id.col) + "): net " +
               format_value("%.6g", q) + " uC exceeds limit " +
               format_value("%.6g", limits.max_net_charge_uC) + " uC"});
    }
  }

  report.pass = report.violations.empty();
  return report;
}

}  // namespace estim
