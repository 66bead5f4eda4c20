#include "estim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

namespace estim {

void SkinContactModel::validate() const {
  if (!(r_sc_ohm > 0.0 && c_sc_F > 0.0 && r_body_ohm > 0.0 && gap_m > 0.0 && epsilon_r_gap > 0.0))
    fail(ErrorCode::Range, "skin model parameters must all be > 0");
}

void FingerTrajectory::validate() const {
  if (radius_mm < 0.0 || rev_per_s < 0.0)
    fail(ErrorCode::Range, "trajectory radius and rate must be >= 0");
  if (!(contact_radius_mm > 0.0)) fail(ErrorCode::Range, "contact radius must be > 0");
}

void MechModel::validate() const {
  if (!(mass_kg > 0.0)) fail(ErrorCode::Range, "mass must be > 0");
  if (stiffness_N_per_m < 0.0 || damping_Ns_per_m < 0.0)
    fail(ErrorCode::Range, "stiffness and damping must be >= 0");
}

MechState mech_step(const MechModel& mech, MechState state, double force_N, double dt_s) {
  const double a = state.accel_mps2(mech, force_N);
  state.v_mps += a * dt_s;
  state.x_m += state.v_mps * dt_s;
  return state;
}

Vec2 FingerTrajectory::position_mm(double t_s) const {
  const double phase = 2.0 * std::numbers::pi * rev_per_s * t_s + phase0_rad;
  return {center_mm.x + radius_mm * std::cos(phase), center_mm.y + radius_mm * std::sin(phase)};
}

RcElement::RcElement(double r_ohm, double c_F) : r_(r_ohm), c_(c_F) {
  if (!(r_ohm > 0.0 && c_F > 0.0)) fail(ErrorCode::Range, "R and C must be > 0");
}

void RcElement::step(double current_A, double dt_s) {
  const double target = current_A * r_;
  v_ = target + (v_ - target) * std::exp(-dt_s / (r_ * c_));
}

double disc_overlap_fraction(Vec2 center1, double radius1, Vec2 center2, double radius2) {
  if (radius1 <= 0.0 || radius2 <= 0.0) return 0.0;
  const double dx = center2.x - center1.x;
  const double dy = center2.y - center1.y;
  const double d = std::hypot(dx, dy);
  if (d >= radius1 + radius2) return 0.0;
  if (d + radius1 <= radius2) return 1.0;
  if (d + radius2 <= radius1) return (radius2 * radius2) / (radius1 * radius1);

  const double r1sq = radius1 * radius1;
  const double r2sq = radius2 * radius2;
  const double cos1 = std::clamp((d * d + r1sq - r2sq) / (2.0 * d * radius1), -1.0, 1.0);
  const double cos2 = std::clamp((d * d + r2sq - r1sq) / (2.0 * d * radius2), -1.0, 1.0);
  const double kite = (-d + radius1 + radius2) * (d + radius1 - radius2) *
                      (d - radius1 + radius2) * (d + radius1 + radius2);
  const double area = r1sq * std::acos(cos1) + r2sq * std::acos(cos2) -
                      0.5 * std::sqrt(std::max(0.0, kite));
  return std::clamp(area / (std::numbers::pi * r1sq), 0.0, 1.0);
}

namespace {

void contact_state_into(const FingerTrajectory& traj, const ArrayGeometry& geometry, double t_s,
                        std::vector<double>& coverage) {
  const Vec2 finger = traj.position_mm(t_s);
  const double electrode_radius = geometry.electrode_diameter_mm / 2.0;
  coverage.resize(static_cast<std::size_t>(geometry.electrode_count()));
  std::size_t e = 0;
  for (int r = 0; r < geometry.rows; ++r) {
    for (int c = 0; c < geometry.cols; ++c, ++e) {
      const Vec2 center{geometry.origin_mm.x + c * geometry.pitch_mm,
                        geometry.origin_mm.y + r * geometry.pitch_mm};
      coverage[e] = disc_overlap_fraction(center, electrode_radius, finger,
                                          traj.contact_radius_mm);
    }
  }
}

}  // namespace

std::vector<double> contact_state(const FingerTrajectory& traj, const ArrayGeometry& geometry,
                                  double t_s) {
  geometry.validate();
  traj.validate();
  if (t_s < 0.0) fail(ErrorCode::Range, "time must be >= 0");
  std::vector<double> coverage;
  contact_state_into(traj, geometry, t_s, coverage);
  return coverage;
}

SimTrace simulate(const PulseSchedule& s, const SkinContactModel& skin, const MechModel& mech,
                  const FingerTrajectory& traj, double dt_s, double duration_s,
                  double compliance_V) {
  validate_schedule(s);
  skin.validate();
  mech.validate();
  traj.validate();
  if (!(dt_s > 0.0) || !(duration_s > 0.0))
    fail(ErrorCode::Range, "dt and duration must be > 0");
  if (!(compliance_V > 0.0)) fail(ErrorCode::Range, "compliance voltage must be > 0");

  if (!s.frames.empty()) {
    std::uint32_t min_duration_us = std::numeric_limits<std::uint32_t>::max();
    for (const Frame& f : s.frames) min_duration_us = std::min(min_duration_us, f.duration_us);
    const double min_duration_s = min_duration_us * 1e-6;
    if (dt_s * 10.0 > min_duration_s * (1.0 + 1e-9))
      fail(ErrorCode::StepSize, "dt " + std::to_string(dt_s) + " s too coarse for " +
                                    std::to_string(min_duration_us) +
                                    " us frames; need dt <= frame/10");
  }

  const long long n_steps = std::llround(duration_s / dt_s);
  if (n_steps < 1) fail(ErrorCode::Range, "duration shorter than one step");

  // Frame start times, seconds; frame i spans [bounds[i], bounds[i+1]).
  std::vector<double> bounds(s.frames.size() + 1, 0.0);
  {
    std::uint64_t cum_us = 0;
    for (std::size_t i = 0; i < s.frames.size(); ++i) {
      cum_us += s.frames[i].duration_us;
      bounds[i + 1] = static_cast<double>(cum_us) * 1e-6;
    }
  }

  const auto n = static_cast<std::size_t>(s.geometry.electrode_count());
  const double tau = skin.r_sc_ohm * skin.c_sc_F;
  const double half_loop_r = skin.r_sc_ohm / 2.0;
  const double electrode_radius_m = s.geometry.electrode_diameter_mm * 1e-3 / 2.0;
  const double electrode_area_m2 = std::numbers::pi * electrode_radius_m * electrode_radius_m;
  const double force_coef =
      kVacuumPermittivity * skin.epsilon_r_gap * electrode_area_m2 / (2.0 * skin.gap_m * skin.gap_m);

  std::vector<double> u(n, 0.0);  // patch voltage, electrode side positive
  MechState mech_state;

  SimTrace trace;
  trace.dt_s = dt_s;
  trace.t_s.reserve(static_cast<std::size_t>(n_steps));
  trace.v_drive_V.reserve(static_cast<std::size_t>(n_steps));
  trace.v_gap_V.reserve(static_cast<std::size_t>(n_steps));
  trace.force_N.reserve(static_cast<std::size_t>(n_steps));
  trace.accel_G.reserve(static_cast<std::size_t>(n_steps));
  trace.contact_count.reserve(static_cast<std::size_t>(n_steps));

  const bool stationary = traj.stationary();
  std::vector<double> coverage;
  if (stationary) contact_state_into(traj, s.geometry, 0.0, coverage);

  constexpr double kTimeEps = 1e-12;
  std::size_t frame_idx = 0;

  for (long long step = 0; step < n_steps; ++step) {
    const double t0 = static_cast<double>(step) * dt_s;
    const double t1 = static_cast<double>(step + 1) * dt_s;
    if (!stationary) contact_state_into(traj, s.geometry, t0, coverage);

    double v_drive = 0.0;
    double seg_t = t0;
    while (t1 - seg_t > kTimeEps) {
      const Frame* frame = nullptr;
      double seg_end = t1;
      if (frame_idx < s.frames.size()) {
        if (seg_t >= bounds[frame_idx + 1] - kTimeEps) {
          ++frame_idx;
          continue;
        }
        frame = &s.frames[frame_idx];
        seg_end = std::min(t1, bounds[frame_idx + 1]);
      }
      const double seg_dt = seg_end - seg_t;
      const double decay = std::exp(-seg_dt / tau);

      bool drivable = false;
      double current_A = 0.0;
      double src_cov = 0.0;
      double gnd_cov = 0.0;
      if (frame && frame->amplitude_mA > 0.0) {
        for (std::size_t e = 0; e < n; ++e) {
          if (coverage[e] <= 0.0) continue;
          if (frame->roles[e] == ElectrodeRole::Source)
            src_cov += coverage[e];
          else if (frame->roles[e] == ElectrodeRole::Ground)
            gnd_cov += coverage[e];
        }
        if (src_cov > 0.0 && gnd_cov > 0.0) {
          drivable = true;
          // Share-weighted state term of the drive voltage.
          double state = 0.0;
          for (std::size_t e = 0; e < n; ++e) {
            if (coverage[e] <= 0.0) continue;
            if (frame->roles[e] == ElectrodeRole::Source)
              state += coverage[e] / src_cov * u[e];
            else if (frame->roles[e] == ElectrodeRole::Ground)
              state -= coverage[e] / gnd_cov * u[e];
          }
          // v(t) within the segment is exponential between
          //   v_start = state + I*r_body
          //   v_end   = state*decay + I*(r_sc*(1-decay) + r_body)
          // both affine and increasing in I, so the compliance clamp solves
          // for the largest current meeting the limit at both endpoints.
          const double commanded_A = frame->amplitude_mA * 1e-3;
          const double end_slope = skin.r_sc_ohm * (1.0 - decay) + skin.r_body_ohm;
          const double bound_end = (compliance_V - state * decay) / end_slope;
          const double bound_start = (compliance_V - state) / skin.r_body_ohm;
          current_A = std::clamp(std::min(bound_end, bound_start), 0.0, commanded_A);
        }
      }

      const double target = current_A * half_loop_r;
      for (std::size_t e = 0; e < n; ++e) {
        double patch_target = 0.0;
        if (drivable && coverage[e] > 0.0) {
          if (frame->roles[e] == ElectrodeRole::Source)
            patch_target = target;
          else if (frame->roles[e] == ElectrodeRole::Ground)
            patch_target = -target;
        }
        u[e] = patch_target + (u[e] - patch_target) * decay;
      }

      if (drivable) {
        double state_end = 0.0;
        for (std::size_t e = 0; e < n; ++e) {
          if (coverage[e] <= 0.0) continue;
          if (frame->roles[e] == ElectrodeRole::Source)
            state_end += coverage[e] / src_cov * u[e];
          else if (frame->roles[e] == ElectrodeRole::Ground)
            state_end -= coverage[e] / gnd_cov * u[e];
        }
        // The supply rail saturates at the compliance limit by construction;
        // min() only strips the last-ulp residue of the clamp solve.
        v_drive = std::min(state_end + current_A * skin.r_body_ohm, compliance_V);
      } else {
        v_drive = 0.0;
      }
      seg_t = seg_end;
    }

    double force_N = 0.0;
    double v_gap = 0.0;
    int contacts = 0;
    for (std::size_t e = 0; e < n; ++e) {
      if (coverage[e] <= 0.0) continue;
      ++contacts;
      v_gap = std::max(v_gap, std::abs(u[e]));
      force_N += coverage[e] * u[e] * u[e];
    }
    force_N *= force_coef;

    const double accel_mps2 = mech_state.accel_mps2(mech, force_N);
    mech_state = mech_step(mech, mech_state, force_N, dt_s);

    if (!std::isfinite(force_N + accel_mps2 + mech_state.x_m + v_drive))
      fail(ErrorCode::Divergence, "non-finite state at step " + std::to_string(step));

    trace.t_s.push_back(t1);
    trace.v_drive_V.push_back(v_drive);
    trace.v_gap_V.push_back(v_gap);
    trace.force_N.push_back(force_N);
    trace.accel_G.push_back(accel_mps2 / kStandardGravity);
    trace.contact_count.push_back(contacts);
  }
  return trace;
}

SimTrace synthesize_experiment(const std::optional<ElectroadhesionParams>& params,
                               const ArrayGeometry& geometry, const SkinContactModel& skin,
                               const MechModel& mech, const FingerTrajectory& traj,
                               const SimOptions& options) {
  geometry.validate();
  PulseSchedule schedule;
  if (params.has_value()) {
    ElectroadhesionParams p = *params;
    if (p.pulse_width_us == 0 || p.burst_us == 0 || p.burst_us % (2 * p.pulse_width_us) != 0)
      fail(ErrorCode::Alignment, "burst is not a whole number of swap cycles");
    const double period_s = static_cast<double>(p.period_us()) * 1e-6;
    if (options.duration_s + 1e-9 < period_s)
      fail(ErrorCode::Range, "duration must cover at least one envelope period (" +
                                 std::to_string(period_s) + " s)");
    p.periods = static_cast<std::uint32_t>(std::ceil(options.duration_s / period_s - 1e-9));
    schedule = compile_electroadhesion(p, geometry);
  } else {
    schedule.geometry = geometry;
    schedule.label = "baseline";
  }
  SimTrace trace = simulate(schedule, skin, mech, traj, options.dt_s, options.duration_s,
                            options.compliance_V);
  if (options.noise_sigma_G > 0.0)
    add_measurement_noise(trace, options.noise_sigma_G, options.seed);
  return trace;
}

namespace {

// mt19937_64-based Gaussian (Marsaglia polar), independent of the standard
// library's distribution internals so a seed means the same samples on every
// platform.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double a, b, s;
    do {
      a = 2.0 * uniform01() - 1.0;
      b = 2.0 * uniform01() - 1.0;
      s = a * a + b * b;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = b * f;
    has_spare_ = true;
    return a * f;
  }

 private:
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

void add_measurement_noise(SimTrace& trace, double sigma_G, std::uint64_t seed) {
  if (sigma_G < 0.0) fail(ErrorCode::Range, "noise sigma must be >= 0");
  if (sigma_G == 0.0) return;
  GaussianSampler gauss(seed);
  for (double& a : trace.accel_G) a += sigma_G * gauss();
}

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
  out << "t_s,v_drive_V,v_gap_V,force_N,accel_G,contact_count\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << fmt_g(trace.t_s[i]) << ',' << fmt_g(trace.v_drive_V[i]) << ','
        << fmt_g(trace.v_gap_V[i]) << ',' << fmt_g(trace.force_N[i]) << ','
        << fmt_g(trace.accel_G[i]) << ',' << trace.contact_count[i] << '\n';
  }
}

void write_trace_csv_file(const SimTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  write_trace_csv(trace, out);
  if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

}  // namespace estim
