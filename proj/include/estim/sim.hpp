#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "estim/array.hpp"
#include "estim/compiler.hpp"

namespace estim {

inline constexpr double kStandardGravity = 9.80665;           // m/s^2 per G
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kDefaultComplianceV = 300.0;

/// Lumped electrical model of the finger-electrode loop. r_sc_ohm/c_sc_F are
/// the total stratum-corneum loop impedance (both interfaces combined, what
/// an impedance meter would read across a driven pair); the simulator splits
/// them into per-electrode patch slices in proportion to current share, so
/// the loop drop stays contact-independent. Defaults put 10 mA at 160 V
/// steady drive. gap_m/epsilon_r_gap describe the charge-storing air film at
/// each contact patch; its capacitance is orders below c_sc_F and matters
/// only for the electrostatic force, not the transient.
struct SkinContactModel {
  double r_sc_ohm = 15000.0;
  double c_sc_F = 20e-9;
  double r_body_ohm = 1000.0;
  double gap_m = 5e-6;
  double epsilon_r_gap = 1.0;

  void validate() const;
};

/// Circular tracing path of the fingerpad over the array.
struct FingerTrajectory {
  Vec2 center_mm{10.5, 10.5};
  double radius_mm = 5.0;
  double rev_per_s = 2.0;  // 0 = stationary
  double contact_radius_mm = 5.0;
  double phase0_rad = 0.0;

  Vec2 position_mm(double t_s) const;
  bool stationary() const { return radius_mm == 0.0 || rev_per_s == 0.0; }
  void validate() const;
};

/// 1-DOF normal dynamics of the fingertip: m*x'' = F - k*x - c*x'.
struct MechModel {
  double mass_kg = 0.005;
  double stiffness_N_per_m = 2000.0;
  double damping_Ns_per_m = 1.0;

  void validate() const;
};

struct MechState {
  double x_m = 0.0;
  double v_mps = 0.0;

  double accel_mps2(const MechModel& mech, double force_N) const {
    return (force_N - mech.stiffness_N_per_m * x_m - mech.damping_Ns_per_m * v_mps) / mech.mass_kg;
  }
  double energy_J(const MechModel& mech) const {
    return 0.5 * mech.mass_kg * v_mps * v_mps + 0.5 * mech.stiffness_N_per_m * x_m * x_m;
  }
};

/// One semi-implicit (symplectic) Euler step.
MechState mech_step(const MechModel& mech, MechState state, double force_N, double dt_s);

/// Sampled simulation output; all series share one length, sampled at step
/// ends t = dt, 2*dt, ...
struct SimTrace {
  double dt_s = 0.0;
  std::vector<double> t_s;
  std::vector<double> v_drive_V;   // source terminal voltage
  std::vector<double> v_gap_V;     // largest |patch gap voltage| under the contact
  std::vector<double> force_N;     // total electrostatic normal force
  std::vector<double> accel_G;     // fingertip normal acceleration
  std::vector<int> contact_count;  // electrodes with coverage > 0

  std::size_t size() const { return t_s.size(); }
};

/// Parallel R-C element driven by a commanded current. The update is the
/// closed-form step response composed over steps, so piecewise-constant
/// current integrates exactly regardless of step size:
/// v <- i*R + (v - i*R) * exp(-dt/(R*C)).
class RcElement {
 public:
  RcElement(double r_ohm, double c_F);

  void step(double current_A, double dt_s);
  double voltage() const { return v_; }
  void reset(double v = 0.0) { v_ = v; }
  double tau_s() const { return r_ * c_; }

 private:
  double r_;
  double c_;
  double v_ = 0.0;
};

/// Fractional overlap of disc 1 by disc 2 (intersection area / disc-1 area),
/// by the two-circle lens formula.
double disc_overlap_fraction(Vec2 center1, double radius1, Vec2 center2, double radius2);

/// Coverage fraction of every electrode by the fingerpad at time t.
std::vector<double> contact_state(const FingerTrajectory& traj, const ArrayGeometry& geometry,
                                  double t_s);

/// Steps the schedule through the contact/circuit/force/mechanics chain.
///
/// Per step: the active frame fixes roles; commanded current splits across
/// contacted same-role electrodes in proportion to coverage; each contacted
/// patch integrates its R||C slice exactly; drive voltage is clamped to the
/// compliance limit by saturating the current. Electrostatic force is
/// sum(eps0*epsr*coverage*electrode_area*v^2/(2*gap^2)) and feeds the 1-DOF
/// oscillator via semi-implicit stepping. Beyond the end of the schedule the
/// array idles and patches relax through their own resistance.
///
/// dt must resolve pulse edges: dt <= shortest frame / 10.
SimTrace simulate(const PulseSchedule& s, const SkinContactModel& skin, const MechModel& mech,
                  const FingerTrajectory& traj, double dt_s, double duration_s,
                  double compliance_V = kDefaultComplianceV);

struct SimOptions {
  double dt_s = 5e-6;
  double duration_s = 1.0;
  double noise_sigma_G = 0.0;
  std::uint64_t seed = 1;
  double compliance_V = kDefaultComplianceV;
};

/// Compiles the pattern over enough periods to cover the duration (or skips
/// compilation for the no-stimulation baseline), simulates, then adds seeded
/// Gaussian measurement noise to the acceleration channel.
SimTrace synthesize_experiment(const std::optional<ElectroadhesionParams>& params,
                               const ArrayGeometry& geometry, const SkinContactModel& skin,
                               const MechModel& mech, const FingerTrajectory& traj,
                               const SimOptions& options);

/// Seeded additive Gaussian noise on accel_G (accelerometer floor).
void add_measurement_noise(SimTrace& trace, double sigma_G, std::uint64_t seed);

/// CSV export: header t_s,v_drive_V,v_gap_V,force_N,accel_G,contact_count,
/// one sample per row, 12 significant digits.
void write_trace_csv(const SimTrace& trace, std::ostream& out);
void write_trace_csv_file(const SimTrace& trace, const std::string& path);

}  // namespace estim
