#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "estim/analysis.hpp"
#include "estim/sim.hpp"

using namespace estim;

namespace {

/// Stationary finger fully covering one source and one ground electrode,
/// everything else floating; constant-current single-frame schedule.
struct TwoElectrodeSetup {
  PulseSchedule schedule;
  FingerTrajectory traj;

  explicit TwoElectrodeSetup(double current_mA, std::uint32_t duration_us = 1000000) {
    ArrayGeometry g;
    Frame f = uniform_frame(g, duration_us, ElectrodeRole::Floating);
    f.amplitude_mA = current_mA;
    f.roles[static_cast<std::size_t>(linear_index({3, 3}, g))] = ElectrodeRole::Source;
    f.roles[static_cast<std::size_t>(linear_index({3, 4}, g))] = ElectrodeRole::Ground;
    schedule.geometry = g;
    schedule.frames.push_back(std::move(f));
    schedule.label = "two-electrode";

    // Midpoint of electrodes (3,3) and (3,4): centers (9,9) and (12,9).
    traj.center_mm = {10.5, 9.0};
    traj.radius_mm = 0.0;
    traj.rev_per_s = 0.0;
    traj.contact_radius_mm = 5.0;
  }
};

}  // namespace

TEST_CASE("rc element reproduces the closed-form step response") {
  const double r = 15000.0;
  const double c = 20e-9;
  const double current = 1e-3;
  RcElement rc(r, c);
  const double dt = 1e-6;
  for (int i = 1; i <= 1000; ++i) {
    rc.step(current, dt);
    const double t = static_cast<double>(i) * dt;
    const double expected = current * r * (1.0 - std::exp(-t / (r * c)));
    CHECK(std::abs(rc.voltage() - expected) <= 1e-6 * std::abs(expected));
  }
}

TEST_CASE("rc element relaxes exponentially with zero drive") {
  RcElement rc(1000.0, 1e-6);
  rc.reset(5.0);
  rc.step(0.0, 2e-3);  // two time constants
  CHECK(rc.voltage() == doctest::Approx(5.0 * std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("disc overlap handles containment and disjoint cases") {
  CHECK(disc_overlap_fraction({0, 0}, 1.0, {0, 0}, 5.0) == 1.0);
  CHECK(disc_overlap_fraction({0, 0}, 1.0, {10, 0}, 5.0) == 0.0);
  // Small finger inside a big electrode: area ratio.
  CHECK(disc_overlap_fraction({0, 0}, 2.0, {0.1, 0}, 0.5) == doctest::Approx(0.0625));
}

TEST_CASE("partial disc overlap matches a Monte-Carlo oracle") {
  const Vec2 electrode{0.0, 0.0};
  const double r1 = 1.0;
  const Vec2 finger{1.2, 0.4};
  const double r2 = 2.0;
  const double analytic = disc_overlap_fraction(electrode, r1, finger, r2);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t samples = 4000000;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double rad = r1 * std::sqrt(unit(rng));
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    const double x = electrode.x + rad * std::cos(ang);
    const double y = electrode.y + rad * std::sin(ang);
    const double dx = x - finger.x;
    const double dy = y - finger.y;
    if (dx * dx + dy * dy <= r2 * r2) ++inside;
  }
  const double monte_carlo = static_cast<double>(inside) / static_cast<double>(samples);
  CHECK(std::abs(analytic - monte_carlo) < 1e-3);
}

TEST_CASE("finger midway between two electrodes covers them equally") {
  const ArrayGeometry g;
  FingerTrajectory traj;
  traj.center_mm = {1.5, 0.0};  // midway between (0,0) and (0,1) centers
  traj.radius_mm = 0.0;
  traj.rev_per_s = 0.0;

  SUBCASE("large pad covers both fully") {
    traj.contact_radius_mm = 5.0;
    const std::vector<double> cov = contact_state(traj, g, 0.0);
    CHECK(cov[0] == 1.0);
    CHECK(cov[1] == 1.0);
  }

  SUBCASE("small pad covers both partially but equally") {
    traj.contact_radius_mm = 2.0;
    const std::vector<double> cov = contact_state(traj, g, 0.0);
    CHECK(cov[0] > 0.0);
    CHECK(cov[0] < 1.0);
    CHECK(cov[0] == cov[1]);
  }
}

TEST_CASE("contact examples from the tracing setup") {
  const ArrayGeometry g;
  FingerTrajectory traj;
  traj.radius_mm = 0.0;
  traj.rev_per_s = 0.0;

  traj.center_mm = electrode_center({3, 3}, g);
  const std::vector<double> on = contact_state(traj, g, 0.0);
  CHECK(on[static_cast<std::size_t>(linear_index({3, 3}, g))] == 1.0);

  traj.center_mm = {500.0, 500.0};
  for (double c : contact_state(traj, g, 0.0)) CHECK(c == 0.0);
}

TEST_CASE("steady constant-current drive lands in the regulated window") {
  const TwoElectrodeSetup setup(10.0);
  const SimTrace trace = simulate(setup.schedule, SkinContactModel{}, MechModel{}, setup.traj,
                                  5e-6, 0.05);
  const double steady = trace.v_drive_V.back();
  // I*(R_sc + r_body) = 10 mA * 16 kOhm
  CHECK(steady == doctest::Approx(160.0).epsilon(1e-3));
  CHECK(steady > 100.0);
  CHECK(steady < 200.0);
  for (double v : trace.v_drive_V) CHECK(v <= 300.0);
  // Both gap voltages settle at I*R_sc/2 = 75 V.
  CHECK(trace.v_gap_V.back() == doctest::Approx(75.0).epsilon(1e-3));
}

TEST_CASE("compliance clamps the deliverable current") {
  // 30 mA through 16 kOhm would need 480 V; the supply rails at 300 V and
  // the realized current settles at 300/16000 = 18.75 mA.
  const TwoElectrodeSetup setup(30.0);
  const SimTrace trace = simulate(setup.schedule, SkinContactModel{}, MechModel{}, setup.traj,
                                  5e-6, 0.05);
  CHECK(trace.v_drive_V.back() == doctest::Approx(300.0).epsilon(1e-9));
  for (double v : trace.v_drive_V) CHECK(v <= 300.0);
  CHECK(trace.v_gap_V.back() == doctest::Approx(0.01875 * 7500.0).epsilon(1e-3));
}

TEST_CASE("doubling the current doubles gap voltage and quadruples force") {
  const TwoElectrodeSetup low(4.0);
  const TwoElectrodeSetup high(8.0);
  const SimTrace a =
      simulate(low.schedule, SkinContactModel{}, MechModel{}, low.traj, 5e-6, 0.02);
  const SimTrace b =
      simulate(high.schedule, SkinContactModel{}, MechModel{}, high.traj, 5e-6, 0.02);
  CHECK(b.v_gap_V.back() / a.v_gap_V.back() == doctest::Approx(2.0).epsilon(0.02));
  CHECK(b.force_N.back() / a.force_N.back() == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("force is never attractive-negative") {
  ElectroadhesionParams p;
  const PulseSchedule s = compile_electroadhesion(p, ArrayGeometry{});
  const SimTrace trace = simulate(s, SkinContactModel{}, MechModel{}, FingerTrajectory{}, 5e-6,
                                  0.008);
  for (double f : trace.force_N) CHECK(f >= 0.0);
}

TEST_CASE("zero-amplitude schedules produce no force or motion") {
  const ArrayGeometry g;
  PulseSchedule s;
  s.geometry = g;
  s.frames.push_back(uniform_frame(g, 10000, ElectrodeRole::Ground));
  const SimTrace trace = simulate(s, SkinContactModel{}, MechModel{}, FingerTrajectory{}, 5e-6,
                                  0.01);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(trace.force_N[i] == 0.0);
    CHECK(trace.accel_G[i] == 0.0);
    CHECK(trace.v_drive_V[i] == 0.0);
  }
}

TEST_CASE("too-coarse steps are rejected") {
  const PulseSchedule s = compile_electroadhesion({}, ArrayGeometry{});
  try {
    simulate(s, SkinContactModel{}, MechModel{}, FingerTrajectory{}, 1e-5, 0.008);
    FAIL("expected step-size error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepSize);
  }
  // dt exactly frame/10 is allowed.
  CHECK_NOTHROW(simulate(s, SkinContactModel{}, MechModel{}, FingerTrajectory{}, 5e-6, 0.008));
}

TEST_CASE("invalid physical parameters are rejected") {
  const PulseSchedule s = compile_electroadhesion({}, ArrayGeometry{});
  SkinContactModel bad_skin;
  bad_skin.r_sc_ohm = 0.0;
  CHECK_THROWS_AS(simulate(s, bad_skin, MechModel{}, FingerTrajectory{}, 5e-6, 0.008), Error);
  MechModel bad_mech;
  bad_mech.mass_kg = 0.0;
  CHECK_THROWS_AS(simulate(s, SkinContactModel{}, bad_mech, FingerTrajectory{}, 5e-6, 0.008),
                  Error);
  FingerTrajectory bad_traj;
  bad_traj.contact_radius_mm = 0.0;
  CHECK_THROWS_AS(simulate(s, SkinContactModel{}, MechModel{}, bad_traj, 5e-6, 0.008), Error);
}

TEST_CASE("undriven oscillator energy never increases") {
  const MechModel mech;
  MechState state;
  state.x_m = 1e-3;
  double energy = state.energy_J(mech);
  for (int i = 0; i < 200000; ++i) {
    state = mech_step(mech, state, 0.0, 5e-6);
    const double next = state.energy_J(mech);
    CHECK(next <= energy + 1e-18);
    energy = next;
  }
  CHECK(energy < 1e-6);  // strongly damped by 1 s
}

TEST_CASE("patches relax and the drive drops after the schedule ends") {
  ElectroadhesionParams p;  // one 8 ms period
  const PulseSchedule s = compile_electroadhesion(p, ArrayGeometry{});
  FingerTrajectory traj;
  traj.rev_per_s = 0.0;
  const SimTrace trace = simulate(s, SkinContactModel{}, MechModel{}, traj, 5e-6, 0.02);
  const std::size_t at_end = static_cast<std::size_t>(0.008 / 5e-6) - 1;
  CHECK(trace.v_drive_V.back() == 0.0);
  CHECK(trace.force_N.back() < trace.force_N[at_end - 10]);
  CHECK(trace.force_N.back() < 1e-12);
}

TEST_CASE("baseline with zero noise is identically zero") {
  SimOptions options;
  options.duration_s = 0.05;
  options.noise_sigma_G = 0.0;
  const SimTrace trace = synthesize_experiment(std::nullopt, ArrayGeometry{}, SkinContactModel{},
                                               MechModel{}, FingerTrajectory{}, options);
  for (double a : trace.accel_G) CHECK(a == 0.0);
  for (double f : trace.force_N) CHECK(f == 0.0);
}

TEST_CASE("seeded baseline noise is reproducible and has the expected rms") {
  SimOptions options;
  options.duration_s = 0.2;
  options.noise_sigma_G = 5e-4;
  options.seed = 1234;
  const SimTrace a = synthesize_experiment(std::nullopt, ArrayGeometry{}, SkinContactModel{},
                                           MechModel{}, FingerTrajectory{}, options);
  const SimTrace b = synthesize_experiment(std::nullopt, ArrayGeometry{}, SkinContactModel{},
                                           MechModel{}, FingerTrajectory{}, options);
  REQUIRE(a.accel_G == b.accel_G);  // bit-identical

  // Direct recomputation of the RMS from the emitted samples.
  double sum_sq = 0.0;
  for (double v : a.accel_G) sum_sq += v * v;
  const double direct = std::sqrt(sum_sq / static_cast<double>(a.accel_G.size()));
  const TimeSeries ts{1.0 / options.dt_s, a.accel_G};
  CHECK(rms(ts) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(direct == doctest::Approx(5e-4).epsilon(0.02));
}

TEST_CASE("stimulated trace is dominated by the 125 Hz envelope") {
  SimOptions options;
  options.duration_s = 0.5;
  options.noise_sigma_G = 5e-4;
  const SimTrace trace = synthesize_experiment(ElectroadhesionParams{}, ArrayGeometry{},
                                               SkinContactModel{}, MechModel{},
                                               FingerTrajectory{}, options);
  const TimeSeries ts{1.0 / options.dt_s, trace.accel_G};
  const double peak = dominant_frequency(moving_average_detrend(ts));
  CHECK(std::abs(peak - 125.0) <= 1.0 / options.duration_s + 1e-9);
  for (double v : trace.v_drive_V) CHECK(v <= 300.0);
}

TEST_CASE("synthesis requires at least one envelope period") {
  SimOptions options;
  options.duration_s = 0.004;  // half a period
  CHECK_THROWS_AS(synthesize_experiment(ElectroadhesionParams{}, ArrayGeometry{},
                                        SkinContactModel{}, MechModel{}, FingerTrajectory{},
                                        options),
                  Error);
}

TEST_CASE("identical inputs produce bit-identical traces") {
  SimOptions options;
  options.duration_s = 0.1;
  options.noise_sigma_G = 5e-4;
  options.seed = 77;
  const auto run = [&]() {
    return synthesize_experiment(ElectroadhesionParams{}, ArrayGeometry{}, SkinContactModel{},
                                 MechModel{}, FingerTrajectory{}, options);
  };
  const SimTrace a = run();
  const SimTrace b = run();
  CHECK(a.t_s == b.t_s);
  CHECK(a.v_drive_V == b.v_drive_V);
  CHECK(a.v_gap_V == b.v_gap_V);
  CHECK(a.force_N == b.force_N);
  CHECK(a.accel_G == b.accel_G);
  CHECK(a.contact_count == b.contact_count);
}

TEST_CASE("trace csv round-trips through the analysis reader") {
  const TwoElectrodeSetup setup(10.0, 5000);
  const SimTrace trace = simulate(setup.schedule, SkinContactModel{}, MechModel{}, setup.traj,
                                  5e-6, 0.005);
  std::ostringstream out;
  write_trace_csv(trace, out);
  std::istringstream in(out.str());
  const AccelTrace back = read_accel_csv(in);
  REQUIRE(back.series.size() == trace.size());
  CHECK(back.series.fs_hz == doctest::Approx(1.0 / trace.dt_s).epsilon(1e-9));
  for (std::size_t i = 0; i < trace.size(); ++i)
    CHECK(back.series.samples[i] == doctest::Approx(trace.accel_G[i]).epsilon(1e-9));
}
