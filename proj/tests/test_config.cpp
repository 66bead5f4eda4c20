#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "estim/config.hpp"

using namespace estim;

TEST_CASE("the default config template parses back to the defaults") {
  const ExperimentConfig cfg = ExperimentConfig::from_string(default_config_text());
  CHECK(cfg.mode == ExperimentConfig::Mode::Electroadhesion);
  CHECK(cfg.geometry.rows == 8);
  CHECK(cfg.electroadhesion.pulse_width_us == 50);
  CHECK(cfg.electroadhesion.burst_us == 4000);
  CHECK(cfg.electroadhesion.pause_us == 4000);
  CHECK(cfg.skin.r_sc_ohm == doctest::Approx(15000.0));
  CHECK(cfg.skin.c_sc_F == doctest::Approx(20e-9));
  CHECK(cfg.mech.mass_kg == doctest::Approx(0.005));
  CHECK(cfg.dt_s == doctest::Approx(5e-6));
  CHECK(cfg.seed == 1);
  CHECK_NOTHROW(cfg.validate());
  // Trajectory center defaults to the array center.
  CHECK(cfg.trajectory.center_mm.x == doctest::Approx(10.5));
  CHECK(cfg.trajectory.center_mm.y == doctest::Approx(10.5));
}

TEST_CASE("unknown keys are rejected with their line") {
  const std::string text = "[skin]\nr_sc_ohm = 15000\nmoisture = 3\n";
  try {
    ExperimentConfig::from_string(text);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadConfig);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("skin.moisture") != std::string::npos);
  }
}

TEST_CASE("unknown sections are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::from_string("[plasma]\ntemperature = 9000\n"), Error);
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::from_string("[array]\nrows = 8\nrows = 4\n"), Error);
}

TEST_CASE("malformed values carry context") {
  try {
    ExperimentConfig::from_string("[experiment]\ndt_s = fast\n");
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadConfig);
    CHECK(std::string(e.what()).find("dt_s") != std::string::npos);
  }
}

TEST_CASE("keys outside a section are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::from_string("rows = 8\n"), Error);
}

TEST_CASE("millisecond keys convert to whole microseconds") {
  const ExperimentConfig cfg =
      ExperimentConfig::from_string("[electroadhesion]\nburst_ms = 4.05\n");
  CHECK(cfg.electroadhesion.burst_us == 4050);
  CHECK_THROWS_AS(ExperimentConfig::from_string("[electroadhesion]\nburst_ms = 0.0505\n"), Error);
}

TEST_CASE("pattern and polarity enums parse") {
  const ExperimentConfig cb =
      ExperimentConfig::from_string("[electroadhesion]\npattern = checkerboard\n");
  CHECK(cb.electroadhesion.pattern.kind == PartitionKind::Checkerboard);
  CHECK_THROWS_AS(ExperimentConfig::from_string("[electroadhesion]\npattern = plaid\n"), Error);

  const ExperimentConfig cath =
      ExperimentConfig::from_string("[electrotactile]\npolarity = cathodic\n");
  CHECK(cath.electrotactile.polarity == Polarity::Cathodic);
}

TEST_CASE("overrides reuse the same key table") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.apply_override("electroadhesion.current_ma", "5.5");
  CHECK(cfg.electroadhesion.current_mA == doctest::Approx(5.5));
  cfg.apply_override("experiment.mode", "baseline");
  CHECK(cfg.mode == ExperimentConfig::Mode::Baseline);
  CHECK_THROWS_AS(cfg.apply_override("experiment.warp", "9"), Error);
  CHECK_THROWS_AS(cfg.apply_override("electroadhesion.current_ma", "lots"), Error);
}

TEST_CASE("explicit trajectory center wins over the array center") {
  const ExperimentConfig cfg =
      ExperimentConfig::from_string("[trajectory]\ncenter_x_mm = 2.0\ncenter_y_mm = 3.0\n");
  CHECK(cfg.trajectory.center_mm.x == doctest::Approx(2.0));
  CHECK(cfg.trajectory.center_mm.y == doctest::Approx(3.0));
}

TEST_CASE("comments and blank lines are ignored") {
  const std::string text =
      "# top comment\n"
      "\n"
      "[experiment]\n"
      "  # indented comment\n"
      "  seed = 42\n";
  CHECK(ExperimentConfig::from_string(text).seed == 42);
}

TEST_CASE("validation catches cross-field problems") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.dt_s = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = ExperimentConfig::defaults();
  cfg.geometry.electrode_diameter_mm = 10.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("known_keys lists every section.key") {
  const auto keys = ExperimentConfig::known_keys();
  CHECK(keys.size() > 30);
  bool found = false;
  for (const auto& k : keys)
    if (k == "electroadhesion.current_ma") found = true;
  CHECK(found);
}
