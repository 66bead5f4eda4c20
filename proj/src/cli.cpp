#include "estim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "estim/analysis.hpp"
#include "estim/charge.hpp"
#include "estim/protocol.hpp"
#include "estim/sim.hpp"

namespace estim::cli {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Divergence:
    case ErrorCode::Io:
      return kExitRuntime;
    default:
      return kExitInvalid;
  }
}

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_exact(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  return out;
}

PulseSchedule build_schedule(const ExperimentConfig& config) {
  switch (config.mode) {
    case ExperimentConfig::Mode::Electroadhesion:
      return compile_electroadhesion(config.electroadhesion, config.geometry);
    case ExperimentConfig::Mode::Electrotactile:
      return compile_electrotactile(config.electrotactile, config.geometry);
    case ExperimentConfig::Mode::Baseline:
      fail(ErrorCode::BadConfig, "baseline mode has no schedule to compile");
  }
  fail(ErrorCode::BadConfig, "unreachable mode");
}

void print_stats(const PulseSchedule& schedule, const ExperimentConfig& config,
                 std::ostream& out) {
  const ScheduleStats stats = schedule_stats(schedule);
  out << "label = " << schedule.label << "\n";
  out << "frames = " << schedule.frames.size() << "\n";
  out << "stimulation_frames = " << stats.stimulation_frame_count << "\n";
  out << "total_duration_us = " << stats.total_duration_us << "\n";
  if (stats.envelope_frequency_hz)
    out << "envelope_frequency_hz = " << fmt_g(*stats.envelope_frequency_hz) << "\n";
  else
    out << "envelope_frequency_hz = none\n";
  out << "active_duty_fraction = " << fmt_g(stats.active_duty_fraction) << "\n";
  if (stats.swap_cycle_count)
    out << "swap_cycles = " << *stats.swap_cycle_count << "\n";
  else
    out << "swap_cycles = none\n";
  out << "max_amplitude_mA = " << fmt_g(stats.max_amplitude_mA) << "\n";
  if (config.mode == ExperimentConfig::Mode::Electroadhesion) {
    const auto group_a = partition_mask(config.electroadhesion.pattern, config.geometry);
    out << "group_a = " << group_a.size() << "\n";
    out << "group_b = " << config.geometry.electrode_count() - group_a.size() << "\n";
  }
}

struct RunMetrics {
  double rms_stim_G = 0.0;
  double rms_base_G = 0.0;
  double rms_ratio = 0.0;
  double dominant_freq_stim_hz = 0.0;
  double max_v_drive_V = 0.0;
  double force_rms_N = 0.0;
  bool has_stim = false;
};

double series_max(const std::vector<double>& v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, x);
  return best;
}

double series_rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum / static_cast<double>(v.size()));
}

/// Shared body of run/sweep: simulates the configured condition pair into
/// out_dir and returns the comparison metrics. The stimulated and baseline
/// runs share the trajectory phase and the noise seed so the contrast
/// isolates stimulation.
RunMetrics run_experiment(const ExperimentConfig& config, bool gnuplot_script) {
  config.validate();
  ensure_dir(config.out_dir);

  SimOptions options;
  options.dt_s = config.dt_s;
  options.duration_s = config.duration_s;
  options.noise_sigma_G = config.noise_sigma_G;
  options.seed = config.seed;
  options.compliance_V = config.safety.max_compliance_V;

  const SimTrace base = synthesize_experiment(std::nullopt, config.geometry, config.skin,
                                              config.mech, config.trajectory, options);

  std::optional<SimTrace> stim;
  if (config.mode == ExperimentConfig::Mode::Electroadhesion) {
    stim = synthesize_experiment(config.electroadhesion, config.geometry, config.skin, config.mech,
                                 config.trajectory, options);
  } else if (config.mode == ExperimentConfig::Mode::Electrotactile) {
    const PulseSchedule schedule = compile_electrotactile(config.electrotactile, config.geometry);
    SimTrace trace = simulate(schedule, config.skin, config.mech, config.trajectory, options.dt_s,
                              options.duration_s, options.compliance_V);
    if (options.noise_sigma_G > 0.0)
      add_measurement_noise(trace, options.noise_sigma_G, options.seed);
    stim = std::move(trace);
  }

  write_trace_csv_file(base, config.out_dir + "/base_trace.csv");
  if (stim) write_trace_csv_file(*stim, config.out_dir + "/stim_trace.csv");

  RunMetrics metrics;
  const TimeSeries base_ts{1.0 / config.dt_s, base.accel_G};
  metrics.rms_base_G = rms(moving_average_detrend(base_ts));
  if (stim) {
    metrics.has_stim = true;
    const TimeSeries stim_ts{1.0 / config.dt_s, stim->accel_G};
    const ConditionComparison cmp = compare_conditions(stim_ts, base_ts);
    metrics.rms_stim_G = cmp.rms_stim;
    metrics.rms_base_G = cmp.rms_base;
    metrics.rms_ratio = cmp.ratio;
    metrics.dominant_freq_stim_hz = dominant_frequency(moving_average_detrend(stim_ts));
    metrics.max_v_drive_V = series_max(stim->v_drive_V);
    metrics.force_rms_N = series_rms(stim->force_N);
  }

  std::ofstream report = open_out(config.out_dir + "/report.txt");
  report << "mode = " << mode_name(config.mode) << "\n";
  report << "duration_s = " << fmt_g(config.duration_s) << "\n";
  report << "dt_s = " << fmt_g(config.dt_s) << "\n";
  report << "seed = " << config.seed << "\n";
  report << "noise_sigma_G = " << fmt_g(config.noise_sigma_G) << "\n";
  report << "rms_base_G = " << fmt_g(metrics.rms_base_G) << "\n";
  if (metrics.has_stim) {
    report << "rms_stim_G = " << fmt_g(metrics.rms_stim_G) << "\n";
    report << "rms_ratio = " << fmt_g(metrics.rms_ratio) << "\n";
    report << "dominant_freq_stim_hz = " << fmt_g(metrics.dominant_freq_stim_hz) << "\n";
    report << "max_v_drive_V = " << fmt_g(metrics.max_v_drive_V) << "\n";
    report << "force_rms_N = " << fmt_g(metrics.force_rms_N) << "\n";
  }
  if (!report) fail(ErrorCode::Io, "write failed: " + config.out_dir + "/report.txt");
  report.close();

  if (gnuplot_script) {
    std::ofstream plot = open_out(config.out_dir + "/plot.gp");
    plot << "set datafile separator ','\n"
         << "set xlabel 't [s]'\n"
         << "set ylabel 'accel [G]'\n";
    if (metrics.has_stim)
      plot << "plot 'stim_trace.csv' using 1:5 with lines title 'stimulated', \\\n"
           << "     'base_trace.csv' using 1:5 with lines title 'baseline'\n";
    else
      plot << "plot 'base_trace.csv' using 1:5 with lines title 'baseline'\n";
  }
  return metrics;
}

}  // namespace

ExperimentConfig load_config(const GlobalOptions& options) {
  ExperimentConfig config = options.config_path.empty()
                                ? ExperimentConfig::defaults()
                                : ExperimentConfig::from_file(options.config_path);
  for (const std::string& kv : options.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::BadConfig, "--set expects section.key=value, got '" + kv + "'");
    config.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (options.seed_override) config.seed = *options.seed_override;
  if (!options.out_override.empty()) config.out_dir = options.out_override;
  if (!config.trajectory_center_set) config.trajectory.center_mm = config.geometry.center_mm();
  return config;
}

int cmd_compile(const ExperimentConfig& config, bool allow_unbalanced, bool quiet,
                std::ostream& out) {
  config.validate();
  const PulseSchedule schedule = build_schedule(config);
  if (!quiet) print_stats(schedule, config, out);

  const SafetyReport safety = check_safety(schedule, config.safety);
  if (!safety.pass) {
    out << "audit = fail\n";
    for (const SafetyViolation& v : safety.violations) out << "violation = " << v.message << "\n";
    if (!allow_unbalanced) {
      out << "packet not written (use --allow-unbalanced to override)\n";
      return kExitRuntime;
    }
  } else if (!quiet) {
    out << "audit = pass\n";
  }

  ensure_dir(config.out_dir);
  const std::string path = config.out_dir + "/schedule.estp";
  const std::vector<std::uint8_t> packet = encode_schedule(schedule);
  write_packet_file(path, packet);
  if (!quiet) out << "packet = " << path << " (" << packet.size() << " bytes)\n";
  return kExitOk;
}

int cmd_run(const ExperimentConfig& config, bool gnuplot_script, bool quiet, std::ostream& out) {
  const RunMetrics metrics = run_experiment(config, gnuplot_script);
  if (!quiet) {
    out << "rms_base_G = " << fmt_g(metrics.rms_base_G) << "\n";
    if (metrics.has_stim) {
      out << "rms_stim_G = " << fmt_g(metrics.rms_stim_G) << "\n";
      out << "rms_ratio = " << fmt_g(metrics.rms_ratio) << "\n";
      out << "dominant_freq_stim_hz = " << fmt_g(metrics.dominant_freq_stim_hz) << "\n";
      out << "max_v_drive_V = " << fmt_g(metrics.max_v_drive_V) << "\n";
      out << "force_rms_N = " << fmt_g(metrics.force_rms_N) << "\n";
    }
    out << "out_dir = " << config.out_dir << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& config, const std::string& axis,
              const std::vector<double>& values, unsigned jobs, bool quiet, std::ostream& out) {
  config.validate();
  const std::vector<std::string> keys = ExperimentConfig::known_keys();
  if (std::find(keys.begin(), keys.end(), axis) == keys.end())
    fail(ErrorCode::BadConfig, "unknown sweep axis '" + axis + "'");
  ensure_dir(config.out_dir);

  struct Row {
    double value;
    RunMetrics metrics;
    std::string error;
  };
  std::vector<Row> rows(values.size());

  if (jobs == 0) jobs = 1;
  std::vector<std::future<void>> pending;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto job = [&, i]() {
      Row& row = rows[i];
      row.value = values[i];
      try {
        ExperimentConfig local = config;
        local.apply_override(axis, fmt_exact(values[i]));
        local.out_dir = config.out_dir + "/sweep_" + std::to_string(i);
        if (!local.trajectory_center_set) local.trajectory.center_mm = local.geometry.center_mm();
        row.metrics = run_experiment(local, false);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    };
    pending.push_back(std::async(std::launch::async, job));
    if (pending.size() >= jobs) {
      for (auto& f : pending) f.get();
      pending.clear();
    }
  }
  for (auto& f : pending) f.get();

  std::ofstream csv = open_out(config.out_dir + "/sweep.csv");
  csv << axis << ",rms_stim_G,rms_base_G,rms_ratio,dominant_freq_stim_hz,max_v_drive_V,"
         "force_rms_N,status\n";
  for (const Row& row : rows) {
    std::string status = row.error.empty() ? "ok" : row.error;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    csv << fmt_g(row.value) << ',' << fmt_g(row.metrics.rms_stim_G) << ','
        << fmt_g(row.metrics.rms_base_G) << ',' << fmt_g(row.metrics.rms_ratio) << ','
        << fmt_g(row.metrics.dominant_freq_stim_hz) << ',' << fmt_g(row.metrics.max_v_drive_V)
        << ',' << fmt_g(row.metrics.force_rms_N) << ',' << status << '\n';
  }
  csv.close();
  if (!quiet) out << "sweep rows = " << rows.size() << ", summary = " << config.out_dir
                  << "/sweep.csv\n";
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& options, bool quiet, std::ostream& out) {
  const AccelTrace trace = read_accel_csv_file(options.csv_path);
  const DetrendAlignment alignment =
      options.trailing ? DetrendAlignment::Trailing : DetrendAlignment::Centered;
  const TimeSeries detrended = moving_average_detrend(trace.series, options.window_s, alignment);
  const double rms_G = rms(detrended);
  const double dominant = dominant_frequency(detrended, options.hann);

  out << "samples = " << trace.series.size() << "\n";
  out << "fs_hz = " << fmt_g(trace.series.fs_hz) << "\n";
  out << "window_s = " << fmt_g(options.window_s) << "\n";
  out << "rms_G = " << fmt_g(rms_G) << "\n";
  out << "dominant_freq_hz = " << fmt_g(dominant) << "\n";
  (void)quiet;

  if (!options.detrended_csv_out.empty()) {
    std::ofstream csv = open_out(options.detrended_csv_out);
    write_detrended_csv(detrended, trace.t0_s, csv);
  }
  return kExitOk;
}

int cmd_audit(const ExperimentConfig& config, const std::string& charge_csv, bool quiet,
              std::ostream& out) {
  config.validate();
  const PulseSchedule schedule = build_schedule(config);
  const ChargeReport charge = net_charge(schedule);
  const SafetyReport safety = check_safety(schedule, config.safety);

  out << "frames = " << schedule.frames.size() << "\n";
  out << "max_abs_net_uC = " << fmt_g(charge.max_abs_net_uC) << "\n";
  out << "max_instantaneous_imbalance_uC = " << fmt_g(charge.max_instantaneous_imbalance_uC)
      << "\n";
  out << "total_net_uC = " << fmt_g(charge.total_net_uC()) << "\n";
  out << "audit = " << (safety.pass ? "pass" : "fail") << "\n";
  if (!quiet || !safety.pass)
    for (const SafetyViolation& v : safety.violations) out << "violation = " << v.message << "\n";

  if (!charge_csv.empty()) {
    std::ofstream csv = open_out(charge_csv);
    csv << "row,col,net_uC\n";
    for (std::size_t e = 0; e < charge.per_electrode_net_uC.size(); ++e) {
      const ElectrodeId id = electrode_at(static_cast<int>(e), schedule.geometry);
      csv << id.row << ',' << id.col << ',' << fmt_g(charge.per_electrode_net_uC[e]) << '\n';
    }
  }
  return safety.pass ? kExitOk : kExitRuntime;
}

int cmd_decode(const std::string& packet_path, bool full, bool quiet, std::ostream& out) {
  const std::vector<std::uint8_t> packet = read_packet_file(packet_path);
  const PulseSchedule schedule = decode_schedule(packet);

  out << "geometry = " << schedule.geometry.rows << "x" << schedule.geometry.cols << "\n";
  out << "frames = " << schedule.frames.size() << "\n";
  out << "total_duration_us = " << schedule_total_duration_us(schedule) << "\n";
  const ScheduleStats stats = schedule_stats(schedule);
  if (stats.envelope_frequency_hz)
    out << "envelope_frequency_hz = " << fmt_g(*stats.envelope_frequency_hz) << "\n";
  if (stats.swap_cycle_count) out << "swap_cycles = " << *stats.swap_cycle_count << "\n";

  if (!quiet) {
    for (std::size_t i = 0; i < schedule.frames.size(); ++i) {
      const Frame& f = schedule.frames[i];
      out << "frame " << i << ": " << f.duration_us << " us, " << fmt_g(f.amplitude_mA)
          << " mA, sources=" << count_role(f, ElectrodeRole::Source)
          << " grounds=" << count_role(f, ElectrodeRole::Ground)
          << " floating=" << count_role(f, ElectrodeRole::Floating) << "\n";
      if (full) {
        std::size_t e = 0;
        for (int r = 0; r < schedule.geometry.rows; ++r) {
          out << "  ";
          for (int c = 0; c < schedule.geometry.cols; ++c, ++e) {
            switch (f.roles[e]) {
              case ElectrodeRole::Source: out << 'S'; break;
              case ElectrodeRole::Ground: out << 'G'; break;
              case ElectrodeRole::Floating: out << 'F'; break;
            }
          }
          out << "\n";
        }
      }
    }
  }
  return kExitOk;
}

}  // namespace estim::cli
