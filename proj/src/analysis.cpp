#include "estim/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace estim {

namespace {

void require_non_empty(const TimeSeries& x) {
  if (x.samples.empty()) fail(ErrorCode::EmptyInput, "series has no samples");
  if (!(x.fs_hz > 0.0)) fail(ErrorCode::Range, "sample rate must be > 0 Hz");
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

TimeSeries moving_average_detrend(const TimeSeries& x, double window_s,
                                  DetrendAlignment alignment) {
  require_non_empty(x);
  const long long nominal = std::llround(window_s * x.fs_hz);
  if (nominal < 1)
    fail(ErrorCode::Range, "detrend window " + fmt_g(window_s) + " s is shorter than one sample at " +
                               fmt_g(x.fs_hz) + " Hz");

  const auto n = static_cast<std::ptrdiff_t>(x.samples.size());
  // prefix[i] = sum of samples [0, i)
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x.samples[i];

  TimeSeries y;
  y.fs_hz = x.fs_hz;
  y.samples.resize(x.samples.size());

  if (alignment == DetrendAlignment::Centered) {
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(nominal / 2);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
      const double mean = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
      y.samples[i] = x.samples[i] - mean;
    }
  } else {
    const auto w = static_cast<std::ptrdiff_t>(nominal);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - w + 1);
      const double mean = (prefix[i + 1] - prefix[lo]) / static_cast<double>(i - lo + 1);
      y.samples[i] = x.samples[i] - mean;
    }
  }
  return y;
}

double rms(const TimeSeries& x) {
  require_non_empty(x);
  double sum_sq = 0.0;
  for (double v : x.samples) sum_sq += v * v;
  return std::sqrt(sum_sq / static_cast<double>(x.samples.size()));
}

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double dominant_frequency(const TimeSeries& x, bool hann_window) {
  require_non_empty(x);
  const std::size_t n = x.samples.size();
  if (n < 16) fail(ErrorCode::TooShort, "need >= 16 samples, got " + std::to_string(n));

  std::vector<double> in(x.samples);
  if (hann_window) {
    for (std::size_t i = 0; i < n; ++i)
      in[i] *= 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(n - 1)));
  }

  const std::size_t bins = n / 2 + 1;
  std::vector<fftw_complex> out(bins);
  fftw_plan plan;
  {
    std::scoped_lock lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::scoped_lock lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }

  std::size_t best = 1;
  double best_mag = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double mag = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  return static_cast<double>(best) * x.fs_hz / static_cast<double>(n);
}

AnalysisReport analyze(const TimeSeries& x, double window_s) {
  AnalysisReport report;
  report.detrended = moving_average_detrend(x, window_s);
  report.rms_G = rms(report.detrended);
  report.dominant_freq_hz = dominant_frequency(report.detrended);
  return report;
}

ConditionComparison compare_conditions(const TimeSeries& stim, const TimeSeries& base,
                                       double window_s) {
  ConditionComparison cmp;
  cmp.rms_stim = rms(moving_average_detrend(stim, window_s));
  cmp.rms_base = rms(moving_average_detrend(base, window_s));
  if (cmp.rms_base > 0.0)
    cmp.ratio = cmp.rms_stim / cmp.rms_base;
  else
    cmp.ratio = cmp.rms_stim > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  return cmp;
}

namespace {

bool parse_double(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

AccelTrace read_accel_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  int t_col = -1;
  int a_col = -1;
  std::size_t n_cols = 0;
  bool header_done = false;

  std::vector<double> t;
  std::vector<double> a;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (!header_done) {
      double probe;
      if (!parse_double(fields[0], probe)) {
        // Header row: locate t_s and accel_G columns.
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (fields[i] == "t_s") t_col = static_cast<int>(i);
          if (fields[i] == "accel_G") a_col = static_cast<int>(i);
        }
        if (t_col < 0 || a_col < 0)
          fail(ErrorCode::BadFormat,
               "line " + std::to_string(line_no) + ": header lacks t_s/accel_G columns");
        n_cols = fields.size();
        header_done = true;
        continue;
      }
      // Headerless: two numeric columns, t then accel.
      if (fields.size() != 2)
        fail(ErrorCode::BadFormat, "line " + std::to_string(line_no) +
                                       ": headerless input must have exactly 2 columns");
      t_col = 0;
      a_col = 1;
      n_cols = 2;
      header_done = true;
    }
    if (fields.size() != n_cols)
      fail(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(n_cols) + " columns, got " +
                                     std::to_string(fields.size()));
    double tv, av;
    if (!parse_double(fields[static_cast<std::size_t>(t_col)], tv) ||
        !parse_double(fields[static_cast<std::size_t>(a_col)], av))
      fail(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": malformed number");
    t.push_back(tv);
    a.push_back(av);
  }
  if (t.size() < 2) fail(ErrorCode::TooShort, "need at least 2 samples");

  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) fail(ErrorCode::BadFormat, "timestamps are not increasing");
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double step = t[i] - t[i - 1];
    if (std::abs(step - dt) > 1e-3 * dt)
      fail(ErrorCode::BadFormat, "sample " + std::to_string(i) + ": non-uniform sample spacing");
  }

  AccelTrace trace;
  trace.t0_s = t.front();
  trace.series.fs_hz = 1.0 / dt;
  trace.series.samples = std::move(a);
  return trace;
}

AccelTrace read_accel_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  return read_accel_csv(in);
}

void write_detrended_csv(const TimeSeries& detrended, double t0_s, std::ostream& out) {
  out << "t_s,accel_G\n";
  const double dt = 1.0 / detrended.fs_hz;
  for (std::size_t i = 0; i < detrended.samples.size(); ++i)
    out << fmt_g(t0_s + static_cast<double>(i) * dt) << ',' << fmt_g(detrended.samples[i]) << '\n';
}

}  // namespace estim
