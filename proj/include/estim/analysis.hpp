#pragma once

#include <iosfwd>
#include <vector>

#include "estim/errors.hpp"

namespace estim {

/// Uniformly sampled scalar signal; acceleration series carry G units.
struct TimeSeries {
  double fs_hz = 0.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
};

enum class DetrendAlignment { Centered, Trailing };

/// Subtracts a moving average from each sample. The centered window is
/// symmetric (2*floor(round(window_s*fs)/2)+1 samples) and shrinks at the
/// series edges, which keeps output length equal to input length and cancels
/// linear trends exactly away from the edges. Trailing mode averages the
/// window ending at each sample instead.
TimeSeries moving_average_detrend(const TimeSeries& x, double window_s = 0.2,
                                  DetrendAlignment alignment = DetrendAlignment::Centered);

/// sqrt(mean of squares). Errors on an empty series.
double rms(const TimeSeries& x);

/// Frequency of the maximum-magnitude DFT bin, DC excluded, ties broken
/// toward lower frequency. Requires at least 16 samples. Optional Hann
/// window; off by default.
double dominant_frequency(const TimeSeries& x, bool hann_window = false);

struct AnalysisReport {
  double rms_G = 0.0;
  double dominant_freq_hz = 0.0;
  TimeSeries detrended;
};

/// Detrend, then RMS and spectral peak of the detrended series.
AnalysisReport analyze(const TimeSeries& x, double window_s = 0.2);

struct ConditionComparison {
  double rms_stim = 0.0;
  double rms_base = 0.0;
  double ratio = 0.0;
};

/// Detrends both series with the same window and reports their RMS and the
/// stimulated/baseline ratio.
ConditionComparison compare_conditions(const TimeSeries& stim, const TimeSeries& base,
                                       double window_s = 0.2);

struct AccelTrace {
  TimeSeries series;
  double t0_s = 0.0;
};

/// Reads either the simulator trace CSV (picks the t_s and accel_G columns)
/// or a bare two-column t_s,accel_G file, with or without a header row.
/// Sample spacing must be uniform; the rate is derived from the timestamps.
AccelTrace read_accel_csv(std::istream& in);
AccelTrace read_accel_csv_file(const std::string& path);

void write_detrended_csv(const TimeSeries& detrended, double t0_s, std::ostream& out);

}  // namespace estim
