#pragma once

// IF LFM drive signal s(t) = cos(2π f_start t + π k t²) and its
// time-frequency bookkeeping.

#include <cstddef>
#include <vector>

#include "pmr/dsp.hpp"

namespace pmr {

/// Transmit chirp definition. Construct through `LfmParams::make` so the
/// derived chirp rate stays consistent with bandwidth and duration.
struct LfmParams {
  double f_start = 0.0;      // Hz
  double bandwidth = 0.0;    // Hz
  double duration = 0.0;     // s
  double chirp_rate = 0.0;   // Hz/s, bandwidth / duration
  double sample_rate = 0.0;  // Hz

  static LfmParams make(double f_start, double bandwidth, double duration, double sample_rate);

  /// Checks finiteness, positivity and chirp-rate consistency. With
  /// `waveform_level` also enforces Nyquist for the real IF drive.
  void validate(bool waveform_level) const;

  double f_stop() const { return f_start + bandwidth; }
};

/// 4.7–5.7 GHz, 100 µs pulse; sample_rate set for waveform-level work.
LfmParams paper_lfm();

/// Real-valued sampled waveform.
struct SampledSignal {
  std::vector<double> samples;
  double sample_rate = 0.0;
  double start_time = 0.0;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t n) const { return start_time + static_cast<double>(n) / sample_rate; }
  void validate() const;
};

/// LFM phase φ(t) in radians.
double lfm_phase(const LfmParams& p, double t);

SampledSignal generate_lfm(const LfmParams& p);

/// f_start + k t, for 0 <= t <= duration.
double instantaneous_frequency(const LfmParams& p, double t);

}  // namespace pmr
