#include "pmr/waveform.hpp"

#include <cmath>
#include <string>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"

namespace pmr {

LfmParams LfmParams::make(double f_start, double bandwidth, double duration, double sample_rate) {
  LfmParams p;
  p.f_start = f_start;
  p.bandwidth = bandwidth;
  p.duration = duration;
  p.chirp_rate = bandwidth / duration;
  p.sample_rate = sample_rate;
  return p;
}

void LfmParams::validate(bool waveform_level) const {
  for (double v : {f_start, bandwidth, duration, chirp_rate, sample_rate}) {
    if (!std::isfinite(v)) throw Error("waveform", "LFM parameters must be finite");
  }
  if (f_start < 0.0) throw Error("waveform", "f_start must be non-negative");
  if (bandwidth <= 0.0) throw Error("waveform", "bandwidth must be positive");
  if (duration <= 0.0) throw Error("waveform", "duration must be positive");
  if (std::abs(chirp_rate * duration - bandwidth) > 1e-12 * bandwidth)
    throw Error("waveform", "chirp_rate * duration must equal bandwidth");
  if (waveform_level && sample_rate < 2.0 * f_stop())
    throw Error("waveform", "sample_rate " + std::to_string(sample_rate) +
                                " Hz is below Nyquist for the IF drive (need >= " +
                                std::to_string(2.0 * f_stop()) + " Hz)");
}

LfmParams paper_lfm() { return LfmParams::make(4.7e9, 1.0e9, 100e-6, 12.0e9); }

void SampledSignal::validate() const {
  if (samples.empty()) throw Error("waveform", "signal has no samples");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
    throw Error("waveform", "signal sample_rate must be positive");
  for (double v : samples)
    if (!std::isfinite(v)) throw Error("waveform", "signal contains non-finite samples");
}

double lfm_phase(const LfmParams& p, double t) {
  return kTwoPi * p.f_start * t + kPi * p.chirp_rate * t * t;
}

SampledSignal generate_lfm(const LfmParams& p) {
  p.validate(true);
  const auto n = static_cast<std::size_t>(std::floor(p.duration * p.sample_rate));
  if (n == 0) throw Error("waveform", "pulse shorter than one sample");
  SampledSignal s;
  s.sample_rate = p.sample_rate;
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / p.sample_rate;
    s.samples[i] = std::cos(lfm_phase(p, t));
  }
  return s;
}

double instantaneous_frequency(const LfmParams& p, double t) {
  if (!(t >= 0.0 && t <= p.duration))
    throw Error("waveform", "time " + std::to_string(t) + " s lies outside the pulse");
  return p.f_start + p.chirp_rate * t;
}

}  // namespace pmr
