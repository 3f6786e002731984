#pragma once

// Photonic de-chirp receiver: analytic synthesis of the de-chirped composite,
// a waveform-level cross-check, subband separation and range profiles.

#include <string>
#include <utility>
#include <vector>

#include "pmr/dsp.hpp"
#include "pmr/photonics.hpp"
#include "pmr/scene.hpp"
#include "pmr/waveform.hpp"

namespace pmr {

struct RadarConfig {
  LfmParams lfm;
  MzmParams mzm;
  int l_max = 4;
  double prf = 2000.0;                 // Hz
  double dechirp_sample_rate = 20e6;   // Hz
  double range_min = 1.9;              // m
  double range_max = 2.1;              // m

  double tau_min() const;
  double tau_max() const;
  /// Record length floor(T·fs).
  std::size_t record_length() const;
  void validate() const;
};

/// 4.7–5.7 GHz, 100 µs, four harmonics, 20 MS/s de-chirp, 2 kHz PRF.
RadarConfig default_radar_config();

struct DechirpedRecord {
  cvec samples;
  double sample_rate = 0.0;
  int pulse_index = 0;
  double t_slow = 0.0;
  int order = 0;                  // 0 = composite, l = extracted subband
  std::size_t valid_start = 0;    // first sample inside the full-overlap region

  double time(std::size_t n) const { return static_cast<double>(n) / sample_rate; }
};

struct RangeProfile {
  std::vector<double> ranges;      // m, strictly increasing
  std::vector<double> magnitudes;  // linear
  std::string band_label;
};

/// Signed de-chirp weight of each harmonic, w[0] unused, max |w_l| = 1.
/// To first order in the PM index, the tone at l·k·τ collects the echo
/// harmonic c_l modulated onto reference sidebands i and beaten against
/// sideband i+l; after the upper-sideband filter only
/// w_l ∝ c_l·(A_0·A_l + ½·Σ_{0<i<l} A_i·A_{l−i}) survives.
std::vector<double> dechirp_weights(const RadarConfig& cfg);

/// De-chirp frequency interval [l·k·τ_min, l·k·τ_max] per harmonic, index l-1.
std::vector<std::pair<double, double>> dechirp_tone_intervals(const RadarConfig& cfg);

DechirpedRecord dechirp_synthesize(const Scene& scene, const RadarConfig& cfg, int pulse_index);

/// Waveform-level reference path; only practical on scaled-down parameters.
/// `waveform_rate` is the simulation rate of the RF/optical chain.
DechirpedRecord dechirp_waveform_oracle(const Scene& scene, const RadarConfig& cfg, int pulse_index,
                                        double waveform_rate);

/// Split frequencies of the complementary subband filter bank (L+1 values).
std::vector<double> subband_split_points(const RadarConfig& cfg);

/// Taps of the band-pass filter for harmonic l (odd length, complex).
cvec subband_filter(const RadarConfig& cfg, int l);

DechirpedRecord subband_extract(const DechirpedRecord& rec, int l, const RadarConfig& cfg);

/// FFT range profile of an l-subband slice, positive de-chirp frequencies
/// only. Magnitudes are divided by the window sum, so a unit tone peaks at 1.
RangeProfile range_profile(const DechirpedRecord& rec, int l, const RadarConfig& cfg,
                           dsp::Window window = dsp::Window::hann, bool peak_normalize = false);

struct Peak {
  double range = 0.0;
  double magnitude = 0.0;
};

/// Local maxima at least `floor_db` below the global maximum are ignored;
/// neighbours whose valley is not `min_separation_db` below the smaller of the
/// two are merged into the larger. Sorted by range.
std::vector<Peak> resolve_peaks(const RangeProfile& profile, double min_separation_db = 3.0,
                                double floor_db = 10.0);

/// Sub-profile with r_min <= range <= r_max.
RangeProfile crop(const RangeProfile& profile, double r_min, double r_max);

/// Width of the mainlobe around the global maximum at `level_db` below it,
/// with linear interpolation between grid points.
double mainlobe_width(const RangeProfile& profile, double level_db = 3.0);

/// Peak sidelobe level in dB relative to the mainlobe (first nulls bound the mainlobe).
double peak_sidelobe_db(const RangeProfile& profile);

}  // namespace pmr
