#pragma once

// MZM + photodetector harmonic generation. The chain is modelled at
// intensity level, I(t) = 1 + cos(θ + m·s(t)); Jacobi–Anger expansion of
// that transfer gives the harmonic amplitudes in closed form.

#include <optional>
#include <string>
#include <vector>

#include "pmr/waveform.hpp"

namespace pmr {

struct MzmParams {
  double modulation_index = 6.04; // m, rad
  double bias_angle = 1.95;       // θ, rad in [0, 2π)
  double carrier_freq = 193.4e12; // Hz, informational only
  double pm_index = 0.01;         // β, rad per unit echo amplitude (receive oracle)

  void validate() const;
};

/// Fourier coefficients of the photocurrent, I(t) = Σ_l sign_l·B_l·cos(lφ).
struct HarmonicSpectrum {
  std::vector<double> amplitudes;  // B_0..B_L, all >= 0
  std::vector<int> signs;          // ±1 per order; the Bessel sign flag
  int l_max = 0;
  double floor_db = 60.0;

  double signed_coefficient(int l) const { return signs.at(l) * amplitudes.at(l); }
  /// True when B_l is more than `floor_db` below the largest B_l (l >= 1).
  bool negligible(int l) const;
};

HarmonicSpectrum harmonic_amplitudes(const MzmParams& mzm, int l_max, double floor_db = 60.0);

/// Signed field amplitudes A_0..A_imax of the optical sidebands leaving the
/// push-pull MZM, E(t) = cos((θ + m·s)/2) = Σ_i A_i cos(iφ). Only the receive
/// oracle and the de-chirp weights need them.
std::vector<double> optical_sideband_amplitudes(const MzmParams& mzm, int i_max);

/// Pointwise exact transfer I[n] = 1 + cos(θ + m·drive[n]).
SampledSignal mzm_pd_oracle(const SampledSignal& drive, const MzmParams& mzm);

/// Message when harmonic l_max of a drive reaching f_max aliases at the given
/// sample rate; empty otherwise.
std::optional<std::string> harmonic_aliasing_warning(double sample_rate, double f_max, int l_max);

struct Subband {
  int order = 0;
  double f_low = 0.0;
  double f_high = 0.0;
  double bandwidth = 0.0;
};

struct SubbandPlan {
  std::vector<Subband> bands;
  double total_span = 0.0;                  // f_high(L) − f_low(1)
  std::vector<std::pair<int, int>> overlaps;  // pairs of orders that collide

  bool disjoint() const { return overlaps.empty(); }
};

SubbandPlan subband_plan(const LfmParams& lfm, int l_max);

}  // namespace pmr
