#pragma once

// Gapped multiband fusion: de-chirp slices become samples of the target
// response H(f) = Σ a_i·exp(−j2πfτ_i) on a common frequency grid, gaps are
// filled from an all-pole (matrix pencil + variable projection) model.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pmr/dsp.hpp"
#include "pmr/receiver.hpp"
#include "pmr/scene.hpp"

namespace pmr {

struct BandSegment {
  int order = 0;
  double f_start = 0.0;  // Hz, frequency of values[0]
  double delta_f = 0.0;  // Hz
  cvec values;

  double freq(std::size_t i) const { return f_start + static_cast<double>(i) * delta_f; }
  std::vector<double> freqs() const;
};

struct GappedSpectrum {
  double f_min = 0.0;
  double delta_f = 0.0;
  cvec values;                       // zero in gaps
  std::vector<std::uint8_t> mask;    // 1 = measured
  double occupied_bandwidth = 0.0;   // Σ member band widths, Hz

  std::size_t size() const { return values.size(); }
  double freq(std::size_t i) const { return f_min + static_cast<double>(i) * delta_f; }
  double f_max() const { return freq(size() - 1); }
  double span() const { return f_max() - f_min; }
  /// Occupied bandwidth over total span.
  double occupancy() const { return occupied_bandwidth / span(); }
  std::size_t occupied_bins() const;
  /// [begin, end) of the longest run of measured bins.
  std::pair<std::size_t, std::size_t> longest_run() const;
};

struct PoleModel {
  std::vector<double> delays;  // s, ascending
  cvec amplitudes;
  int order = 0;
  double fit_residual = 0.0;   // ||x − model|| / ||x|| over measured bins
  bool degraded = false;       // refinement could not improve on its start
  int iterations = 0;
  std::vector<double> residual_history;  // one entry per accepted step, starting with init

  cplx evaluate(double f) const;
};

/// Stretch-processing duality: sample t of an l-slice sits at RF frequency
/// l·(f_Ω + k·t). Removes the residual video phase, resamples onto
/// l·f_Ω + j·Δf and divides out the de-chirp weight.
BandSegment to_band_segment(const DechirpedRecord& slice, int l, const RadarConfig& cfg, double delta_f);

GappedSpectrum assemble_gapped(std::span<const BandSegment> segments);

/// Inverse DFT of the zero-filled spectrum. `hann` tapers each band
/// separately, `rect` leaves the span unweighted. A unit scatterer peaks at 1.
RangeProfile fuse_direct(const GappedSpectrum& g, dsp::Window window);

struct PoleOptions {
  int max_order = 8;
  double sv_threshold = 1e-3;
  double tau_min = 0.0;  // delay window used to unwrap pole angles, s
  double tau_max = 0.0;
  double max_condition = 1e12;
  /// 0 = use every sample of the run. Otherwise the run is decimated so the
  /// pencil sees at most this many samples (same aperture, coarser step).
  std::size_t max_pencil_samples = 0;
};

PoleOptions pole_options(const RadarConfig& cfg);

/// Matrix pencil on one segment (gapless).
PoleModel estimate_poles(const BandSegment& segment, const PoleOptions& opt);
/// Matrix pencil on the longest measured run; amplitudes fitted to all measured bins.
PoleModel estimate_poles(const GappedSpectrum& g, const PoleOptions& opt);

/// Least-squares amplitudes for fixed delays against all measured bins.
PoleModel fit_amplitudes(const GappedSpectrum& g, std::vector<double> delays, double max_condition = 1e12);

struct RefineOptions {
  int max_iters = 50;
  double rel_tol = 1e-8;
  int max_rejections = 5;
};

/// Variable-projection Levenberg–Marquardt over the delays.
PoleModel refine_global(const GappedSpectrum& g, const PoleModel& init, const RefineOptions& opt = {});

/// Measured bins kept, gaps filled from the model, full-span window.
RangeProfile gap_fill_profile(const GappedSpectrum& g, const PoleModel& model, dsp::Window window,
                              double residual_gate = 0.1);

/// Full-span profile of an arbitrary (gapless) spectrum on the grid of g.
RangeProfile spectrum_profile(const GappedSpectrum& g, std::span<const cplx> full_values, dsp::Window window,
                              const std::string& label);

/// Closed-form H(f) of a set of echoes.
cplx closed_form_response(std::span<const Echo> echoes, double f);

struct AlignmentReport {
  cplx constant;                   // single least-squares scalar, segments ≈ constant·H
  double relative_error = 0.0;     // over all bands
  std::vector<double> band_errors; // per band, same constant
};

/// Fits one complex constant between all segments and the closed-form response.
AlignmentReport align_to_truth(std::span<const BandSegment> segments, std::span<const Echo> truth);

/// Negative control: rotates each segment by an independent uniform random phase.
std::vector<BandSegment> inject_band_phase_errors(std::span<const BandSegment> segments, std::uint64_t seed);

/// Full chain for one pulse: extract every subband, convert and assemble.
GappedSpectrum pulse_spectrum(const DechirpedRecord& composite, const RadarConfig& cfg, double delta_f);

}  // namespace pmr
