#pragma once

// Range-Doppler ISAR imaging of the rotating platform, per subband or on
// fused spectra.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pmr/dsp.hpp"
#include "pmr/fusion.hpp"
#include "pmr/receiver.hpp"
#include "pmr/scene.hpp"

namespace pmr {

struct ImagingMode {
  enum class Kind { subband, fused_direct, fused_allpole };
  Kind kind = Kind::fused_allpole;
  int order = 0;  // harmonic for subband mode

  static ImagingMode parse(std::string_view text);  // "subband:L", "fused-direct", "fused-allpole"
  std::string to_string() const;
  bool fused() const { return kind != Kind::subband; }
};

struct FusionSettings {
  double delta_f = 2.5e6;
  PoleOptions poles;           // delay window filled from the radar config when left empty
  RefineOptions refine;
  double residual_gate = 0.1;
};

/// One row per pulse. Subband rows hold the extracted de-chirp slice; fused
/// rows hold the spectrum on the global grid (gap-filled for fused-allpole,
/// zero-filled for fused-direct).
struct DataMatrix {
  ImagingMode mode;
  std::vector<double> t_slow;
  std::vector<cvec> rows;
  double sample_rate = 0.0;   // subband rows
  double f_min = 0.0;         // fused rows
  double delta_f = 0.0;
  std::vector<std::uint8_t> mask;

  std::size_t pulses() const { return rows.size(); }
  std::size_t columns() const { return rows.empty() ? 0 : rows.front().size(); }
};

DataMatrix collect_cpi(const Scene& scene, const RadarConfig& cfg, int n_pulses, const ImagingMode& mode,
                       const FusionSettings& fusion = {});

struct IsarOptions {
  double angular_rate = 0.0;  // rad/s, needed for the cross-range axis
  dsp::Window range_window = dsp::Window::hann;
  dsp::Window doppler_window = dsp::Window::hann;
  int doppler_pad = 4;
  bool crop_to_range_window = true;
  bool unitary = false;  // Parseval-preserving scaling, for energy checks
};

struct IsarImage {
  std::vector<double> range_axis;       // m
  std::vector<double> crossrange_axis;  // m
  std::vector<double> intensity;        // row-major [range][crossrange]

  std::size_t rows() const { return range_axis.size(); }
  std::size_t cols() const { return crossrange_axis.size(); }
  double at(std::size_t r, std::size_t c) const { return intensity[r * cols() + c]; }
  double total_energy() const;
};

IsarImage isar_image(const DataMatrix& dm, const RadarConfig& cfg, const IsarOptions& opt);

/// Wavelength used for cross-range scaling of a mode.
double mode_center_frequency(const ImagingMode& mode, const RadarConfig& cfg);

struct Blob {
  double range = 0.0;
  double crossrange = 0.0;
  double intensity = 0.0;
};

/// 2-D analogue of resolve_peaks: local maxima within `floor_db` of the
/// image maximum, merged when the straight path between two maxima never
/// drops `min_separation_db` below the weaker one. Intensity is power.
std::vector<Blob> resolve_blobs(const IsarImage& image, double min_separation_db = 3.0, double floor_db = 10.0);

}  // namespace pmr
