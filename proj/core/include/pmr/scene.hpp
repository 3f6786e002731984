#pragma once

// Ground truth: point scatterers, either static or on a rotating platform,
// plus receiver-noise settings.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pmr/dsp.hpp"
#include "pmr/waveform.hpp"

namespace pmr {

/// Radar at the origin, boresight along +x.
struct PointScatterer {
  double x = 0.0;  // m
  double y = 0.0;  // m
  double reflectivity = 1.0;

  double range() const;
};

/// Scatterers on the rim of a disc centred at (center_range, 0), rotating
/// counter-clockwise. Angle 0 points away from the radar.
struct RotatingPlatform {
  double center_range = 2.0;             // m
  double radius = 0.03;                  // m
  double angular_rate = 2.0 * 3.141592653589793;  // rad/s
  std::vector<double> angles;            // rad, at t_slow = 0
  std::vector<double> reflectivities;

  PointScatterer position(std::size_t i, double t_slow) const;
};

struct Scene {
  std::variant<std::vector<PointScatterer>, RotatingPlatform> targets;
  std::optional<double> noise_snr_db;  // none = noiseless
  std::uint64_t rng_seed = 0;
  bool inverse_square_law = false;     // scale amplitudes by 1/R²

  void validate() const;
  bool is_dynamic() const { return std::holds_alternative<RotatingPlatform>(targets); }
  std::size_t scatterer_count() const;
};

struct Echo {
  double delay = 0.0;  // s
  double amplitude = 0.0;
};

/// Stop-and-hop: one delay per scatterer, frozen for the pulse starting at t_slow.
std::vector<Echo> scatterers_at(const Scene& scene, double t_slow);

/// Scatterer positions at t_slow.
std::vector<PointScatterer> positions_at(const Scene& scene, double t_slow);

/// Adds white Gaussian noise so that 10·log10(P_signal/P_noise) = snr_db.
/// Infinite snr_db returns the input unchanged.
SampledSignal add_noise(const SampledSignal& signal, double snr_db, std::uint64_t seed);

/// Complex (circular) variant used for analytic de-chirp records.
cvec add_noise(std::span<const cplx> signal, double snr_db, std::uint64_t seed);

/// Decorrelated stream seed for one pulse (SplitMix64 of seed and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Two equal scatterers straddling `center_range` on boresight, `separation` apart.
Scene two_target_scene(double center_range, double separation);

}  // namespace pmr
