#include "pmr/scene.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"

namespace pmr {
namespace {

double mean_power(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double mean_power(std::span<const cplx> x) {
  double acc = 0.0;
  for (const cplx& v : x) acc += std::norm(v);
  return acc / static_cast<double>(x.size());
}

}  // namespace

double PointScatterer::range() const { return std::hypot(x, y); }

PointScatterer RotatingPlatform::position(std::size_t i, double t_slow) const {
  const double a = angles.at(i) + angular_rate * t_slow;
  return {center_range + radius * std::cos(a), radius * std::sin(a), reflectivities.at(i)};
}

void Scene::validate() const {
  if (noise_snr_db && std::isnan(*noise_snr_db)) throw Error("scene", "noise_snr_db is NaN");
  if (const auto* pts = std::get_if<std::vector<PointScatterer>>(&targets)) {
    if (pts->empty()) throw Error("scene", "scene needs at least one scatterer");
    for (const auto& p : *pts) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("scene", "scatterer position must be finite");
      if (!std::isfinite(p.reflectivity) || p.reflectivity < 0.0)
        throw Error("scene", "reflectivity must be finite and >= 0");
      if (!(p.range() > 0.0)) throw Error("scene", "scatterer range must be > 0");
    }
    return;
  }
  const auto& pf = std::get<RotatingPlatform>(targets);
  if (pf.angles.empty()) throw Error("scene", "scene needs at least one scatterer");
  if (pf.angles.size() != pf.reflectivities.size())
    throw Error("scene", "platform angles and reflectivities differ in length");
  if (!std::isfinite(pf.radius) || pf.radius < 0.0) throw Error("scene", "platform radius must be >= 0");
  if (!std::isfinite(pf.center_range) || pf.center_range <= pf.radius)
    throw Error("scene", "platform must lie entirely in front of the radar");
  if (!std::isfinite(pf.angular_rate)) throw Error("scene", "angular_rate must be finite");
  for (double r : pf.reflectivities)
    if (!std::isfinite(r) || r < 0.0) throw Error("scene", "reflectivity must be finite and >= 0");
}

std::size_t Scene::scatterer_count() const {
  if (const auto* pts = std::get_if<std::vector<PointScatterer>>(&targets)) return pts->size();
  return std::get<RotatingPlatform>(targets).angles.size();
}

std::vector<PointScatterer> positions_at(const Scene& scene, double t_slow) {
  if (const auto* pts = std::get_if<std::vector<PointScatterer>>(&scene.targets)) return *pts;
  const auto& pf = std::get<RotatingPlatform>(scene.targets);
  std::vector<PointScatterer> out;
  out.reserve(pf.angles.size());
  for (std::size_t i = 0; i < pf.angles.size(); ++i) out.push_back(pf.position(i, t_slow));
  return out;
}

std::vector<Echo> scatterers_at(const Scene& scene, double t_slow) {
  if (t_slow < 0.0) throw Error("scene", "t_slow must be >= 0");
  std::vector<Echo> echoes;
  if (const auto* pts = std::get_if<std::vector<PointScatterer>>(&scene.targets)) {
    for (const auto& p : *pts) {
      const double r = p.range();
      const double amp = scene.inverse_square_law ? p.reflectivity / (r * r) : p.reflectivity;
      echoes.push_back({range_to_delay(r), amp});
    }
    return echoes;
  }
  const auto& pf = std::get<RotatingPlatform>(scene.targets);
  const double r0 = pf.center_range;
  for (std::size_t i = 0; i < pf.angles.size(); ++i) {
    const double a = pf.angles[i] + pf.angular_rate * t_slow;
    const double r =
        std::sqrt(r0 * r0 + pf.radius * pf.radius + 2.0 * r0 * pf.radius * std::cos(a));
    const double amp = scene.inverse_square_law ? pf.reflectivities[i] / (r * r) : pf.reflectivities[i];
    echoes.push_back({range_to_delay(r), amp});
  }
  return echoes;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SampledSignal add_noise(const SampledSignal& signal, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return signal;
  if (signal.samples.empty()) throw Error("scene", "cannot add noise to an empty signal");
  const double p = mean_power(signal.samples);
  if (!(p > 0.0)) throw Error("scene", "cannot set SNR on a zero-power signal");
  const double sigma = std::sqrt(p / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  SampledSignal out = signal;
  for (double& v : out.samples) v += gauss(rng);
  return out;
}

cvec add_noise(std::span<const cplx> signal, double snr_db, std::uint64_t seed) {
  cvec out(signal.begin(), signal.end());
  if (std::isinf(snr_db) && snr_db > 0) return out;
  if (signal.empty()) throw Error("scene", "cannot add noise to an empty signal");
  const double p = mean_power(signal);
  if (!(p > 0.0)) throw Error("scene", "cannot set SNR on a zero-power signal");
  const double sigma = std::sqrt(0.5 * p / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (cplx& v : out) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v += cplx(re, im);
  }
  return out;
}

Scene two_target_scene(double center_range, double separation) {
  Scene s;
  s.targets = std::vector<PointScatterer>{{center_range - 0.5 * separation, 0.0, 1.0},
                                          {center_range + 0.5 * separation, 0.0, 1.0}};
  return s;
}

}  // namespace pmr
