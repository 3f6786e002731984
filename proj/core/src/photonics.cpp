#include "pmr/photonics.hpp"

#include <algorithm>
#include <cmath>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"

namespace pmr {
namespace {

// cos(θ + m·cos φ) = cos θ·cos(m cos φ) − sin θ·sin(m cos φ), with
//   cos(m cos φ) = J0(m) + 2 Σ_{n≥1} (−1)^n J_2n(m) cos(2nφ)
//   sin(m cos φ) = 2 Σ_{n≥0} (−1)^n J_{2n+1}(m) cos((2n+1)φ)
// Returns the coefficient of cos(lφ) for l >= 1.
double jacobi_anger_coefficient(int l, double m, double theta) {
  const double j = std::cyl_bessel_j(static_cast<double>(l), m);
  const int n = l / 2;
  const double alt = (n % 2 == 0) ? 1.0 : -1.0;
  if (l % 2 == 0) return 2.0 * alt * j * std::cos(theta);
  return -2.0 * alt * j * std::sin(theta);
}

}  // namespace

void MzmParams::validate() const {
  if (!std::isfinite(modulation_index) || modulation_index < 0.0)
    throw Error("photonics", "modulation_index must be finite and >= 0");
  if (!std::isfinite(bias_angle) || bias_angle < 0.0 || bias_angle >= kTwoPi)
    throw Error("photonics", "bias_angle must lie in [0, 2π)");
  if (!std::isfinite(pm_index) || pm_index <= 0.0)
    throw Error("photonics", "pm_index must be finite and > 0");
  if (!std::isfinite(carrier_freq) || carrier_freq <= 0.0)
    throw Error("photonics", "carrier_freq must be finite and > 0");
}

bool HarmonicSpectrum::negligible(int l) const {
  double peak = 0.0;
  for (std::size_t i = 1; i < amplitudes.size(); ++i) peak = std::max(peak, amplitudes[i]);
  if (peak == 0.0) return true;
  return amplitudes.at(l) < peak * std::pow(10.0, -floor_db / 20.0);
}

HarmonicSpectrum harmonic_amplitudes(const MzmParams& mzm, int l_max, double floor_db) {
  if (l_max < 1) throw Error("photonics", "l_max must be >= 1");
  mzm.validate();
  HarmonicSpectrum h;
  h.l_max = l_max;
  h.floor_db = floor_db;
  h.amplitudes.resize(static_cast<std::size_t>(l_max) + 1);
  h.signs.resize(static_cast<std::size_t>(l_max) + 1);

  const double dc = 1.0 + std::cos(mzm.bias_angle) * std::cyl_bessel_j(0.0, mzm.modulation_index);
  h.amplitudes[0] = std::abs(dc);
  h.signs[0] = dc < 0.0 ? -1 : 1;
  for (int l = 1; l <= l_max; ++l) {
    const double c = jacobi_anger_coefficient(l, mzm.modulation_index, mzm.bias_angle);
    h.amplitudes[static_cast<std::size_t>(l)] = std::abs(c);
    h.signs[static_cast<std::size_t>(l)] = c < 0.0 ? -1 : 1;
  }
  return h;
}

std::vector<double> optical_sideband_amplitudes(const MzmParams& mzm, int i_max) {
  // cos(θ/2 + (m/2)·cos φ): same expansion at half the index and half the bias.
  std::vector<double> a(static_cast<std::size_t>(std::max(i_max, 0)) + 1);
  const double half_m = 0.5 * mzm.modulation_index;
  const double half_theta = 0.5 * mzm.bias_angle;
  a[0] = std::cos(half_theta) * std::cyl_bessel_j(0.0, half_m);
  for (int i = 1; i <= i_max; ++i)
    a[static_cast<std::size_t>(i)] = jacobi_anger_coefficient(i, half_m, half_theta);
  return a;
}

SampledSignal mzm_pd_oracle(const SampledSignal& drive, const MzmParams& mzm) {
  drive.validate();
  mzm.validate();
  SampledSignal out;
  out.sample_rate = drive.sample_rate;
  out.start_time = drive.start_time;
  out.samples.resize(drive.samples.size());
  std::transform(drive.samples.begin(), drive.samples.end(), out.samples.begin(), [&](double s) {
    return 1.0 + std::cos(mzm.bias_angle + mzm.modulation_index * s);
  });
  return out;
}

std::optional<std::string> harmonic_aliasing_warning(double sample_rate, double f_max, int l_max) {
  const double top = static_cast<double>(l_max) * f_max;
  if (top <= 0.5 * sample_rate) return std::nullopt;
  return "harmonic " + std::to_string(l_max) + " reaches " + std::to_string(top) +
         " Hz, above the Nyquist frequency " + std::to_string(0.5 * sample_rate) + " Hz";
}

SubbandPlan subband_plan(const LfmParams& lfm, int l_max) {
  if (l_max < 1) throw Error("photonics", "l_max must be >= 1");
  lfm.validate(false);
  SubbandPlan plan;
  for (int l = 1; l <= l_max; ++l) {
    const double dl = static_cast<double>(l);
    plan.bands.push_back({l, dl * lfm.f_start, dl * lfm.f_stop(), dl * lfm.bandwidth});
  }
  for (std::size_t i = 0; i < plan.bands.size(); ++i) {
    for (std::size_t j = i + 1; j < plan.bands.size(); ++j) {
      if (plan.bands[i].f_high >= plan.bands[j].f_low)
        plan.overlaps.emplace_back(plan.bands[i].order, plan.bands[j].order);
    }
  }
  plan.total_span = plan.bands.back().f_high - plan.bands.front().f_low;
  return plan;
}

}  // namespace pmr
