#include "pmr/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"

namespace pmr {

double RadarConfig::tau_min() const { return range_to_delay(range_min); }
double RadarConfig::tau_max() const { return range_to_delay(range_max); }

std::size_t RadarConfig::record_length() const {
  return static_cast<std::size_t>(std::floor(lfm.duration * dechirp_sample_rate * (1.0 + 1e-12)));
}

void RadarConfig::validate() const {
  lfm.validate(false);
  mzm.validate();
  if (l_max < 1) throw Error("receiver", "l_max must be >= 1");
  if (!std::isfinite(prf) || prf <= 0.0) throw Error("receiver", "prf must be finite and > 0");
  if (!std::isfinite(dechirp_sample_rate) || dechirp_sample_rate <= 0.0)
    throw Error("receiver", "dechirp_sample_rate must be finite and > 0");
  if (!std::isfinite(range_min) || !std::isfinite(range_max) || range_min <= 0.0 ||
      range_max <= range_min)
    throw Error("receiver", "range window must satisfy 0 < r_min < r_max");
  if (1.0 / prf < lfm.duration + tau_max()) {
    std::ostringstream os;
    os << "pulse repetition interval 1/prf = " << 1.0 / prf
       << " s is shorter than pulse duration plus maximum delay; lower prf";
    throw Error("receiver", os.str());
  }
  const double top_tone = l_max * lfm.chirp_rate * tau_max();
  if (dechirp_sample_rate <= 2.0 * top_tone) {
    std::ostringstream os;
    os << "dechirp_sample_rate " << dechirp_sample_rate << " Hz must exceed 2*l_max*k*tau_max = "
       << 2.0 * top_tone << " Hz; raise the rate or shrink range_window";
    throw Error("receiver", os.str());
  }
  if (record_length() < 16) throw Error("receiver", "de-chirp record shorter than 16 samples");
  const SubbandPlan plan = subband_plan(lfm, l_max);
  if (!plan.disjoint()) {
    std::ostringstream os;
    os << "harmonic RF bands overlap:";
    for (const auto& [a, b] : plan.overlaps) os << " (" << a << "," << b << ")";
    os << "; raise f_start relative to bandwidth or lower l_max";
    throw Error("receiver", os.str());
  }
  const auto iv = dechirp_tone_intervals(*this);
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
    if (iv[i].second >= iv[i + 1].first) {
      std::ostringstream os;
      os << "de-chirp tone intervals of harmonics " << i + 1 << " and " << i + 2
         << " overlap for range window [" << range_min << ", " << range_max
         << "] m; narrow the window so that r_max/r_min < (l+1)/l";
      throw Error("receiver", os.str());
    }
  }
}

RadarConfig default_radar_config() {
  RadarConfig cfg;
  cfg.lfm = paper_lfm();
  return cfg;
}

std::vector<double> dechirp_weights(const RadarConfig& cfg) {
  const HarmonicSpectrum h = harmonic_amplitudes(cfg.mzm, cfg.l_max);
  const std::vector<double> a = optical_sideband_amplitudes(cfg.mzm, cfg.l_max);
  std::vector<double> w(static_cast<std::size_t>(cfg.l_max) + 1, 0.0);
  double peak = 0.0;
  for (int l = 1; l <= cfg.l_max; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    double overlap = a[0] * a[ul];
    for (std::size_t i = 1; i < ul; ++i) overlap += 0.5 * a[i] * a[ul - i];
    w[ul] = h.signed_coefficient(l) * overlap;
    peak = std::max(peak, std::abs(w[ul]));
  }
  if (peak == 0.0) throw Error("receiver", "no harmonic carries power at this MZM operating point");
  for (double& v : w) v /= peak;
  return w;
}

std::vector<std::pair<double, double>> dechirp_tone_intervals(const RadarConfig& cfg) {
  std::vector<std::pair<double, double>> iv;
  for (int l = 1; l <= cfg.l_max; ++l)
    iv.emplace_back(l * cfg.lfm.chirp_rate * cfg.tau_min(), l * cfg.lfm.chirp_rate * cfg.tau_max());
  return iv;
}

DechirpedRecord dechirp_synthesize(const Scene& scene, const RadarConfig& cfg, int pulse_index) {
  if (pulse_index < 0) throw Error("receiver", "pulse_index must be >= 0");
  const double fs = cfg.dechirp_sample_rate;
  const double k = cfg.lfm.chirp_rate;
  const double f0 = cfg.lfm.f_start;
  DechirpedRecord rec;
  rec.sample_rate = fs;
  rec.pulse_index = pulse_index;
  rec.t_slow = pulse_index / cfg.prf;
  rec.samples.assign(cfg.record_length(), cplx{});

  const std::vector<double> w = dechirp_weights(cfg);
  const std::vector<Echo> echoes = scatterers_at(scene, rec.t_slow);
  double tau_top = 0.0;
  for (const Echo& e : echoes) {
    if (e.delay >= cfg.lfm.duration) throw Error("receiver", "echo delay exceeds the pulse duration");
    tau_top = std::max(tau_top, e.delay);
    for (int l = 1; l <= cfg.l_max; ++l) {
      const double dl = static_cast<double>(l);
      const double tone = dl * k * e.delay;
      if (tone >= 0.5 * fs) {
        std::ostringstream os;
        os << "tone of harmonic l=" << l << " for delay tau=" << e.delay << " s lies at " << tone
           << " Hz, above Nyquist " << 0.5 * fs << " Hz";
        throw Error("receiver", os.str());
      }
      const double weight = w[static_cast<std::size_t>(l)] * e.amplitude;
      if (weight == 0.0) continue;
      // Phase at t = 0 wrapped before accumulating to keep the tone exact.
      const double psi =
          std::remainder(kTwoPi * dl * f0 * e.delay - kPi * dl * k * e.delay * e.delay, kTwoPi);
      const double step = kTwoPi * tone / fs;
      for (std::size_t n = 0; n < rec.samples.size(); ++n)
        rec.samples[n] += weight * std::polar(1.0, psi + step * static_cast<double>(n));
    }
  }
  rec.valid_start = static_cast<std::size_t>(std::ceil(tau_top * fs));

  if (scene.noise_snr_db)
    rec.samples = add_noise(rec.samples, *scene.noise_snr_db,
                            derive_seed(scene.rng_seed, static_cast<std::uint64_t>(pulse_index)));
  return rec;
}

RangeProfile range_profile(const DechirpedRecord& rec, int l, const RadarConfig& cfg,
                           dsp::Window window, bool peak_normalize) {
  if (rec.samples.empty()) throw Error("receiver", "empty de-chirp record");
  if (l < 1) throw Error("receiver", "harmonic order must be >= 1");
  const std::size_t n = rec.samples.size();
  const std::vector<double> w = dsp::make_window(window, n);
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  cvec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rec.samples[i] * w[i];
  const std::size_t nfft = dsp::next_pow2(16 * n);
  const cvec spec = dsp::fft(x, nfft);

  RangeProfile p;
  p.band_label = "subband:" + std::to_string(l);
  const std::size_t half = nfft / 2;
  p.ranges.resize(half);
  p.magnitudes.resize(half);
  const double scale = kSpeedOfLight / (2.0 * l * cfg.lfm.chirp_rate);
  for (std::size_t i = 0; i < half; ++i) {
    const double f = static_cast<double>(i) * rec.sample_rate / static_cast<double>(nfft);
    p.ranges[i] = f * scale;
    p.magnitudes[i] = std::abs(spec[i]) / wsum;
  }
  if (peak_normalize) {
    const double peak = *std::max_element(p.magnitudes.begin(), p.magnitudes.end());
    if (peak > 0.0)
      for (double& m : p.magnitudes) m /= peak;
  }
  return p;
}

}  // namespace pmr
