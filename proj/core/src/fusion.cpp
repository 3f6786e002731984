#include "pmr/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"
#include "pmr/linear_prediction.hpp"

namespace pmr {
namespace {

constexpr std::size_t kPredictionOrder = 80;
constexpr std::size_t kEdgePad = 128;

RangeProfile delay_profile(const GappedSpectrum& g, const cvec& weighted, double weight_sum,
                           const std::string& label) {
  const std::size_t nfft = dsp::next_pow2(16 * g.size());
  const cvec x = dsp::ifft(weighted, nfft);
  RangeProfile p;
  p.band_label = label;
  p.ranges.resize(nfft);
  p.magnitudes.resize(nfft);
  const double scale = static_cast<double>(nfft) / weight_sum;
  for (std::size_t i = 0; i < nfft; ++i) {
    p.ranges[i] = delay_to_range(static_cast<double>(i) / (static_cast<double>(nfft) * g.delta_f));
    p.magnitudes[i] = std::abs(x[i]) * scale;
  }
  return p;
}

}  // namespace

std::vector<double> BandSegment::freqs() const {
  std::vector<double> f(values.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = freq(i);
  return f;
}

std::size_t GappedSpectrum::occupied_bins() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::pair<std::size_t, std::size_t> GappedSpectrum::longest_run() const {
  std::size_t best_b = 0, best_e = 0;
  std::size_t i = 0;
  while (i < mask.size()) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < mask.size() && mask[j]) ++j;
    if (j - i > best_e - best_b) {
      best_b = i;
      best_e = j;
    }
    i = j;
  }
  return {best_b, best_e};
}

BandSegment to_band_segment(const DechirpedRecord& slice, int l, const RadarConfig& cfg, double delta_f) {
  if (l < 1 || l > cfg.l_max) throw Error("fusion", "harmonic order outside 1..l_max");
  if (slice.samples.empty()) throw Error("fusion", "empty de-chirp slice");
  const double fs = slice.sample_rate;
  const double k = cfg.lfm.chirp_rate;
  const double native = l * k / fs;
  if (!(delta_f > 0.0) || delta_f < native * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "delta_f " << delta_f << " Hz is finer than the native spacing l*k/fs = " << native
       << " Hz of harmonic " << l;
    throw Error("fusion", os.str());
  }
  const double w = dechirp_weights(cfg)[static_cast<std::size_t>(l)];
  if (w == 0.0) throw Error("fusion", "harmonic " + std::to_string(l) + " carries no power");

  cvec ext = extend_by_prediction(slice.samples, kPredictionOrder, kEdgePad);
  cvec spec = dsp::fft(ext);
  const std::size_t m = spec.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double fd = (i <= m / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(m)) *
                      fs / static_cast<double>(m);
    spec[i] *= std::polar(1.0, kPi * fd * fd / (l * k));
  }
  ext = dsp::ifft(spec);

  BandSegment seg;
  seg.order = l;
  seg.delta_f = delta_f;
  seg.f_start = l * cfg.lfm.f_start;
  const auto count = static_cast<std::size_t>(std::floor(l * cfg.lfm.bandwidth / delta_f + 1e-9)) + 1;
  std::vector<double> pos(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = (seg.freq(j) / l - cfg.lfm.f_start) / k;
    pos[j] = t * fs + static_cast<double>(kEdgePad);
  }
  seg.values = dsp::sinc_interpolate(ext, pos);
  for (cplx& v : seg.values) v = std::conj(v) / w;
  return seg;
}

GappedSpectrum assemble_gapped(std::span<const BandSegment> segments) {
  if (segments.empty()) throw Error("fusion", "no band segments to assemble");
  const double df = segments.front().delta_f;
  double f_lo = segments.front().f_start;
  double f_hi = segments.front().freq(segments.front().values.size() - 1);
  for (const BandSegment& s : segments) {
    if (s.values.empty()) throw Error("fusion", "empty band segment");
    if (std::abs(s.delta_f - df) > 1e-9 * df) throw Error("fusion", "band segments differ in delta_f");
    f_lo = std::min(f_lo, s.f_start);
    f_hi = std::max(f_hi, s.freq(s.values.size() - 1));
  }
  GappedSpectrum g;
  g.f_min = f_lo;
  g.delta_f = df;
  const auto n = static_cast<std::size_t>(std::llround((f_hi - f_lo) / df)) + 1;
  g.values.assign(n, cplx{});
  g.mask.assign(n, 0);
  for (const BandSegment& s : segments) {
    const double offset = (s.f_start - f_lo) / df;
    const auto first = static_cast<std::size_t>(std::llround(offset));
    if (std::abs(offset - static_cast<double>(first)) > 1e-6)
      throw Error("fusion", "segment of harmonic " + std::to_string(s.order) + " is off the global grid");
    double scale = 0.0;
    for (const cplx& v : s.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const std::size_t b = first + i;
      if (g.mask[b]) {
        const double tol = 1e-6 * std::max(scale, std::abs(g.values[b]));
        if (std::abs(g.values[b] - s.values[i]) > tol)
          throw Error("fusion", "segments claim bin " + std::to_string(b) + " with conflicting values");
        continue;
      }
      g.values[b] = s.values[i];
      g.mask[b] = 1;
    }
  }
  // Occupied bandwidth as the union of member intervals.
  std::vector<std::pair<double, double>> iv;
  for (const BandSegment& s : segments) iv.emplace_back(s.f_start, s.freq(s.values.size() - 1));
  std::sort(iv.begin(), iv.end());
  double lo = iv.front().first, hi = iv.front().second;
  for (std::size_t i = 1; i < iv.size(); ++i) {
    if (iv[i].first > hi) {
      g.occupied_bandwidth += hi - lo;
      lo = iv[i].first;
    }
    hi = std::max(hi, iv[i].second);
  }
  g.occupied_bandwidth += hi - lo;
  return g;
}

RangeProfile fuse_direct(const GappedSpectrum& g, dsp::Window window) {
  if (g.occupied_bins() == 0) throw Error("fusion", "gapped spectrum has no measured bins");
  std::vector<double> w(g.size(), 0.0);
  if (window == dsp::Window::rect) {
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = g.mask[i] ? 1.0 : 0.0;
  } else {
    std::size_t i = 0;
    while (i < g.size()) {
      if (!g.mask[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < g.size() && g.mask[j]) ++j;
      const std::vector<double> band = dsp::make_window(window, j - i);
      std::copy(band.begin(), band.end(), w.begin() + static_cast<std::ptrdiff_t>(i));
      i = j;
    }
  }
  cvec x(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) x[i] = g.values[i] * w[i];
  return delay_profile(g, x, std::accumulate(w.begin(), w.end(), 0.0), "fused-direct");
}

RangeProfile spectrum_profile(const GappedSpectrum& g, std::span<const cplx> full_values, dsp::Window window,
                              const std::string& label) {
  if (full_values.size() != g.size()) throw Error("fusion", "spectrum length does not match the grid");
  const std::vector<double> w = dsp::make_window(window, g.size());
  cvec x(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) x[i] = full_values[i] * w[i];
  return delay_profile(g, x, std::accumulate(w.begin(), w.end(), 0.0), label);
}

RangeProfile gap_fill_profile(const GappedSpectrum& g, const PoleModel& model, dsp::Window window,
                              double residual_gate) {
  if (model.order == 0) throw Error("fusion", "empty pole model; use fuse_direct instead");
  if (!(model.fit_residual <= residual_gate)) {
    std::ostringstream os;
    os << "pole model residual " << model.fit_residual << " exceeds the gate " << residual_gate
       << "; fall back to fuse_direct";
    throw Error("fusion", os.str());
  }
  cvec full(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) full[i] = g.mask[i] ? g.values[i] : model.evaluate(g.freq(i));
  return spectrum_profile(g, full, window, "fused-allpole");
}

cplx closed_form_response(std::span<const Echo> echoes, double f) {
  cplx acc{};
  for (const Echo& e : echoes) acc += e.amplitude * std::polar(1.0, -kTwoPi * f * e.delay);
  return acc;
}

AlignmentReport align_to_truth(std::span<const BandSegment> segments, std::span<const Echo> truth) {
  if (segments.empty()) throw Error("fusion", "no band segments to align");
  cplx num{};
  double den = 0.0;
  std::vector<cvec> h(segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    h[s].resize(segments[s].values.size());
    for (std::size_t i = 0; i < h[s].size(); ++i) {
      h[s][i] = closed_form_response(truth, segments[s].freq(i));
      num += std::conj(h[s][i]) * segments[s].values[i];
      den += std::norm(h[s][i]);
    }
  }
  if (den == 0.0) throw Error("fusion", "closed-form response is identically zero");
  AlignmentReport rep;
  rep.constant = num / den;
  double err_all = 0.0, ref_all = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < h[s].size(); ++i) {
      err += std::norm(segments[s].values[i] - rep.constant * h[s][i]);
      ref += std::norm(segments[s].values[i]);
    }
    rep.band_errors.push_back(ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err));
    err_all += err;
    ref_all += ref;
  }
  rep.relative_error = ref_all > 0.0 ? std::sqrt(err_all / ref_all) : std::sqrt(err_all);
  return rep;
}

std::vector<BandSegment> inject_band_phase_errors(std::span<const BandSegment> segments, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::vector<BandSegment> out(segments.begin(), segments.end());
  for (BandSegment& s : out) {
    const cplx rot = std::polar(1.0, phase(rng));
    for (cplx& v : s.values) v *= rot;
  }
  return out;
}

GappedSpectrum pulse_spectrum(const DechirpedRecord& composite, const RadarConfig& cfg, double delta_f) {
  std::vector<BandSegment> segs;
  for (int l = 1; l <= cfg.l_max; ++l)
    segs.push_back(to_band_segment(subband_extract(composite, l, cfg), l, cfg, delta_f));
  return assemble_gapped(segs);
}

}  // namespace pmr
