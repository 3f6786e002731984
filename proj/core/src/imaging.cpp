#include "pmr/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"

namespace pmr {

ImagingMode ImagingMode::parse(std::string_view text) {
  ImagingMode m;
  if (text == "fused-direct") {
    m.kind = Kind::fused_direct;
  } else if (text == "fused-allpole") {
    m.kind = Kind::fused_allpole;
  } else if (text.rfind("subband:", 0) == 0) {
    m.kind = Kind::subband;
    const std::string digits(text.substr(8));
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error("imaging", "bad subband mode '" + std::string(text) + "', expected subband:L");
    m.order = std::stoi(digits);
    if (m.order < 1) throw Error("imaging", "subband order must be >= 1");
  } else {
    throw Error("imaging", "unknown mode '" + std::string(text) + "' (subband:L, fused-direct, fused-allpole)");
  }
  return m;
}

std::string ImagingMode::to_string() const {
  switch (kind) {
    case Kind::subband: return "subband:" + std::to_string(order);
    case Kind::fused_direct: return "fused-direct";
    case Kind::fused_allpole: return "fused-allpole";
  }
  return {};
}

double IsarImage::total_energy() const { return std::accumulate(intensity.begin(), intensity.end(), 0.0); }

double mode_center_frequency(const ImagingMode& mode, const RadarConfig& cfg) {
  if (mode.kind == ImagingMode::Kind::subband) return mode.order * (cfg.lfm.f_start + 0.5 * cfg.lfm.bandwidth);
  return 0.5 * (cfg.lfm.f_start + cfg.l_max * cfg.lfm.f_stop());
}

DataMatrix collect_cpi(const Scene& scene, const RadarConfig& cfg, int n_pulses, const ImagingMode& mode,
                       const FusionSettings& fusion) {
  if (n_pulses < 2) throw Error("imaging", "a CPI needs at least 2 pulses");
  if (mode.kind == ImagingMode::Kind::subband && (mode.order < 1 || mode.order > cfg.l_max))
    throw Error("imaging", "subband order outside 1..l_max");
  PoleOptions popt = fusion.poles;
  if (!(popt.tau_max > popt.tau_min)) {
    popt.tau_min = cfg.tau_min();
    popt.tau_max = cfg.tau_max();
  }
  DataMatrix dm;
  dm.mode = mode;
  dm.sample_rate = cfg.dechirp_sample_rate;
  for (int p = 0; p < n_pulses; ++p) {
    try {
      const DechirpedRecord rec = dechirp_synthesize(scene, cfg, p);
      dm.t_slow.push_back(rec.t_slow);
      if (mode.kind == ImagingMode::Kind::subband) {
        dm.rows.push_back(subband_extract(rec, mode.order, cfg).samples);
        continue;
      }
      const GappedSpectrum g = pulse_spectrum(rec, cfg, fusion.delta_f);
      dm.f_min = g.f_min;
      dm.delta_f = g.delta_f;
      dm.mask = g.mask;
      if (mode.kind == ImagingMode::Kind::fused_direct) {
        dm.rows.push_back(g.values);
        continue;
      }
      const PoleModel init = estimate_poles(g, popt);
      if (init.order == 0) throw Error("fusion", "no poles found");
      const PoleModel model = refine_global(g, init, fusion.refine);
      if (!(model.fit_residual <= fusion.residual_gate)) {
        std::ostringstream os;
        os << "pole model residual " << model.fit_residual << " exceeds the gate " << fusion.residual_gate;
        throw Error("fusion", os.str());
      }
      cvec row(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) row[i] = g.mask[i] ? g.values[i] : model.evaluate(g.freq(i));
      dm.rows.push_back(std::move(row));
    } catch (const Error& e) {
      throw Error(e.module(), "pulse " + std::to_string(p) + ": " + std::string(e.what()));
    }
  }
  return dm;
}

IsarImage isar_image(const DataMatrix& dm, const RadarConfig& cfg, const IsarOptions& opt) {
  if (dm.rows.empty() || dm.columns() == 0) throw Error("imaging", "empty data matrix");
  if (opt.angular_rate == 0.0 || !std::isfinite(opt.angular_rate))
    throw Error("imaging", "cross-range mapping needs a nonzero rotation rate");
  if (opt.doppler_pad < 1) throw Error("imaging", "doppler_pad must be >= 1");
  for (const cvec& r : dm.rows)
    if (r.size() != dm.columns()) throw Error("imaging", "data matrix is not rectangular");
  for (std::size_t i = 1; i < dm.t_slow.size(); ++i)
    if (!(dm.t_slow[i] > dm.t_slow[i - 1])) throw Error("imaging", "data matrix rows are not time-ordered");

  const std::size_t ncol = dm.columns();
  const bool subband = dm.mode.kind == ImagingMode::Kind::subband;
  const std::size_t nfft = dsp::next_pow2(16 * ncol);
  const std::vector<double> wr = dsp::make_window(opt.range_window, ncol);
  const double wr_sum = std::accumulate(wr.begin(), wr.end(), 0.0);

  // Range axis of the compressed rows, in the order they are stored.
  std::vector<double> ranges(nfft);
  std::vector<std::size_t> bin(nfft);
  for (std::size_t i = 0; i < nfft; ++i) {
    if (subband) {
      // fftshift so that signed de-chirp frequency increases.
      const std::size_t b = (i + nfft / 2) % nfft;
      const double fd = (static_cast<double>(i) - static_cast<double>(nfft / 2)) * dm.sample_rate /
                        static_cast<double>(nfft);
      bin[i] = b;
      ranges[i] = kSpeedOfLight * fd / (2.0 * dm.mode.order * cfg.lfm.chirp_rate);
    } else {
      bin[i] = i;
      ranges[i] = delay_to_range(static_cast<double>(i) / (static_cast<double>(nfft) * dm.delta_f));
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < nfft; ++i)
    if (!opt.crop_to_range_window || (ranges[i] >= cfg.range_min && ranges[i] <= cfg.range_max)) keep.push_back(i);
  if (keep.empty()) throw Error("imaging", "range window contains no image rows");

  const std::size_t np = dm.pulses();
  const double range_scale = opt.unitary ? (subband ? 1.0 / std::sqrt(static_cast<double>(nfft))
                                                    : std::sqrt(static_cast<double>(nfft)))
                                         : (subband ? 1.0 / wr_sum : static_cast<double>(nfft) / wr_sum);
  std::vector<cvec> compressed(np, cvec(keep.size()));
  for (std::size_t p = 0; p < np; ++p) {
    cvec x(ncol);
    for (std::size_t i = 0; i < ncol; ++i) x[i] = dm.rows[p][i] * wr[i];
    const cvec y = subband ? dsp::fft(x, nfft) : dsp::ifft(x, nfft);
    for (std::size_t k = 0; k < keep.size(); ++k) compressed[p][k] = y[bin[keep[k]]] * range_scale;
  }

  const std::size_t nd = np * static_cast<std::size_t>(opt.doppler_pad);
  const std::vector<double> wd = dsp::make_window(opt.doppler_window, np);
  const double wd_sum = std::accumulate(wd.begin(), wd.end(), 0.0);
  const double dop_scale = opt.unitary ? 1.0 / std::sqrt(static_cast<double>(nd)) : 1.0 / wd_sum;
  const double lambda = kSpeedOfLight / mode_center_frequency(dm.mode, cfg);
  // De-chirp slices carry exp(+j2πfτ), spectra exp(−j2πfτ): opposite Doppler sign.
  const double sign = subband ? -1.0 : 1.0;

  IsarImage img;
  for (std::size_t k : keep) img.range_axis.push_back(ranges[k]);
  std::vector<double> cross(nd);
  for (std::size_t i = 0; i < nd; ++i) {
    const double fdop = (static_cast<double>(i) - static_cast<double>(nd / 2)) * cfg.prf / static_cast<double>(nd);
    cross[i] = sign * fdop * lambda / (2.0 * opt.angular_rate);
  }
  // Column order that makes the cross-range axis increasing.
  std::vector<std::size_t> order(nd);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cross[a] < cross[b]; });
  for (std::size_t c : order) img.crossrange_axis.push_back(cross[c]);

  img.intensity.assign(keep.size() * nd, 0.0);
  cvec slow(np);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    for (std::size_t p = 0; p < np; ++p) slow[p] = compressed[p][k] * wd[p];
    const cvec d = dsp::fft(slow, nd);
    for (std::size_t c = 0; c < nd; ++c) {
      const std::size_t src = (order[c] + nd - nd / 2) % nd;  // undo fftshift
      img.intensity[k * nd + c] = std::norm(d[src] * dop_scale);
    }
  }
  return img;
}

std::vector<Blob> resolve_blobs(const IsarImage& image, double min_separation_db, double floor_db) {
  const std::size_t nr = image.rows(), nc = image.cols();
  if (nr == 0 || nc == 0) return {};
  const double top = *std::max_element(image.intensity.begin(), image.intensity.end());
  if (!(top > 0.0)) return {};
  const double floor = top * std::pow(10.0, -floor_db / 10.0);

  struct Cand {
    std::size_t r, c;
    double v;
  };
  std::vector<Cand> cand;
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < nc; ++c) {
      const double v = image.at(r, c);
      if (v < floor) continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const long rr = static_cast<long>(r) + dr, cc = static_cast<long>(c) + dc;
          if (rr < 0 || cc < 0 || rr >= static_cast<long>(nr) || cc >= static_cast<long>(nc)) continue;
          const double u = image.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
          // Earlier neighbours must be strictly lower so a plateau yields one maximum.
          const bool earlier = dr < 0 || (dr == 0 && dc < 0);
          if (earlier ? u >= v : u > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) cand.push_back({r, c, v});
    }
  }
  std::sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });
  if (cand.size() > 256) cand.resize(256);

  std::vector<std::size_t> parent(cand.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const double ratio = std::pow(10.0, -min_separation_db / 10.0);
  for (std::size_t a = 0; a < cand.size(); ++a) {
    for (std::size_t b = a + 1; b < cand.size(); ++b) {
      const double dr = static_cast<double>(cand[b].r) - static_cast<double>(cand[a].r);
      const double dc = static_cast<double>(cand[b].c) - static_cast<double>(cand[a].c);
      const int steps = static_cast<int>(2.0 * std::max(std::abs(dr), std::abs(dc))) + 1;
      double valley = std::min(cand[a].v, cand[b].v);
      for (int s = 1; s < steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        const auto r = static_cast<std::size_t>(std::lround(static_cast<double>(cand[a].r) + t * dr));
        const auto c = static_cast<std::size_t>(std::lround(static_cast<double>(cand[a].c) + t * dc));
        valley = std::min(valley, image.at(r, c));
      }
      if (valley > std::min(cand[a].v, cand[b].v) * ratio) {
        const std::size_t ra = find(a), rb = find(b);
        parent[std::max(ra, rb)] = std::min(ra, rb);  // root stays the strongest member
      }
    }
  }
  std::vector<Blob> blobs;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (find(i) != i) continue;
    blobs.push_back({image.range_axis[cand[i].r], image.crossrange_axis[cand[i].c], cand[i].v});
  }
  std::sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) {
    return a.range != b.range ? a.range < b.range : a.crossrange < b.crossrange;
  });
  return blobs;
}

}  // namespace pmr
