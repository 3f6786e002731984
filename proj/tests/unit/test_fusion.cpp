#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pmr/error.hpp"
#include "pmr/fusion.hpp"
#include "synthetic.hpp"

using namespace pmr;

namespace {

Scene point(double range) {
  Scene s;
  s.targets = std::vector<PointScatterer>{{range, 0.0, 1.0}};
  return s;
}

double rel_rms(const BandSegment& seg, const std::vector<Echo>& echoes) {
  double num = 0, den = 0;
  std::vector<double> d;
  std::vector<oracle::cplx> a;
  for (const Echo& e : echoes) {
    d.push_back(e.delay);
    a.push_back(e.amplitude);
  }
  for (std::size_t i = 0; i < seg.values.size(); ++i) {
    const oracle::cplx h = oracle::response(d, a, seg.freq(i));
    num += std::norm(seg.values[i] - h);
    den += std::norm(h);
  }
  return std::sqrt(num / den);
}

// Magnitude of the rect-weighted inverse transform of the measured bins at
// range r, by direct summation.
double masked_profile(const GappedSpectrum& g, const std::vector<oracle::cplx>& full, double r) {
  oracle::cplx acc{};
  const double t = 2 * r / oracle::c0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.mask[i]) acc += full[i] * std::polar(1.0, 2 * oracle::pi * g.freq(i) * t);
  return std::abs(acc);
}

}  // namespace

TEST(Fusion, SegmentsMatchClosedFormResponse) {
  const RadarConfig cfg = default_radar_config();
  for (const Scene& s : {point(2.0), two_target_scene(2.0, 0.0085), two_target_scene(1.98, 0.06)}) {
    const DechirpedRecord rec = dechirp_synthesize(s, cfg, 0);
    const auto echoes = scatterers_at(s, 0.0);
    for (int l = 1; l <= 4; ++l) {
      const BandSegment seg = to_band_segment(subband_extract(rec, l, cfg), l, cfg, 2.5e6);
      EXPECT_NEAR(seg.f_start, l * cfg.lfm.f_start, 1e-3);
      EXPECT_EQ(seg.values.size(), static_cast<std::size_t>(l * 400 + 1));
      EXPECT_LT(rel_rms(seg, echoes), 1e-3) << "l=" << l;
    }
  }
}

TEST(Fusion, ZeroReflectivityGivesZeroSegment) {
  const RadarConfig cfg = default_radar_config();
  Scene s;
  s.targets = std::vector<PointScatterer>{{2.0, 0.0, 0.0}};
  const DechirpedRecord rec = dechirp_synthesize(s, cfg, 0);
  const BandSegment seg = to_band_segment(subband_extract(rec, 2, cfg), 2, cfg, 2.5e6);
  for (const cplx& v : seg.values) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(Fusion, TwoScatterersBeatWithPeriodOneOverDelayGap) {
  const RadarConfig cfg = default_radar_config();
  const Scene s = two_target_scene(2.0, 0.06);
  const DechirpedRecord rec = dechirp_synthesize(s, cfg, 0);
  const BandSegment seg = to_band_segment(subband_extract(rec, 3, cfg), 3, cfg, 2.5e6);
  const auto e = scatterers_at(s, 0.0);
  const double period = 1.0 / (e[1].delay - e[0].delay);  // 2.5 GHz
  for (std::size_t i = 0; i < seg.values.size(); i += 37) {
    const double f = seg.freq(i);
    const double expect = 2.0 * std::abs(std::cos(oracle::pi * f / period));
    EXPECT_NEAR(std::abs(seg.values[i]), expect, 5e-3);
  }
}

TEST(Fusion, RejectsGridFinerThanNativeSpacing) {
  const RadarConfig cfg = default_radar_config();
  const DechirpedRecord rec = dechirp_synthesize(point(2.0), cfg, 0);
  EXPECT_THROW(to_band_segment(subband_extract(rec, 4, cfg), 4, cfg, 1e6), Error);
  EXPECT_THROW(to_band_segment(rec, 5, cfg, 2.5e6), Error);
}

TEST(Fusion, PaperGridOccupancy) {
  const GappedSpectrum g = synth::gapped({synth::tau(2.0)}, {1.0});
  EXPECT_EQ(g.size(), static_cast<std::size_t>(std::llround(18.1e9 / 2.5e6)) + 1);
  EXPECT_EQ(g.occupied_bins(), 4004u);
  EXPECT_NEAR(g.occupancy(), 10e9 / 18.1e9, 1e-12);
  EXPECT_NEAR(g.span(), 18.1e9, 1e-3);
  const auto run = g.longest_run();
  EXPECT_EQ(run.second - run.first, 1601u);
}

TEST(Fusion, SingleSegmentIsGapless) {
  const auto segs = synth::segments({synth::tau(2.0)}, {1.0}, {3});
  const GappedSpectrum g = assemble_gapped(segs);
  EXPECT_EQ(g.occupied_bins(), g.size());
  EXPECT_NEAR(g.occupancy(), 1.0, 1e-12);
}

TEST(Fusion, AssemblyRejectsConflictsAndGridMismatch) {
  auto segs = synth::segments({synth::tau(2.0)}, {1.0}, {2, 2});
  EXPECT_NO_THROW(assemble_gapped(segs));
  segs[1].values[5] += 0.5;
  EXPECT_THROW(assemble_gapped(segs), Error);
  auto mixed = synth::segments({synth::tau(2.0)}, {1.0}, {1, 2});
  mixed[1].delta_f = 5e6;
  EXPECT_THROW(assemble_gapped(mixed), Error);
  auto off = synth::segments({synth::tau(2.0)}, {1.0}, {1, 2});
  off[1].f_start += 1e6;
  EXPECT_THROW(assemble_gapped(off), Error);
  EXPECT_THROW(assemble_gapped(std::vector<BandSegment>{}), Error);
}

TEST(Fusion, DirectFusionMatchesMaskedTransformOracle) {
  const double tau0 = synth::tau(2.0);
  const GappedSpectrum g = synth::gapped({tau0}, {1.0});
  const RangeProfile p = fuse_direct(g, dsp::Window::rect);
  std::vector<oracle::cplx> full(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) full[i] = oracle::response({tau0}, {1.0}, g.freq(i));
  // Oracle -3 dB width by bisection on the direct sum.
  const double top = masked_profile(g, full, 2.0);
  auto half_width = [&](double dir) {
    double a = 0.0, b = 0.004;
    for (int it = 0; it < 50; ++it) {
      const double m = 0.5 * (a + b);
      (masked_profile(g, full, 2.0 + dir * m) > top / std::sqrt(2.0) ? a : b) = m;
    }
    return a;
  };
  const double oracle_width = half_width(1) + half_width(-1);
  EXPECT_NEAR(mainlobe_width(p), oracle_width, 0.02 * oracle_width);
  const auto peaks = resolve_peaks(crop(p, 1.99, 2.01));
  ASSERT_FALSE(peaks.empty());
  EXPECT_NEAR(peaks[0].magnitude, 1.0, 1e-2);
}

TEST(Fusion, SingleBandDirectFusionMatchesSubbandProfile) {
  const RadarConfig cfg = default_radar_config();
  const DechirpedRecord rec = dechirp_synthesize(point(2.01), cfg, 0);
  const DechirpedRecord s2 = subband_extract(rec, 2, cfg);
  const BandSegment seg = to_band_segment(s2, 2, cfg, 2.5e6);
  const RangeProfile fused = crop(fuse_direct(assemble_gapped(std::vector<BandSegment>{seg}), dsp::Window::rect), 1.9, 2.1);
  const RangeProfile sub = crop(range_profile(s2, 2, cfg, dsp::Window::rect), 1.9, 2.1);
  EXPECT_NEAR(resolve_peaks(fused)[0].range, resolve_peaks(sub)[0].range, 1e-3);
  EXPECT_NEAR(mainlobe_width(fused), mainlobe_width(sub), 0.03 * mainlobe_width(sub));
  EXPECT_NEAR(mainlobe_width(sub), 0.886 * oracle::c0 / (2 * 2e9), 0.03 * 0.886 * oracle::c0 / (2 * 2e9));
}

TEST(Fusion, GapFillWithTrueModelEqualsFullBandProfile) {
  const std::vector<double> d = {synth::tau(2.0 - 0.00425), synth::tau(2.0 + 0.00425)};
  const std::vector<oracle::cplx> a = {1.0, 1.0};
  const GappedSpectrum g = synth::gapped(d, a);
  PoleModel truth = fit_amplitudes(g, d);
  const RangeProfile filled = gap_fill_profile(g, truth, dsp::Window::rect);
  std::vector<cplx> full(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) full[i] = oracle::response(d, a, g.freq(i));
  const RangeProfile ref = spectrum_profile(g, full, dsp::Window::rect, "truth");
  ASSERT_EQ(filled.magnitudes.size(), ref.magnitudes.size());
  for (std::size_t i = 0; i < ref.magnitudes.size(); ++i) EXPECT_NEAR(filled.magnitudes[i], ref.magnitudes[i], 1e-6);
  // The full-band rect profile of this pair, summed directly, decides how
  // many peaks a perfect gap fill can show.
  std::vector<double> mags;
  for (double r = 1.98; r <= 2.02; r += 2e-5) {
    oracle::cplx acc{};
    const double t = 2 * r / oracle::c0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += full[i] * std::polar(1.0, 2 * oracle::pi * g.freq(i) * t);
    mags.push_back(std::abs(acc));
  }
  EXPECT_EQ(resolve_peaks(crop(filled, 1.98, 2.02)).size(), oracle::count_resolved(mags));
}

TEST(Fusion, GapFilledSidelobesNearWindowTheory) {
  const GappedSpectrum g = synth::gapped({synth::tau(2.0)}, {1.0});
  const PoleModel m = refine_global(g, estimate_poles(g, {1, 1e-3, synth::tau(1.9), synth::tau(2.1)}));
  EXPECT_LT(peak_sidelobe_db(crop(gap_fill_profile(g, m, dsp::Window::rect), 1.9, 2.1)), -13.26 + 3.0);
  EXPECT_LT(peak_sidelobe_db(crop(gap_fill_profile(g, m, dsp::Window::hann), 1.9, 2.1)), -31.5 + 3.0);
  const double rayleigh = 0.886 * oracle::c0 / (2 * 18.1e9);
  EXPECT_NEAR(mainlobe_width(gap_fill_profile(g, m, dsp::Window::rect)), rayleigh, 0.02 * rayleigh);
}

TEST(Fusion, ResidualGateRefusesPoorModel) {
  const GappedSpectrum g = synth::gapped({synth::tau(2.0)}, {1.0});
  const PoleModel bad = fit_amplitudes(g, {synth::tau(2.0) + 50e-12});
  try {
    gap_fill_profile(g, bad, dsp::Window::rect);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("fuse_direct"), std::string::npos);
  }
  EXPECT_THROW(gap_fill_profile(g, PoleModel{}, dsp::Window::rect), Error);
}

TEST(Fusion, ResolutionImprovesWithBandwidth) {
  const RadarConfig cfg = default_radar_config();
  const DechirpedRecord rec = dechirp_synthesize(point(2.0), cfg, 0);
  std::vector<double> widths;
  for (int l = 1; l <= 4; ++l)
    widths.push_back(mainlobe_width(range_profile(subband_extract(rec, l, cfg), l, cfg, dsp::Window::rect)));
  const GappedSpectrum g = pulse_spectrum(rec, cfg, 2.5e6);
  PoleOptions opt = pole_options(cfg);
  const PoleModel m = refine_global(g, estimate_poles(g, opt));
  widths.push_back(mainlobe_width(gap_fill_profile(g, m, dsp::Window::rect)));
  for (std::size_t i = 1; i < widths.size(); ++i) EXPECT_LT(widths[i], widths[i - 1]);
}

TEST(Fusion, OneConstantAlignsAllBands) {
  const RadarConfig cfg = default_radar_config();
  const Scene s = two_target_scene(2.0, 0.0085);
  const DechirpedRecord rec = dechirp_synthesize(s, cfg, 0);
  std::vector<BandSegment> segs;
  for (int l = 1; l <= 4; ++l) segs.push_back(to_band_segment(subband_extract(rec, l, cfg), l, cfg, 2.5e6));
  const AlignmentReport rep = align_to_truth(segs, scatterers_at(s, 0.0));
  EXPECT_LT(rep.relative_error, 1e-3);
  EXPECT_NEAR(std::abs(rep.constant), 1.0, 1e-3);
  for (double e : rep.band_errors) EXPECT_LT(e, 1e-3);
  const AlignmentReport bad = align_to_truth(inject_band_phase_errors(segs, 5), scatterers_at(s, 0.0));
  EXPECT_GT(bad.relative_error, 0.1);
}
