#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pmr/error.hpp"
#include "pmr/receiver.hpp"

using namespace pmr;

namespace {

Scene point(double range, double refl = 1.0) {
  Scene s;
  s.targets = std::vector<PointScatterer>{{range, 0.0, refl}};
  return s;
}

double tau_of(double r) { return 2.0 * r / oracle::c0; }

// Hann-weighted DTFT magnitude of a record at f Hz.
double hann_mag(const cvec& x, double f, double fs) {
  std::vector<oracle::cplx> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = x[i] * (0.5 - 0.5 * std::cos(2 * oracle::pi * i / (x.size() - 1.0)));
  return std::abs(oracle::dtft(y, f / fs));
}

// Closed-form slice for harmonic l: w_l·a·exp(j(2π l k τ t + ψ_l)).
cvec ideal_slice(const std::vector<Echo>& echoes, const RadarConfig& cfg, int l) {
  const auto w = dechirp_weights(cfg);
  const double k = cfg.lfm.chirp_rate, f0 = cfg.lfm.f_start, fs = cfg.dechirp_sample_rate;
  cvec out(cfg.record_length());
  for (const Echo& e : echoes) {
    const double psi = 2 * oracle::pi * l * f0 * e.delay - oracle::pi * l * k * e.delay * e.delay;
    for (std::size_t n = 0; n < out.size(); ++n)
      out[n] += w[static_cast<std::size_t>(l)] * e.amplitude *
                std::polar(1.0, 2 * oracle::pi * l * k * e.delay * (n / fs) + psi);
  }
  return out;
}

}  // namespace

TEST(Receiver, DefaultConfigIsValid) {
  const RadarConfig cfg = default_radar_config();
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.record_length(), 2000u);
}

TEST(Receiver, TwoMetreToneAt133kHz) {
  RadarConfig cfg = default_radar_config();
  const DechirpedRecord rec = dechirp_synthesize(point(2.0), cfg, 0);
  const DechirpedRecord s1 = subband_extract(rec, 1, cfg);
  double best = 0, best_f = 0;
  for (double f = 130e3; f < 137e3; f += 5.0) {
    const double m = hann_mag(s1.samples, f, cfg.dechirp_sample_rate);
    if (m > best) {
      best = m;
      best_f = f;
    }
  }
  EXPECT_NEAR(best_f, 133.42e3, 50.0);
}

TEST(Receiver, CompositeFollowsFullPhaseLaw) {
  RadarConfig cfg = default_radar_config();
  Scene s;
  s.targets = std::vector<PointScatterer>{{1.93, 0.01, 1.0}, {2.07, -0.02, 0.4}};
  const DechirpedRecord rec = dechirp_synthesize(s, cfg, 3);
  const auto echoes = scatterers_at(s, rec.t_slow);
  cvec ref(cfg.record_length());
  for (int l = 1; l <= cfg.l_max; ++l) {
    const cvec part = ideal_slice(echoes, cfg, l);
    for (std::size_t n = 0; n < ref.size(); ++n) ref[n] += part[n];
  }
  double worst = 0;
  for (std::size_t n = 0; n < ref.size(); ++n) worst = std::max(worst, std::abs(rec.samples[n] - ref[n]));
  EXPECT_LT(worst, 1e-9);
  // Phase at t = 0 of a single harmonic.
  cfg.l_max = 1;
  const DechirpedRecord one = dechirp_synthesize(point(2.0), cfg, 0);
  const double tau = tau_of(2.0);
  const double psi = 2 * oracle::pi * cfg.lfm.f_start * tau - oracle::pi * cfg.lfm.chirp_rate * tau * tau;
  const double w1 = dechirp_weights(cfg)[1];
  const double got = std::arg(one.samples[0] * (w1 < 0 ? -1.0 : 1.0));
  EXPECT_LT(std::abs(std::remainder(got - psi, 2 * oracle::pi)), 1e-6);
}

TEST(Receiver, ToneFrequenciesInRatio1234) {
  RadarConfig cfg = default_radar_config();
  const DechirpedRecord rec = dechirp_synthesize(point(2.04), cfg, 0);
  std::vector<double> f;
  for (int l = 1; l <= 4; ++l) {
    const RangeProfile p = range_profile(subband_extract(rec, l, cfg), l, cfg);
    const auto peaks = resolve_peaks(p);
    ASSERT_EQ(peaks.size(), 1u);
    f.push_back(2.0 * l * cfg.lfm.chirp_rate * peaks[0].range / oracle::c0);
  }
  for (int l = 2; l <= 4; ++l) EXPECT_NEAR(f[static_cast<std::size_t>(l - 1)] / f[0], l, 1e-4);
}

TEST(Receiver, RangeMappingBiasBound) {
  RadarConfig cfg = default_radar_config();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ur(1.92, 2.08);
  for (int trial = 0; trial < 5; ++trial) {
    const double R = ur(rng);
    const DechirpedRecord rec = dechirp_synthesize(point(R), cfg, 0);
    for (int l = 1; l <= 4; ++l) {
      const auto peaks = resolve_peaks(range_profile(subband_extract(rec, l, cfg), l, cfg));
      ASSERT_EQ(peaks.size(), 1u);
      EXPECT_LT(std::abs(peaks[0].range - R), 0.1 * oracle::c0 / (2 * l * cfg.lfm.bandwidth)) << "l=" << l;
    }
  }
}

TEST(Receiver, NyquistViolationNamesHarmonicAndDelay) {
  const RadarConfig cfg = default_radar_config();
  try {
    dechirp_synthesize(point(100.0), cfg, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.module(), "receiver");
    EXPECT_NE(std::string(e.what()).find("l="), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("tau="), std::string::npos);
  }
}

TEST(Receiver, ConfigRejectsOverlappingToneIntervals) {
  RadarConfig cfg = default_radar_config();
  cfg.range_min = 1.0;
  cfg.range_max = 5.0;
  cfg.dechirp_sample_rate = 100e6;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = default_radar_config();
  cfg.dechirp_sample_rate = 1e6;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Receiver, ExtractionKeepsOnlyItsOwnTones) {
  const RadarConfig cfg = default_radar_config();
  const Scene s = two_target_scene(2.0, 0.15);
  const DechirpedRecord rec = dechirp_synthesize(s, cfg, 0);
  const auto echoes = scatterers_at(s, 0.0);
  const double fs = cfg.dechirp_sample_rate, k = cfg.lfm.chirp_rate;
  for (int l = 1; l <= 4; ++l) {
    const DechirpedRecord slice = subband_extract(rec, l, cfg);
    const cvec ideal = ideal_slice(echoes, cfg, l);
    cvec err(ideal.size());
    for (std::size_t n = 0; n < err.size(); ++n) err[n] = slice.samples[n] - ideal[n];
    double ref = 0;
    for (const Echo& e : echoes) ref = std::max(ref, hann_mag(ideal, l * k * e.delay, fs));
    for (int q = 1; q <= 4; ++q) {
      if (q == l) continue;
      for (const Echo& e : echoes) {
        const double leak = hann_mag(err, q * k * e.delay, fs);
        EXPECT_LT(20 * std::log10(leak / ref), -60.0) << "extract " << l << ", tone of " << q;
      }
    }
  }
  EXPECT_THROW(subband_extract(rec, 0, cfg), Error);
  EXPECT_THROW(subband_extract(rec, 5, cfg), Error);
}

TEST(Receiver, SubbandsSumBackToComposite) {
  const RadarConfig cfg = default_radar_config();
  const Scene s = two_target_scene(2.0, 0.05);
  const DechirpedRecord rec = dechirp_synthesize(s, cfg, 0);
  cvec sum(rec.samples.size());
  for (int l = 1; l <= 4; ++l) {
    const DechirpedRecord slice = subband_extract(rec, l, cfg);
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += slice.samples[n];
  }
  const double fs = cfg.dechirp_sample_rate, k = cfg.lfm.chirp_rate;
  for (const Echo& e : scatterers_at(s, 0.0))
    for (int l = 1; l <= 4; ++l) {
      const double f = l * k * e.delay;
      EXPECT_NEAR(20 * std::log10(hann_mag(sum, f, fs) / hann_mag(rec.samples, f, fs)), 0.0, 0.1);
    }
}

// Waveform-level chain on scaled parameters: 47 MHz start, 10 MHz sweep.
TEST(Receiver, WaveformOracleAgreesWithAnalyticPath) {
  RadarConfig cfg = default_radar_config();
  cfg.lfm = LfmParams::make(47e6, 10e6, 100e-6, 2.4e9);
  cfg.range_min = 280;
  cfg.range_max = 320;
  ASSERT_NO_THROW(cfg.validate());
  const Scene s = point(300.0);
  DechirpedRecord o = dechirp_waveform_oracle(s, cfg, 0, 2.4e9);
  DechirpedRecord a = dechirp_synthesize(s, cfg, 0);
  // Skip the leading transient of the oracle's filters.
  for (auto* r : {&o, &a})
    for (std::size_t i = 0; i < 50; ++i) r->samples[i] = 0;
  const RangeProfile po = range_profile(o, 1, cfg), pa = range_profile(a, 1, cfg);
  const auto ko = resolve_peaks(po, 3, 80), ka = resolve_peaks(pa, 3, 80);
  const double bin = pa.ranges[1] - pa.ranges[0];
  const double tone_range = 300.0;  // range axis of l=1 maps l·kτ to l·R
  std::vector<double> mo, ma;
  for (int l = 1; l <= 4; ++l) {
    auto nearest = [&](const std::vector<Peak>& pk) {
      const Peak* best = nullptr;
      for (const Peak& p : pk)
        if (!best || std::abs(p.range - l * tone_range) < std::abs(best->range - l * tone_range)) best = &p;
      return *best;
    };
    const Peak qo = nearest(ko), qa = nearest(ka);
    EXPECT_LT(std::abs(qo.range - qa.range), bin) << "l=" << l;
    mo.push_back(qo.magnitude);
    ma.push_back(qa.magnitude);
  }
  for (int l = 1; l < 4; ++l)
    EXPECT_NEAR(20 * std::log10((mo[static_cast<std::size_t>(l)] / mo[0]) / (ma[static_cast<std::size_t>(l)] / ma[0])),
                0.0, 1.0);
  // Every oracle peak within 40 dB of the strongest must also be in the
  // analytic spectrum (tones and their window sidelobes); anything else
  // would be a cross-harmonic product.
  const double top = *std::max_element(mo.begin(), mo.end());
  for (const Peak& p : ko) {
    if (20 * std::log10(p.magnitude / top) < -40.0) continue;
    bool known = false;
    for (const Peak& q : ka) known |= std::abs(p.range - q.range) <= bin;
    EXPECT_TRUE(known) << "spur at " << p.range << " m, " << 20 * std::log10(p.magnitude / top) << " dB";
  }
}

TEST(Receiver, WaveformOracleRejectsDelayBeyondPulse) {
  RadarConfig cfg = default_radar_config();
  cfg.lfm = LfmParams::make(47e6, 10e6, 100e-6, 2.4e9);
  cfg.range_min = 280;
  cfg.range_max = 320;
  EXPECT_THROW(dechirp_waveform_oracle(point(20e3), cfg, 0, 2.4e9), Error);
  EXPECT_THROW(dechirp_waveform_oracle(point(300.0), cfg, 0, 2.41e9), Error);
}

TEST(Peaks, SingleToneGivesOnePeakWithinHalfCell) {
  const RadarConfig cfg = default_radar_config();
  const DechirpedRecord s1 = subband_extract(dechirp_synthesize(point(2.013), cfg, 0), 2, cfg);
  const RangeProfile p = range_profile(s1, 2, cfg);
  const auto peaks = resolve_peaks(p);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_LT(std::abs(peaks[0].range - 2.013), 0.5 * (p.ranges[1] - p.ranges[0]) + 1e-4);
}

TEST(Peaks, FlatProfileHasNoPeaks) {
  RangeProfile p;
  for (int i = 0; i < 100; ++i) {
    p.ranges.push_back(i * 0.01);
    p.magnitudes.push_back(1.0);
  }
  EXPECT_TRUE(resolve_peaks(p).empty());
}

// Two equal tones exactly one Rayleigh cell apart, rect window. The closed-form
// Dirichlet sum decides: pairs in anti-phase at the record centre split with a
// deep null, pairs in phase there merge (midpoint 1.27x the peaks).
// resolve_peaks must agree with the oracle count for every relative phase.
TEST(Peaks, RayleighPairMatchesClosedFormOracle) {
  const std::size_t n = 256, pad = 16;
  const double f1 = 40.0 / n, f2 = 41.0 / n;
  // Phase accrued by the second tone between sample 0 and the record centre.
  const double to_centre = 2 * oracle::pi * (f2 - f1) * 0.5 * (n - 1.0);
  for (double phase_deg : {180.0, 150.0, 120.0, 90.0, 45.0, 0.0}) {
    const std::vector<oracle::cplx> amps = {1.0, std::polar(1.0, phase_deg * oracle::pi / 180 - to_centre)};
    RangeProfile p;
    for (std::size_t i = 0; i < n * pad / 2; ++i) {
      const double f = static_cast<double>(i) / (n * pad);
      p.ranges.push_back(f);
      p.magnitudes.push_back(std::abs(oracle::tone_sum_response({f1, f2}, amps, n, f)));
    }
    const std::size_t expected = oracle::count_resolved(p.magnitudes, 3.0);
    EXPECT_EQ(resolve_peaks(p, 3.0, 10.0).size(), expected) << "phase " << phase_deg;
    if (phase_deg == 180.0) EXPECT_EQ(expected, 2u);
    if (phase_deg == 0.0) EXPECT_EQ(expected, 1u);
  }
}

TEST(Peaks, MainlobeWidthOfRectSincIsPoint886Cells) {
  const std::size_t n = 256, pad = 64;
  RangeProfile p;
  for (std::size_t i = 0; i < n * pad / 2; ++i) {
    const double f = static_cast<double>(i) / (n * pad);
    p.ranges.push_back(f * n);
    p.magnitudes.push_back(std::abs(oracle::tone_sum_response({40.3 / n}, {1.0}, n, f)));
  }
  EXPECT_NEAR(mainlobe_width(p), 0.8859, 0.01);
  EXPECT_NEAR(peak_sidelobe_db(p), -13.26, 0.1);
}
