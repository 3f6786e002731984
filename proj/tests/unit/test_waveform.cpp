#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pmr/error.hpp"
#include "pmr/waveform.hpp"

using namespace pmr;

TEST(Waveform, FirstSampleIsOne) {
  const SampledSignal s = generate_lfm(paper_lfm());
  ASSERT_FALSE(s.samples.empty());
  EXPECT_DOUBLE_EQ(s.samples[0], 1.0);
  EXPECT_EQ(s.size(), static_cast<std::size_t>(std::floor(100e-6 * 12e9)));
}

TEST(Waveform, RejectsSubNyquistRate) {
  const LfmParams p = LfmParams::make(4.7e9, 1e9, 100e-6, 10e9);
  EXPECT_THROW(generate_lfm(p), Error);
}

TEST(Waveform, RejectsNonFinite) {
  LfmParams p = paper_lfm();
  p.f_start = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(p.validate(false), Error);
  p = paper_lfm();
  p.duration = std::numeric_limits<double>::infinity();
  EXPECT_THROW(p.validate(false), Error);
}

TEST(Waveform, RejectsInconsistentChirpRate) {
  LfmParams p = paper_lfm();
  p.chirp_rate *= 1.001;
  EXPECT_THROW(p.validate(false), Error);
}

TEST(Waveform, InstantaneousFrequencyEndpoints) {
  const LfmParams p = paper_lfm();
  EXPECT_DOUBLE_EQ(instantaneous_frequency(p, 0.0), 4.7e9);
  EXPECT_NEAR(instantaneous_frequency(p, p.duration), 5.7e9, 1e-3);
  EXPECT_NEAR(p.chirp_rate, 1e13, 1e-3);
  EXPECT_THROW(instantaneous_frequency(p, -1e-9), Error);
  EXPECT_THROW(instantaneous_frequency(p, 2 * p.duration), Error);
}

TEST(Waveform, PhaseDerivativeIsInstantaneousFrequency) {
  const LfmParams p = paper_lfm();
  for (double t : {1e-6, 37e-6, 99e-6}) {
    const double h = 1e-12;
    const double fd = (lfm_phase(p, t + h) - lfm_phase(p, t - h)) / (2 * h) / (2 * oracle::pi);
    EXPECT_NEAR(fd, instantaneous_frequency(p, t), 1e-4 * fd);
  }
}

// Spectrogram ridge from direct DTFT maxima on short frames: its slope is the
// chirp rate. Scaled parameters keep the brute-force search cheap.
TEST(Waveform, SpectrogramRidgeSlopeMatchesChirpRate) {
  const LfmParams p = LfmParams::make(1e6, 4e6, 1e-3, 20e6);
  const SampledSignal s = generate_lfm(p);
  const std::size_t frame = 256;
  std::vector<double> tc, fc;
  for (std::size_t start = 1000; start + frame < s.size(); start += 2000) {
    std::vector<oracle::cplx> x(frame);
    for (std::size_t i = 0; i < frame; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2 * oracle::pi * i / (frame - 1));
      x[i] = w * s.samples[start + i];
    }
    double best = 0, best_f = 0;
    for (double f = 0.5e6; f < 5.5e6; f += 2e3) {
      const double m = std::abs(oracle::dtft(x, f / p.sample_rate));
      if (m > best) {
        best = m;
        best_f = f;
      }
    }
    tc.push_back((start + 0.5 * (frame - 1)) / p.sample_rate);
    fc.push_back(best_f);
  }
  const double n = static_cast<double>(tc.size());
  double st = 0, sf = 0, stt = 0, stf = 0;
  for (std::size_t i = 0; i < tc.size(); ++i) {
    st += tc[i];
    sf += fc[i];
    stt += tc[i] * tc[i];
    stf += tc[i] * fc[i];
  }
  const double slope = (n * stf - st * sf) / (n * stt - st * st);
  EXPECT_NEAR(slope, p.chirp_rate, 0.01 * p.chirp_rate);
}

TEST(Waveform, UnitAmplitudeMeanSquareIsHalf) {
  const SampledSignal s = generate_lfm(LfmParams::make(1e6, 4e6, 1e-3, 20e6));
  double ms = 0;
  for (double v : s.samples) ms += v * v;
  ms /= static_cast<double>(s.size());
  EXPECT_NEAR(ms, 0.5, 1e-3);
}
