#include <benchmark/benchmark.h>

#include "pmr/fusion.hpp"
#include "pmr/imaging.hpp"
#include "pmr/photonics.hpp"
#include "pmr/receiver.hpp"

using namespace pmr;

namespace {

const RadarConfig& cfg() {
  static const RadarConfig c = default_radar_config();
  return c;
}

const Scene& pair() {
  static const Scene s = two_target_scene(2.0, 0.0085);
  return s;
}

const GappedSpectrum& spectrum() {
  static const GappedSpectrum g = pulse_spectrum(dechirp_synthesize(pair(), cfg(), 0), cfg(), 2.5e6);
  return g;
}

void BM_HarmonicAmplitudes(benchmark::State& st) {
  MzmParams mzm;
  for (auto _ : st) benchmark::DoNotOptimize(harmonic_amplitudes(mzm, 4));
}
BENCHMARK(BM_HarmonicAmplitudes);

void BM_DechirpSynthesize(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(dechirp_synthesize(pair(), cfg(), 0));
}
BENCHMARK(BM_DechirpSynthesize);

void BM_SubbandExtract(benchmark::State& st) {
  const DechirpedRecord rec = dechirp_synthesize(pair(), cfg(), 0);
  for (auto _ : st) benchmark::DoNotOptimize(subband_extract(rec, static_cast<int>(st.range(0)), cfg()));
}
BENCHMARK(BM_SubbandExtract)->DenseRange(1, 4);

void BM_PulseSpectrum(benchmark::State& st) {
  const DechirpedRecord rec = dechirp_synthesize(pair(), cfg(), 0);
  for (auto _ : st) benchmark::DoNotOptimize(pulse_spectrum(rec, cfg(), 2.5e6));
}
BENCHMARK(BM_PulseSpectrum)->Unit(benchmark::kMillisecond);

void BM_EstimatePoles(benchmark::State& st) {
  PoleOptions opt = pole_options(cfg());
  opt.max_pencil_samples = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(estimate_poles(spectrum(), opt));
}
BENCHMARK(BM_EstimatePoles)->Arg(0)->Arg(600)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_RefineGlobal(benchmark::State& st) {
  const PoleModel init = estimate_poles(spectrum(), pole_options(cfg()));
  for (auto _ : st) benchmark::DoNotOptimize(refine_global(spectrum(), init));
}
BENCHMARK(BM_RefineGlobal)->Unit(benchmark::kMillisecond);

void BM_FuseDirect(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(fuse_direct(spectrum(), dsp::Window::hann));
}
BENCHMARK(BM_FuseDirect)->Unit(benchmark::kMillisecond);

void BM_IsarSubband(benchmark::State& st) {
  RotatingPlatform pf;
  pf.angles = {0.87, 1.57, 2.27};
  pf.reflectivities = {1, 1, 1};
  Scene s;
  s.targets = pf;
  const DataMatrix dm = collect_cpi(s, cfg(), 32, ImagingMode::parse("subband:4"));
  IsarOptions opt;
  opt.angular_rate = pf.angular_rate;
  for (auto _ : st) benchmark::DoNotOptimize(isar_image(dm, cfg(), opt));
}
BENCHMARK(BM_IsarSubband)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
