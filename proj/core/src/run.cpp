#include "pmr/run.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"
#include "pmr/io.hpp"

namespace pmr {
namespace {

using json = nlohmann::json;

json peaks_json(const std::vector<Peak>& peaks) {
  json arr = json::array();
  for (const Peak& p : peaks) arr.push_back({{"range_m", p.range}, {"magnitude", p.magnitude}});
  return arr;
}

json profile_summary(const RangeProfile& profile, const std::vector<Peak>& peaks) {
  json j;
  j["peaks"] = peaks_json(peaks);
  j["n_peaks"] = peaks.size();
  j["resolved"] = peaks.size() >= 2;
  if (peaks.size() >= 2) j["separation_m"] = peaks.back().range - peaks.front().range;
  try {
    j["mainlobe_width_m"] = mainlobe_width(profile, 3.0);
  } catch (const Error&) {
    j["mainlobe_width_m"] = nullptr;
  }
  return j;
}

json pole_json(const PoleModel& m) {
  json j;
  j["order"] = m.order;
  j["fit_residual"] = m.fit_residual;
  j["degraded"] = m.degraded;
  j["iterations"] = m.iterations;
  j["residual_history"] = m.residual_history;
  json d = json::array();
  for (std::size_t i = 0; i < m.delays.size(); ++i)
    d.push_back({{"delay_s", m.delays[i]},
                 {"range_m", delay_to_range(m.delays[i])},
                 {"amplitude", {m.amplitudes[i].real(), m.amplitudes[i].imag()}}});
  j["poles"] = d;
  return j;
}

std::string mode_file_tag(const ImagingMode& m) {
  std::string s = m.to_string();
  std::replace(s.begin(), s.end(), ':', '_');
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

std::vector<ImagingMode> subband_modes(const RadarConfig& cfg) {
  std::vector<ImagingMode> out;
  for (int l = 1; l <= cfg.l_max; ++l) out.push_back({ImagingMode::Kind::subband, l});
  return out;
}

Scene with_targets(const Scene& base, Scene targets) {
  targets.noise_snr_db = base.noise_snr_db;
  targets.rng_seed = base.rng_seed;
  targets.inverse_square_law = base.inverse_square_law;
  return targets;
}

// Peak count of one mode for a two-target scene; errors count as unresolved.
std::size_t mode_peak_count(const ScenarioConfig& cfg, const ImagingMode& mode, const Scene& scene) {
  const ProcessingConfig& p = cfg.processing;
  if (mode.kind == ImagingMode::Kind::subband)
    return subband_range(scene, cfg.radar, mode.order, p.window, p.min_separation_db, p.floor_db).peaks.size();
  const FusionResult f = fuse_pulse(scene, cfg.radar, cfg.fusion_settings(), p.window, p.min_separation_db, p.floor_db);
  return mode.kind == ImagingMode::Kind::fused_direct ? f.direct_peaks.size() : f.allpole_peaks.size();
}

json run_spectrum(const ScenarioConfig& cfg, RunOutput& out) {
  const RadarConfig& r = cfg.radar;
  const DechirpedRecord rec = dechirp_synthesize(cfg.scene, r, 0);
  json j;
  const HarmonicSpectrum h = harmonic_amplitudes(r.mzm, r.l_max);
  j["harmonic_amplitudes"] = h.amplitudes;
  j["harmonic_signs"] = h.signs;
  j["dechirp_weights"] = dechirp_weights(r);
  const SubbandPlan plan = subband_plan(r.lfm, r.l_max);
  json bands = json::array();
  for (const Subband& b : plan.bands)
    bands.push_back({{"order", b.order}, {"f_low_hz", b.f_low}, {"f_high_hz", b.f_high}, {"bandwidth_hz", b.bandwidth}});
  j["subbands"] = bands;
  j["total_span_hz"] = plan.total_span;
  double occupied = 0.0;
  for (const Subband& b : plan.bands) occupied += b.bandwidth;
  j["occupancy"] = occupied / plan.total_span;

  // Composite de-chirp spectrum on a frequency axis.
  RangeProfile spec = range_profile(rec, 1, r, cfg.processing.window);
  const double to_freq = 2.0 * r.lfm.chirp_rate / kSpeedOfLight;
  for (double& x : spec.ranges) x *= to_freq;
  const double top = r.l_max * r.lfm.chirp_rate * r.tau_max() * 1.25;
  RangeProfile shown = crop(spec, 0.0, std::min(top, 0.5 * r.dechirp_sample_rate));
  std::vector<Peak> tones = resolve_peaks(shown, cfg.processing.min_separation_db, 60.0);
  json tj = json::array();
  for (const Peak& t : tones) tj.push_back({{"freq_hz", t.range}, {"magnitude", t.magnitude}});
  j["detected_tones"] = tj;
  json expected = json::array();
  for (const Echo& e : scatterers_at(cfg.scene, 0.0))
    for (int l = 1; l <= r.l_max; ++l)
      expected.push_back({{"order", l}, {"delay_s", e.delay}, {"freq_hz", l * r.lfm.chirp_rate * e.delay}});
  j["expected_tones"] = expected;

  std::string csv = "freq_hz,magnitude\n";
  for (std::size_t i = 0; i < shown.ranges.size(); ++i)
    csv += io::format_double(shown.ranges[i]) + "," + io::format_double(shown.magnitudes[i]) + "\n";
  out.files["dechirp_spectrum.csv"] = csv;
  out.files["dechirp_record.csv"] = io::record_csv(rec);
  return j;
}

json run_range(const ScenarioConfig& cfg, RunOutput& out) {
  std::vector<ImagingMode> modes;
  for (const auto& m : cfg.processing.modes)
    if (m.kind == ImagingMode::Kind::subband) modes.push_back(m);
  if (modes.empty()) modes = subband_modes(cfg.radar);
  json j;
  for (const auto& m : modes) {
    const SubbandResult s = subband_range(cfg.scene, cfg.radar, m.order, cfg.processing.window,
                                          cfg.processing.min_separation_db, cfg.processing.floor_db);
    j[m.to_string()] = profile_summary(s.profile, s.peaks);
    out.files["profile_" + mode_file_tag(m) + ".csv"] = io::profile_csv(s.profile);
  }
  return j;
}

json run_fuse(const ScenarioConfig& cfg, RunOutput& out) {
  const FusionResult f = fuse_pulse(cfg.scene, cfg.radar, cfg.fusion_settings(), cfg.processing.window,
                                    cfg.processing.min_separation_db, cfg.processing.floor_db);
  json j;
  j["grid_bins"] = f.spectrum.size();
  j["occupied_bins"] = f.spectrum.occupied_bins();
  j["occupancy"] = f.spectrum.occupancy();
  j["span_hz"] = f.spectrum.span();
  j["poles_initial"] = pole_json(f.initial);
  j["poles_refined"] = pole_json(f.refined);
  // Spacing of adjacent model delays in range; not limited by the Fourier
  // mainlobe the way the profiles below are.
  json seps = json::array();
  for (std::size_t i = 1; i < f.refined.delays.size(); ++i)
    seps.push_back(0.5 * kSpeedOfLight * (f.refined.delays[i] - f.refined.delays[i - 1]));
  j["model_separations_m"] = seps;
  j["fused-direct"] = profile_summary(f.direct, f.direct_peaks);
  if (f.allpole_error.empty()) {
    j["fused-allpole"] = profile_summary(f.allpole, f.allpole_peaks);
    out.files["profile_fused_allpole.csv"] = io::profile_csv(f.allpole);
  } else {
    j["fused-allpole"] = {{"error", f.allpole_error}};
  }
  ImagingMode primary{ImagingMode::Kind::fused_allpole, 0};
  for (const auto& m : cfg.processing.modes)
    if (m.fused()) primary = m;
  j["primary_mode"] = primary.to_string();
  out.files["spectrum.csv"] = io::spectrum_csv(f.spectrum);
  out.files["poles_initial.csv"] = io::pole_model_csv(f.initial);
  out.files["poles_refined.csv"] = io::pole_model_csv(f.refined);
  out.files["profile_fused_direct.csv"] = io::profile_csv(f.direct);
  return j;
}

json run_isar(const ScenarioConfig& cfg, RunOutput& out) {
  std::vector<ImagingMode> modes = cfg.processing.modes;
  if (modes.empty()) {
    modes = subband_modes(cfg.radar);
    modes.push_back({ImagingMode::Kind::fused_allpole, 0});
  }
  const int np = cfg.processing.n_pulses;
  json j;
  j["n_pulses"] = np;
  j["cpi_s"] = np / cfg.radar.prf;
  if (const auto* pf = std::get_if<RotatingPlatform>(&cfg.scene.targets))
    j["rotation_rad"] = pf->angular_rate * np / cfg.radar.prf;
  json truth = json::array();
  for (const Blob& b : isar_truth(cfg.scene, cfg.radar, np))
    truth.push_back({{"range_m", b.range}, {"crossrange_m", b.crossrange}});
  j["truth"] = truth;
  json modes_j;
  for (const auto& m : modes) {
    const IsarResult res = isar_mode(cfg.scene, cfg.radar, m, np, cfg.fusion_settings(), cfg.processing.window,
                                     cfg.processing.doppler_window, cfg.processing.min_separation_db,
                                     cfg.processing.floor_db);
    json blobs = json::array();
    for (const Blob& b : res.blobs)
      blobs.push_back({{"range_m", b.range}, {"crossrange_m", b.crossrange}, {"intensity", b.intensity}});
    modes_j[m.to_string()] = {{"blobs", blobs}, {"n_blobs", res.blobs.size()}};
    const std::string tag = mode_file_tag(m);
    out.files["isar_" + tag + ".csv"] = io::image_csv(res.image);
    out.files["isar_" + tag + ".pgm"] = io::image_pgm(res.image);
  }
  j["modes"] = modes_j;
  return j;
}

json run_sweep(const ScenarioConfig& cfg, RunOutput& out) {
  std::vector<ImagingMode> modes = cfg.processing.modes;
  if (modes.empty()) {
    modes = subband_modes(cfg.radar);
    modes.push_back({ImagingMode::Kind::fused_direct, 0});
    modes.push_back({ImagingMode::Kind::fused_allpole, 0});
  }
  const SweepSettings& s = cfg.processing.sweep;
  auto resolved = [&](const ImagingMode& m, double sep) {
    const Scene sc = with_targets(cfg.scene, two_target_scene(s.center_range, sep));
    return mode_peak_count(cfg, m, sc) >= 2;
  };
  json j;
  std::string csv = "mode,min_resolvable_m\n";
  for (const auto& m : modes) {
    json mj;
    double lo = s.min_separation, hi = s.max_separation;
    int evals = 0;
    if (!resolved(m, hi)) {
      mj["min_resolvable_m"] = nullptr;
      mj["note"] = "unresolved at max_m";
      csv += m.to_string() + ",nan\n";
    } else if (resolved(m, lo)) {
      mj["min_resolvable_m"] = lo;
      csv += m.to_string() + "," + io::format_double(lo) + "\n";
    } else {
      // Bisection assumes resolvability is monotone in separation; with
      // coherent targets it is not strictly, so this is the boundary found.
      while (hi - lo > s.tolerance) {
        const double mid = 0.5 * (lo + hi);
        ++evals;
        (resolved(m, mid) ? hi : lo) = mid;
      }
      mj["min_resolvable_m"] = hi;
      csv += m.to_string() + "," + io::format_double(hi) + "\n";
    }
    mj["bisection_steps"] = evals;
    j[m.to_string()] = mj;
  }
  out.files["sweep.csv"] = csv;
  return j;
}

}  // namespace

SubbandResult subband_range(const Scene& scene, const RadarConfig& cfg, int l, dsp::Window window,
                            double min_separation_db, double floor_db) {
  const DechirpedRecord rec = dechirp_synthesize(scene, cfg, 0);
  const DechirpedRecord slice = subband_extract(rec, l, cfg);
  SubbandResult res;
  res.order = l;
  res.profile = crop(range_profile(slice, l, cfg, window), cfg.range_min, cfg.range_max);
  res.peaks = resolve_peaks(res.profile, min_separation_db, floor_db);
  return res;
}

FusionResult fuse_pulse(const Scene& scene, const RadarConfig& cfg, const FusionSettings& fusion,
                        dsp::Window window, double min_separation_db, double floor_db) {
  PoleOptions popt = fusion.poles;
  if (!(popt.tau_max > popt.tau_min)) {
    popt.tau_min = cfg.tau_min();
    popt.tau_max = cfg.tau_max();
  }
  FusionResult f;
  const DechirpedRecord rec = dechirp_synthesize(scene, cfg, 0);
  f.spectrum = pulse_spectrum(rec, cfg, fusion.delta_f);
  f.direct = crop(fuse_direct(f.spectrum, window), cfg.range_min, cfg.range_max);
  f.direct_peaks = resolve_peaks(f.direct, min_separation_db, floor_db);
  f.initial = estimate_poles(f.spectrum, popt);
  if (f.initial.order == 0) {
    f.refined = f.initial;
    f.allpole_error = "no poles above the singular-value threshold";
    return f;
  }
  f.refined = refine_global(f.spectrum, f.initial, fusion.refine);
  try {
    f.allpole = crop(gap_fill_profile(f.spectrum, f.refined, window, fusion.residual_gate), cfg.range_min,
                     cfg.range_max);
    f.allpole_peaks = resolve_peaks(f.allpole, min_separation_db, floor_db);
  } catch (const Error& e) {
    f.allpole_error = e.what();
  }
  return f;
}

IsarResult isar_mode(const Scene& scene, const RadarConfig& cfg, const ImagingMode& mode, int n_pulses,
                     const FusionSettings& fusion, dsp::Window range_window, dsp::Window doppler_window,
                     double min_separation_db, double floor_db) {
  IsarResult res;
  res.mode = mode;
  const DataMatrix dm = collect_cpi(scene, cfg, n_pulses, mode, fusion);
  IsarOptions opt;
  if (const auto* pf = std::get_if<RotatingPlatform>(&scene.targets)) opt.angular_rate = pf->angular_rate;
  opt.range_window = range_window;
  opt.doppler_window = doppler_window;
  res.image = isar_image(dm, cfg, opt);
  res.blobs = resolve_blobs(res.image, min_separation_db, floor_db);
  return res;
}

std::vector<Blob> isar_truth(const Scene& scene, const RadarConfig& cfg, int n_pulses) {
  const double tc = 0.5 * (n_pulses - 1) / cfg.prf;
  std::vector<Blob> out;
  for (const PointScatterer& p : positions_at(scene, tc)) out.push_back({p.range(), p.y, p.reflectivity});
  std::sort(out.begin(), out.end(), [](const Blob& a, const Blob& b) { return a.range < b.range; });
  return out;
}

RunOutput run_experiment(const ScenarioConfig& cfg) {
  RunOutput out;
  json report;
  report["experiment"] = to_string(cfg.experiment);
  report["seed"] = cfg.seed;
  report["config"] = json::parse(config_to_json(cfg));
  // Where the files land is not part of the result.
  report["config"].erase("output_dir");
  switch (cfg.experiment) {
    case Experiment::spectrum: report["results"] = run_spectrum(cfg, out); break;
    case Experiment::range: report["results"] = run_range(cfg, out); break;
    case Experiment::fuse: report["results"] = run_fuse(cfg, out); break;
    case Experiment::isar: report["results"] = run_isar(cfg, out); break;
    case Experiment::sweep: report["results"] = run_sweep(cfg, out); break;
  }
  json files = json::array();
  for (const auto& [name, content] : out.files) files.push_back(name);
  report["artifacts"] = files;
  out.report_json = report.dump(2) + "\n";
  return out;
}

void write_outputs(const RunOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_file(dir / "report.json", out.report_json);
  for (const auto& [name, content] : out.files) io::write_file(dir / name, content);
}

}  // namespace pmr
