#pragma once

// Experiment drivers shared by the command-line tool and the acceptance
// suite. Each returns data products plus a JSON report; nothing here reads
// the clock, so equal inputs give equal bytes.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pmr/fusion.hpp"
#include "pmr/imaging.hpp"
#include "pmr/receiver.hpp"
#include "pmr/scenario.hpp"

namespace pmr {

struct SubbandResult {
  int order = 0;
  RangeProfile profile;  // cropped to the range window
  std::vector<Peak> peaks;
};

SubbandResult subband_range(const Scene& scene, const RadarConfig& cfg, int l, dsp::Window window,
                            double min_separation_db = 3.0, double floor_db = 10.0);

struct FusionResult {
  GappedSpectrum spectrum;
  PoleModel initial;
  PoleModel refined;
  RangeProfile direct;   // cropped
  RangeProfile allpole;  // cropped; empty when the model failed the gate
  std::vector<Peak> direct_peaks;
  std::vector<Peak> allpole_peaks;
  std::string allpole_error;  // set when gap filling was refused
};

FusionResult fuse_pulse(const Scene& scene, const RadarConfig& cfg, const FusionSettings& fusion,
                        dsp::Window window, double min_separation_db = 3.0, double floor_db = 10.0);

struct IsarResult {
  ImagingMode mode;
  IsarImage image;
  std::vector<Blob> blobs;
};

IsarResult isar_mode(const Scene& scene, const RadarConfig& cfg, const ImagingMode& mode, int n_pulses,
                     const FusionSettings& fusion, dsp::Window range_window, dsp::Window doppler_window,
                     double min_separation_db = 3.0, double floor_db = 10.0);

/// Ground-truth (range, cross-range) of each scatterer at the CPI centre.
std::vector<Blob> isar_truth(const Scene& scene, const RadarConfig& cfg, int n_pulses);

struct RunOutput {
  std::string report_json;
  std::map<std::string, std::string> files;  // file name -> content
};

RunOutput run_experiment(const ScenarioConfig& cfg);

/// Writes report.json and every artifact into `dir`.
void write_outputs(const RunOutput& out, const std::filesystem::path& dir);

}  // namespace pmr
