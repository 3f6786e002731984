#pragma once

// Versioned JSON scenario files: radar, scene, processing and experiment.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pmr/dsp.hpp"
#include "pmr/imaging.hpp"
#include "pmr/receiver.hpp"
#include "pmr/scene.hpp"

namespace pmr {

enum class Experiment { spectrum, range, fuse, isar, sweep };

Experiment parse_experiment(std::string_view name);
std::string to_string(Experiment e);

struct SweepSettings {
  double min_separation = 0.001;  // m
  double max_separation = 0.19;   // m
  double tolerance = 0.0002;      // m
  double center_range = 2.0;      // m
};

struct ProcessingConfig {
  dsp::Window window = dsp::Window::rect;
  std::vector<ImagingMode> modes;  // empty = experiment default
  double delta_f = 2.5e6;
  int max_order = 8;
  double sv_threshold = 1e-3;
  int max_iters = 50;
  int max_pencil_samples = 0;  // 0 = no cap
  double residual_gate = 0.1;
  double min_separation_db = 3.0;
  double floor_db = 10.0;
  int n_pulses = 128;
  dsp::Window doppler_window = dsp::Window::hann;
  SweepSettings sweep;
};

struct ScenarioConfig {
  int schema = 1;
  Experiment experiment = Experiment::range;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  RadarConfig radar;
  Scene scene;
  ProcessingConfig processing;
  std::vector<std::string> warnings;  // unknown keys in lax mode

  FusionSettings fusion_settings() const;
};

/// Parses and validates. Errors carry a JSON pointer (schema problems) or
/// line/column (syntax). `strict` rejects unknown keys, otherwise they are
/// reported in `warnings`.
ScenarioConfig parse_config(std::string_view text, bool strict = true);

/// Runs every module-level check on an assembled config.
void validate_config(const ScenarioConfig& cfg);

/// Canonical JSON of a config; parse_config(to_json(c)) reproduces c.
std::string config_to_json(const ScenarioConfig& cfg);

}  // namespace pmr
