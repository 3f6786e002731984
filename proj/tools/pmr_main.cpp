// pmr: scenario-driven front end. Every subcommand reads a JSON scenario,
// optionally overrides a few fields from flags, runs one experiment and
// writes report.json plus data products into the output directory.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pmr/error.hpp"
#include "pmr/io.hpp"
#include "pmr/run.hpp"
#include "pmr/scenario.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> window;
  std::vector<std::string> modes;
  bool lax = false;
};

void add_common(CLI::App* cmd, Overrides& o, bool processing_flags) {
  cmd->add_option("config", o.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--lax{true},--strict{false}", o.lax, "Warn on unknown config keys instead of failing");
  if (!processing_flags) return;
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--out", o.out, "Output directory (overrides output_dir)");
  cmd->add_option("--window", o.window, "Range window")->check(CLI::IsMember({"hann", "rect"}));
  cmd->add_option("--mode", o.modes, "subband:L, fused-direct or fused-allpole (repeatable)");
}

pmr::ScenarioConfig load(const Overrides& o) {
  pmr::ScenarioConfig cfg = pmr::parse_config(pmr::io::read_file(o.config), !o.lax);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.scene.rng_seed = *o.seed;
  }
  if (o.out) cfg.output_dir = *o.out;
  if (o.window) cfg.processing.window = pmr::dsp::parse_window(*o.window);
  if (!o.modes.empty()) {
    cfg.processing.modes.clear();
    for (const auto& m : o.modes) cfg.processing.modes.push_back(pmr::ImagingMode::parse(m));
  }
  pmr::validate_config(cfg);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  return cfg;
}

std::string error_json(const std::string& module, const std::string& message) {
  nlohmann::json j;
  j["error"] = {{"module", module}, {"message", message}};
  return j.dump(2) + "\n";
}

int run(const Overrides& o, std::optional<pmr::Experiment> experiment) {
  std::filesystem::path out_dir = o.out.value_or("");
  try {
    pmr::ScenarioConfig cfg = load(o);
    if (experiment) cfg.experiment = *experiment;
    out_dir = cfg.output_dir;
    const auto t0 = std::chrono::steady_clock::now();
    const pmr::RunOutput out = pmr::run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    pmr::write_outputs(out, out_dir);
    // Wall time lives outside report.json so that file stays reproducible.
    pmr::io::write_file(out_dir / "timing.txt", "wall_time_s " + pmr::io::format_double(wall) + "\n");
    std::filesystem::remove(out_dir / "error.json");
    std::cout << out_dir.string() << "/report.json\n";
    return 0;
  } catch (const pmr::Error& e) {
    const std::string j = error_json(e.module(), e.what());
    std::cerr << j;
    if (!out_dir.empty()) {
      try {
        pmr::io::write_file(out_dir / "error.json", j);
      } catch (...) {
      }
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_json("cli", e.what());
    return 3;
  }
}

int validate(const Overrides& o) {
  try {
    const pmr::ScenarioConfig cfg = load(o);
    nlohmann::json j;
    j["valid"] = true;
    j["experiment"] = pmr::to_string(cfg.experiment);
    j["warnings"] = cfg.warnings;
    std::cout << j.dump(2) << '\n';
    return 0;
  } catch (const pmr::Error& e) {
    std::cerr << error_json(e.module(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_json("cli", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photonic multiband radar simulator"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    std::optional<pmr::Experiment> experiment;
  };
  const std::vector<Sub> subs = {
      {"simulate-spectrum", "De-chirped composite spectrum of one pulse", pmr::Experiment::spectrum},
      {"range-profile", "Single-subband range profiles", pmr::Experiment::range},
      {"fuse", "Gapped multiband fusion of one pulse", pmr::Experiment::fuse},
      {"isar", "Range-Doppler images of the rotating platform", pmr::Experiment::isar},
      {"sweep-resolution", "Bisect the minimum resolvable separation per mode", pmr::Experiment::sweep},
      {"run", "Run the experiment named in the config", std::nullopt},
  };

  std::vector<Overrides> opts(subs.size());
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    add_common(cmd, opts[i], true);
    cmds.push_back(cmd);
  }
  Overrides vopt;
  CLI::App* vcmd = app.add_subcommand("validate", "Check a config without running it");
  add_common(vcmd, vopt, false);

  CLI11_PARSE(app, argc, argv);

  if (vcmd->parsed()) return validate(vopt);
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (cmds[i]->parsed()) return run(opts[i], subs[i].experiment);
  return 1;
}
