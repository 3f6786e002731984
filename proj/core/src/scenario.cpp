#include "pmr/scenario.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"

namespace pmr {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  throw Error("cli", (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

// Typed access to one JSON object that remembers which keys were read.
class Node {
 public:
  Node(const json& j, std::string ptr, bool strict, std::vector<std::string>& warnings)
      : j_(j), ptr_(std::move(ptr)), strict_(strict), warnings_(warnings) {
    if (!j_.is_object()) fail(ptr_, "expected an object");
  }

  const std::string& ptr() const { return ptr_; }
  std::string at(const std::string& key) const { return ptr_ + "/" + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(at(key), "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(at(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::string text(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(at(key), "expected true or false");
    return v.get<bool>();
  }

  const json& array(const std::string& key) {
    seen_.insert(key);
    const json& v = j_.at(key);
    if (!v.is_array()) fail(at(key), "expected an array");
    return v;
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = array(key);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(at(key) + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Node child(const std::string& key) {
    seen_.insert(key);
    return Node(j_.at(key), at(key), strict_, warnings_);
  }

  Node element(const std::string& key, std::size_t i) {
    return Node(j_.at(key).at(i), at(key) + "/" + std::to_string(i), strict_, warnings_);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (seen_.count(it.key())) continue;
      const std::string msg = ptr_ + "/" + it.key() + ": unknown key";
      if (strict_) throw Error("cli", msg + " (use --lax to ignore)");
      warnings_.push_back(msg);
    }
  }

 private:
  const json& j_;
  std::string ptr_;
  bool strict_;
  std::vector<std::string>& warnings_;
  std::set<std::string> seen_;
};

dsp::Window window_at(Node& n, const std::string& key, dsp::Window def) {
  const std::string name = n.text(key, dsp::to_string(def));
  if (name == "hann") return dsp::Window::hann;
  if (name == "rect") return dsp::Window::rect;
  fail(n.at(key), "expected \"hann\" or \"rect\"");
}

void parse_radar(Node n, RadarConfig& r) {
  const double f0 = n.number("f_start_hz", r.lfm.f_start);
  const double bw = n.number("bandwidth_hz", r.lfm.bandwidth);
  const double dur = n.number("duration_s", r.lfm.duration);
  const double wfs = n.number("waveform_sample_rate_hz", r.lfm.sample_rate);
  try {
    r.lfm = LfmParams::make(f0, bw, dur, wfs);
  } catch (const Error& e) {
    fail(n.ptr(), e.what());
  }
  const std::int64_t l_max = n.integer("l_max", r.l_max);
  if (l_max < 1 || l_max > 64) fail(n.at("l_max"), "must lie in 1..64");
  r.l_max = static_cast<int>(l_max);
  r.prf = n.number("prf_hz", r.prf);
  r.dechirp_sample_rate = n.number("dechirp_sample_rate_hz", r.dechirp_sample_rate);
  if (n.has("range_window_m")) {
    const auto w = n.numbers("range_window_m");
    if (w.size() != 2) fail(n.at("range_window_m"), "expected [r_min, r_max]");
    r.range_min = w[0];
    r.range_max = w[1];
  }
  if (n.has("mzm")) {
    Node m = n.child("mzm");
    r.mzm.modulation_index = m.number("modulation_index", r.mzm.modulation_index);
    r.mzm.bias_angle = m.number("bias_angle_rad", r.mzm.bias_angle);
    r.mzm.carrier_freq = m.number("carrier_hz", r.mzm.carrier_freq);
    r.mzm.pm_index = m.number("pm_index", r.mzm.pm_index);
    m.finish();
  }
  n.finish();
}

void parse_scene(Node n, Scene& s) {
  const bool has_static = n.has("scatterers");
  const bool has_platform = n.has("platform");
  if (has_static == has_platform) fail(n.ptr(), "give exactly one of \"scatterers\" or \"platform\"");
  if (has_static) {
    const json& arr = n.array("scatterers");
    if (arr.empty()) fail(n.at("scatterers"), "needs at least one scatterer");
    std::vector<PointScatterer> pts;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Node p = n.element("scatterers", i);
      PointScatterer sc;
      sc.x = p.number("x_m", 0.0);
      sc.y = p.number("y_m", 0.0);
      sc.reflectivity = p.number("reflectivity", 1.0);
      p.finish();
      pts.push_back(sc);
    }
    s.targets = std::move(pts);
  } else {
    Node p = n.child("platform");
    RotatingPlatform pf;
    pf.center_range = p.number("center_range_m", pf.center_range);
    pf.radius = p.number("radius_m", pf.radius);
    pf.angular_rate = p.number("angular_rate_rad_s", pf.angular_rate);
    if (!p.has("angles_deg")) fail(p.at("angles_deg"), "required");
    for (double a : p.numbers("angles_deg")) pf.angles.push_back(a * kPi / 180.0);
    if (p.has("reflectivities")) {
      pf.reflectivities = p.numbers("reflectivities");
    } else {
      pf.reflectivities.assign(pf.angles.size(), 1.0);
    }
    p.finish();
    s.targets = std::move(pf);
  }
  if (n.has("noise_snr_db")) s.noise_snr_db = n.number("noise_snr_db", 0.0);
  s.inverse_square_law = n.boolean("inverse_square_law", false);
  n.finish();
}

void parse_processing(Node n, ProcessingConfig& p) {
  p.window = window_at(n, "window", p.window);
  p.doppler_window = window_at(n, "doppler_window", p.doppler_window);
  if (n.has("modes")) {
    const json& arr = n.array("modes");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) fail(n.at("modes") + "/" + std::to_string(i), "expected a string");
      try {
        p.modes.push_back(ImagingMode::parse(arr[i].get<std::string>()));
      } catch (const Error& e) {
        fail(n.at("modes") + "/" + std::to_string(i), e.what());
      }
    }
  }
  p.delta_f = n.number("delta_f_hz", p.delta_f);
  p.max_order = static_cast<int>(n.integer("max_order", p.max_order));
  p.sv_threshold = n.number("sv_threshold", p.sv_threshold);
  p.max_iters = static_cast<int>(n.integer("max_iters", p.max_iters));
  p.max_pencil_samples = static_cast<int>(n.integer("max_pencil_samples", p.max_pencil_samples));
  p.residual_gate = n.number("residual_gate", p.residual_gate);
  p.min_separation_db = n.number("min_separation_db", p.min_separation_db);
  p.floor_db = n.number("floor_db", p.floor_db);
  p.n_pulses = static_cast<int>(n.integer("n_pulses", p.n_pulses));
  if (n.has("sweep")) {
    Node s = n.child("sweep");
    p.sweep.min_separation = s.number("min_m", p.sweep.min_separation);
    p.sweep.max_separation = s.number("max_m", p.sweep.max_separation);
    p.sweep.tolerance = s.number("tolerance_m", p.sweep.tolerance);
    p.sweep.center_range = s.number("center_range_m", p.sweep.center_range);
    s.finish();
  }
  n.finish();
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Experiment parse_experiment(std::string_view name) {
  if (name == "spectrum") return Experiment::spectrum;
  if (name == "range") return Experiment::range;
  if (name == "fuse") return Experiment::fuse;
  if (name == "isar") return Experiment::isar;
  if (name == "sweep") return Experiment::sweep;
  throw Error("cli", "unknown experiment '" + std::string(name) + "' (spectrum, range, fuse, isar, sweep)");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::spectrum: return "spectrum";
    case Experiment::range: return "range";
    case Experiment::fuse: return "fuse";
    case Experiment::isar: return "isar";
    case Experiment::sweep: return "sweep";
  }
  return {};
}

FusionSettings ScenarioConfig::fusion_settings() const {
  FusionSettings f;
  f.delta_f = processing.delta_f;
  f.poles = pole_options(radar);
  f.poles.max_order = processing.max_order;
  f.poles.sv_threshold = processing.sv_threshold;
  f.refine.max_iters = processing.max_iters;
  f.poles.max_pencil_samples = static_cast<std::size_t>(processing.max_pencil_samples);
  f.residual_gate = processing.residual_gate;
  return f;
}

ScenarioConfig parse_config(std::string_view text, bool strict) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error("cli", "JSON syntax error at " + line_col(text, e.byte) + ": " + e.what());
  }
  ScenarioConfig cfg;
  cfg.radar = default_radar_config();
  Node root(doc, "", strict, cfg.warnings);
  if (!root.has("schema")) fail("/schema", "required (set \"schema\": 1)");
  cfg.schema = static_cast<int>(root.integer("schema", 0));
  if (cfg.schema != 1) fail("/schema", "unsupported schema version " + std::to_string(cfg.schema));
  if (!root.has("experiment")) fail("/experiment", "required");
  try {
    cfg.experiment = parse_experiment(root.text("experiment", ""));
  } catch (const Error& e) {
    fail("/experiment", e.what());
  }
  const std::int64_t seed = root.integer("seed", 0);
  if (seed < 0) fail("/seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.output_dir = root.text("output_dir", cfg.output_dir);
  if (root.has("radar")) parse_radar(root.child("radar"), cfg.radar);
  if (!root.has("scene")) fail("/scene", "required");
  parse_scene(root.child("scene"), cfg.scene);
  cfg.scene.rng_seed = cfg.seed;
  if (root.has("processing")) parse_processing(root.child("processing"), cfg.processing);
  root.finish();
  validate_config(cfg);
  return cfg;
}

void validate_config(const ScenarioConfig& cfg) {
  const RadarConfig& r = cfg.radar;
  try {
    r.validate();
  } catch (const Error& e) {
    fail("/radar", e.what());
  }
  try {
    cfg.scene.validate();
  } catch (const Error& e) {
    fail("/scene", e.what());
  }
  // Every scatterer must stay inside the range window or its tones leak
  // into a neighbouring subband.
  if (const auto* pts = std::get_if<std::vector<PointScatterer>>(&cfg.scene.targets)) {
    for (std::size_t i = 0; i < pts->size(); ++i) {
      const double R = (*pts)[i].range();
      if (R < r.range_min || R > r.range_max) {
        std::ostringstream os;
        os << "range " << R << " m lies outside range_window_m [" << r.range_min << ", " << r.range_max
           << "]; move the target or widen the window";
        fail("/scene/scatterers/" + std::to_string(i), os.str());
      }
    }
  } else {
    const auto& pf = std::get<RotatingPlatform>(cfg.scene.targets);
    if (pf.center_range - pf.radius < r.range_min || pf.center_range + pf.radius > r.range_max)
      fail("/scene/platform", "platform extends outside range_window_m; move it or widen the window");
  }
  const ProcessingConfig& p = cfg.processing;
  const double native = r.l_max * r.lfm.chirp_rate / r.dechirp_sample_rate;
  if (!(p.delta_f >= native * (1.0 - 1e-12))) {
    std::ostringstream os;
    os << "delta_f must be >= l_max*k/dechirp_sample_rate = " << native
       << " Hz; raise delta_f or dechirp_sample_rate";
    fail("/processing/delta_f_hz", os.str());
  }
  const double ratio = r.lfm.f_start / p.delta_f;
  if (std::abs(ratio - std::round(ratio)) > 1e-6)
    fail("/processing/delta_f_hz", "f_start must be an integer multiple of delta_f so all bands share one grid");
  if (p.max_order < 1) fail("/processing/max_order", "must be >= 1");
  if (!(p.sv_threshold > 0.0 && p.sv_threshold < 1.0)) fail("/processing/sv_threshold", "must lie in (0, 1)");
  if (p.max_iters < 0) fail("/processing/max_iters", "must be >= 0");
  if (p.max_pencil_samples != 0 && p.max_pencil_samples < 2 * p.max_order + 2)
    fail("/processing/max_pencil_samples", "must be 0 (no cap) or >= 2*max_order+2");
  if (!(p.residual_gate > 0.0)) fail("/processing/residual_gate", "must be > 0");
  if (!(p.min_separation_db > 0.0)) fail("/processing/min_separation_db", "must be > 0");
  if (!(p.floor_db > 0.0)) fail("/processing/floor_db", "must be > 0");
  if (p.n_pulses < 2) fail("/processing/n_pulses", "must be >= 2");
  for (std::size_t i = 0; i < p.modes.size(); ++i)
    if (p.modes[i].kind == ImagingMode::Kind::subband && p.modes[i].order > r.l_max)
      fail("/processing/modes/" + std::to_string(i), "subband order exceeds l_max");
  const SweepSettings& s = p.sweep;
  if (!(s.min_separation > 0.0 && s.max_separation > s.min_separation && s.tolerance > 0.0))
    fail("/processing/sweep", "need 0 < min_m < max_m and tolerance_m > 0");
  if (s.center_range - 0.5 * s.max_separation < r.range_min || s.center_range + 0.5 * s.max_separation > r.range_max)
    fail("/processing/sweep", "sweep targets leave range_window_m; lower max_m or move center_range_m");
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema"] = cfg.schema;
  j["experiment"] = to_string(cfg.experiment);
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  const RadarConfig& r = cfg.radar;
  j["radar"] = {{"f_start_hz", r.lfm.f_start},
                {"bandwidth_hz", r.lfm.bandwidth},
                {"duration_s", r.lfm.duration},
                {"waveform_sample_rate_hz", r.lfm.sample_rate},
                {"l_max", r.l_max},
                {"prf_hz", r.prf},
                {"dechirp_sample_rate_hz", r.dechirp_sample_rate},
                {"range_window_m", {r.range_min, r.range_max}},
                {"mzm",
                 {{"modulation_index", r.mzm.modulation_index},
                  {"bias_angle_rad", r.mzm.bias_angle},
                  {"carrier_hz", r.mzm.carrier_freq},
                  {"pm_index", r.mzm.pm_index}}}};
  json scene;
  if (const auto* pts = std::get_if<std::vector<PointScatterer>>(&cfg.scene.targets)) {
    scene["scatterers"] = json::array();
    for (const auto& p : *pts) scene["scatterers"].push_back({{"x_m", p.x}, {"y_m", p.y}, {"reflectivity", p.reflectivity}});
  } else {
    const auto& pf = std::get<RotatingPlatform>(cfg.scene.targets);
    json angles = json::array();
    for (double a : pf.angles) angles.push_back(a * 180.0 / kPi);
    scene["platform"] = {{"center_range_m", pf.center_range},
                         {"radius_m", pf.radius},
                         {"angular_rate_rad_s", pf.angular_rate},
                         {"angles_deg", angles},
                         {"reflectivities", pf.reflectivities}};
  }
  scene["noise_snr_db"] = cfg.scene.noise_snr_db ? json(*cfg.scene.noise_snr_db) : json(nullptr);
  scene["inverse_square_law"] = cfg.scene.inverse_square_law;
  j["scene"] = scene;
  const ProcessingConfig& p = cfg.processing;
  json modes = json::array();
  for (const auto& m : p.modes) modes.push_back(m.to_string());
  j["processing"] = {{"window", dsp::to_string(p.window)},
                     {"doppler_window", dsp::to_string(p.doppler_window)},
                     {"modes", modes},
                     {"delta_f_hz", p.delta_f},
                     {"max_order", p.max_order},
                     {"sv_threshold", p.sv_threshold},
                     {"max_iters", p.max_iters},
                     {"max_pencil_samples", p.max_pencil_samples},
                     {"residual_gate", p.residual_gate},
                     {"min_separation_db", p.min_separation_db},
                     {"floor_db", p.floor_db},
                     {"n_pulses", p.n_pulses},
                     {"sweep",
                      {{"min_m", p.sweep.min_separation},
                       {"max_m", p.sweep.max_separation},
                       {"tolerance_m", p.sweep.tolerance},
                       {"center_range_m", p.sweep.center_range}}}};
  return j.dump(2) + "\n";
}

}  // namespace pmr
