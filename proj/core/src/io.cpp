#include "pmr/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"

namespace pmr::io {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) {
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw Error("io", "bad number '" + s + "'");
  }
  return v;
}

// Data lines of a CSV with the expected header.
std::vector<std::vector<std::string>> read_table(const std::string& text, const std::string& header,
                                                 std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) throw Error("io", "expected CSV header '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != columns)
      throw Error("io", "line " + std::to_string(lineno) + ": expected " + std::to_string(columns) + " fields");
    rows.push_back(std::move(f));
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string profile_csv(const RangeProfile& p) {
  std::string out = "range_m,magnitude\n";
  for (std::size_t i = 0; i < p.ranges.size(); ++i)
    out += format_double(p.ranges[i]) + "," + format_double(p.magnitudes[i]) + "\n";
  return out;
}

RangeProfile parse_profile_csv(const std::string& text) {
  RangeProfile p;
  for (const auto& r : read_table(text, "range_m,magnitude", 2)) {
    p.ranges.push_back(parse_double(r[0]));
    p.magnitudes.push_back(parse_double(r[1]));
  }
  return p;
}

std::string spectrum_csv(const GappedSpectrum& g) {
  std::string out = "freq_hz,re,im,measured\n";
  for (std::size_t i = 0; i < g.size(); ++i)
    out += format_double(g.freq(i)) + "," + format_double(g.values[i].real()) + "," +
           format_double(g.values[i].imag()) + "," + (g.mask[i] ? "1" : "0") + "\n";
  return out;
}

GappedSpectrum parse_spectrum_csv(const std::string& text) {
  const auto rows = read_table(text, "freq_hz,re,im,measured", 4);
  if (rows.size() < 2) throw Error("io", "spectrum needs at least two bins");
  GappedSpectrum g;
  g.f_min = parse_double(rows[0][0]);
  g.delta_f = parse_double(rows[1][0]) - g.f_min;
  for (const auto& r : rows) {
    g.values.emplace_back(parse_double(r[1]), parse_double(r[2]));
    g.mask.push_back(r[3] == "1" ? 1 : 0);
  }
  // Bandwidth of each measured run, matching assemble_gapped.
  std::size_t i = 0;
  while (i < g.size()) {
    if (!g.mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < g.size() && g.mask[j]) ++j;
    g.occupied_bandwidth += static_cast<double>(j - i - 1) * g.delta_f;
    i = j;
  }
  return g;
}

std::string pole_model_csv(const PoleModel& m) {
  std::string out = "delay_s,range_m,amp_re,amp_im\n";
  for (std::size_t i = 0; i < m.delays.size(); ++i)
    out += format_double(m.delays[i]) + "," + format_double(delay_to_range(m.delays[i])) + "," +
           format_double(m.amplitudes[i].real()) + "," + format_double(m.amplitudes[i].imag()) + "\n";
  return out;
}

PoleModel parse_pole_model_csv(const std::string& text) {
  PoleModel m;
  for (const auto& r : read_table(text, "delay_s,range_m,amp_re,amp_im", 4)) {
    m.delays.push_back(parse_double(r[0]));
    m.amplitudes.emplace_back(parse_double(r[2]), parse_double(r[3]));
  }
  m.order = static_cast<int>(m.delays.size());
  return m;
}

std::string record_csv(const DechirpedRecord& r) {
  std::string out = "time_s,re,im\n";
  for (std::size_t i = 0; i < r.samples.size(); ++i)
    out += format_double(r.time(i)) + "," + format_double(r.samples[i].real()) + "," +
           format_double(r.samples[i].imag()) + "\n";
  return out;
}

std::string image_csv(const IsarImage& img) {
  std::string out = "range_m\\crossrange_m";
  for (double x : img.crossrange_axis) out += "," + format_double(x);
  out += "\n";
  for (std::size_t r = 0; r < img.rows(); ++r) {
    out += format_double(img.range_axis[r]);
    for (std::size_t c = 0; c < img.cols(); ++c) out += "," + format_double(img.at(r, c));
    out += "\n";
  }
  return out;
}

IsarImage parse_image_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("io", "empty image CSV");
  auto head = split(line, ',');
  if (head.empty() || head[0] != "range_m\\crossrange_m") throw Error("io", "bad image CSV header");
  IsarImage img;
  for (std::size_t i = 1; i < head.size(); ++i) img.crossrange_axis.push_back(parse_double(head[i]));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != head.size()) throw Error("io", "ragged image CSV row");
    img.range_axis.push_back(parse_double(f[0]));
    for (std::size_t i = 1; i < f.size(); ++i) img.intensity.push_back(parse_double(f[i]));
  }
  return img;
}

std::string image_pgm(const IsarImage& img, double floor_db) {
  const double top = img.intensity.empty() ? 0.0 : *std::max_element(img.intensity.begin(), img.intensity.end());
  std::string out = "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  for (std::size_t r = 0; r < img.rows(); ++r) {
    for (std::size_t c = 0; c < img.cols(); ++c) {
      double level = 0.0;
      if (top > 0.0 && img.at(r, c) > 0.0) {
        const double db = 10.0 * std::log10(img.at(r, c) / top);
        level = std::clamp((db + floor_db) / floor_db, 0.0, 1.0);
      }
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(level * 255.0))));
    }
  }
  return out;
}

Pgm parse_pgm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  Pgm p;
  in >> magic >> p.width >> p.height >> p.maxval;
  if (magic != "P5" || !in || p.maxval <= 0 || p.maxval > 255) throw Error("io", "not an 8-bit P5 PGM");
  in.get();
  p.pixels.resize(p.width * p.height);
  in.read(reinterpret_cast<char*>(p.pixels.data()), static_cast<std::streamsize>(p.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != p.pixels.size()) throw Error("io", "truncated PGM");
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("io", "write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pmr::io
