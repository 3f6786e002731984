#pragma once

// CSV / PGM writers and the matching readers. Numbers use the shortest
// representation that round-trips, so equal inputs give equal bytes.

#include <filesystem>
#include <string>
#include <vector>

#include "pmr/fusion.hpp"
#include "pmr/imaging.hpp"
#include "pmr/receiver.hpp"

namespace pmr::io {

std::string format_double(double v);

/// range_m,magnitude
std::string profile_csv(const RangeProfile& p);
RangeProfile parse_profile_csv(const std::string& text);

/// freq_hz,re,im,measured
std::string spectrum_csv(const GappedSpectrum& g);
GappedSpectrum parse_spectrum_csv(const std::string& text);

/// delay_s,range_m,amp_re,amp_im (fit residual and flags go in the report)
std::string pole_model_csv(const PoleModel& m);
PoleModel parse_pole_model_csv(const std::string& text);

/// time_s,re,im
std::string record_csv(const DechirpedRecord& r);

/// First row: "range_m\crossrange_m" then the cross-range axis; each further
/// row: range then intensities.
std::string image_csv(const IsarImage& img);
IsarImage parse_image_csv(const std::string& text);

/// 8-bit binary PGM, rows = range (top = nearest), columns = cross-range,
/// log scale with `floor_db` of display range.
std::string image_pgm(const IsarImage& img, double floor_db = 40.0);

struct Pgm {
  std::size_t width = 0, height = 0;
  int maxval = 255;
  std::vector<unsigned char> pixels;
};
Pgm parse_pgm(const std::string& bytes);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace pmr::io
