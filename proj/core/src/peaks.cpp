#include <algorithm>
#include <cmath>
#include <limits>

#include "pmr/error.hpp"
#include "pmr/receiver.hpp"

namespace pmr {

std::vector<Peak> resolve_peaks(const RangeProfile& profile, double min_separation_db,
                                double floor_db) {
  const auto& m = profile.magnitudes;
  const std::size_t n = m.size();
  if (n == 0) throw Error("receiver", "empty range profile");
  const double top = *std::max_element(m.begin(), m.end());
  if (!(top > 0.0)) return {};
  const double floor = top * std::pow(10.0, -floor_db / 20.0);

  // Indices of local maxima; plateaus count once, at their left edge.
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i] < floor) continue;
    const bool left = i == 0 || m[i] > m[i - 1];
    std::size_t j = i;
    while (j + 1 < n && m[j + 1] == m[i]) ++j;
    const bool right = j + 1 == n || m[j + 1] < m[i];
    if (left && right && !(i == 0 && j + 1 == n)) idx.push_back(i);
  }

  const double ratio = std::pow(10.0, -min_separation_db / 20.0);
  bool merged = true;
  while (merged && idx.size() > 1) {
    merged = false;
    for (std::size_t p = 0; p + 1 < idx.size(); ++p) {
      const std::size_t a = idx[p];
      const std::size_t b = idx[p + 1];
      const double valley = *std::min_element(m.begin() + static_cast<std::ptrdiff_t>(a),
                                              m.begin() + static_cast<std::ptrdiff_t>(b) + 1);
      if (valley > std::min(m[a], m[b]) * ratio) {
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(m[a] >= m[b] ? p + 1 : p));
        merged = true;
        break;
      }
    }
  }

  std::vector<Peak> peaks;
  for (std::size_t i : idx) {
    double r = profile.ranges[i];
    if (i > 0 && i + 1 < n) {
      const double off = dsp::parabolic_offset(m[i - 1], m[i], m[i + 1]);
      const double step = off >= 0.0 ? profile.ranges[i + 1] - profile.ranges[i]
                                      : profile.ranges[i] - profile.ranges[i - 1];
      r += off * step;
    }
    peaks.push_back({r, m[i]});
  }
  return peaks;
}

RangeProfile crop(const RangeProfile& profile, double r_min, double r_max) {
  RangeProfile out;
  out.band_label = profile.band_label;
  for (std::size_t i = 0; i < profile.ranges.size(); ++i) {
    if (profile.ranges[i] >= r_min && profile.ranges[i] <= r_max) {
      out.ranges.push_back(profile.ranges[i]);
      out.magnitudes.push_back(profile.magnitudes[i]);
    }
  }
  if (out.ranges.empty()) throw Error("receiver", "crop window contains no profile samples");
  return out;
}

double mainlobe_width(const RangeProfile& profile, double level_db) {
  const auto& m = profile.magnitudes;
  const auto& r = profile.ranges;
  if (m.size() < 3) throw Error("receiver", "profile too short for a width measurement");
  const std::size_t k = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
  const double level = m[k] * std::pow(10.0, -level_db / 20.0);
  std::size_t lo = k;
  while (lo > 0 && m[lo - 1] > level) --lo;
  std::size_t hi = k;
  while (hi + 1 < m.size() && m[hi + 1] > level) ++hi;
  if (lo == 0 || hi + 1 == m.size()) throw Error("receiver", "mainlobe touches the profile edge");
  const double rl = r[lo - 1] + (level - m[lo - 1]) / (m[lo] - m[lo - 1]) * (r[lo] - r[lo - 1]);
  const double rh = r[hi] + (m[hi] - level) / (m[hi] - m[hi + 1]) * (r[hi + 1] - r[hi]);
  return rh - rl;
}

double peak_sidelobe_db(const RangeProfile& profile) {
  const auto& m = profile.magnitudes;
  const std::size_t k = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
  std::size_t lo = k;
  while (lo > 0 && m[lo - 1] <= m[lo]) --lo;
  std::size_t hi = k;
  while (hi + 1 < m.size() && m[hi + 1] <= m[hi]) ++hi;
  double side = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (i < lo || i > hi) side = std::max(side, m[i]);
  if (side == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(side / m[k]);
}

}  // namespace pmr
