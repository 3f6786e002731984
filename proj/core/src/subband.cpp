#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"
#include "pmr/linear_prediction.hpp"
#include "pmr/receiver.hpp"

namespace pmr {
namespace {

constexpr double kStopbandDb = 80.0;
constexpr std::size_t kPredictionOrder = 80;

double min_guard(const std::vector<std::pair<double, double>>& iv) {
  double g = iv.front().first;
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) g = std::min(g, iv[i + 1].first - iv[i].second);
  return g;
}

void check_disjoint(const std::vector<std::pair<double, double>>& iv) {
  std::ostringstream clash;
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
    if (iv[i].second >= iv[i + 1].first)
      clash << " l=" << i + 1 << " [" << iv[i].first << ", " << iv[i].second << "] Hz vs l=" << i + 2
            << " [" << iv[i + 1].first << ", " << iv[i + 1].second << "] Hz;";
  }
  if (!clash.str().empty())
    throw Error("receiver", "subband tone intervals overlap:" + clash.str() + " narrow the range window");
}

std::size_t filter_length(const RadarConfig& cfg) {
  const auto iv = dechirp_tone_intervals(cfg);
  const double transition = min_guard(iv) / cfg.dechirp_sample_rate;  // cycles/sample
  const double n = (kStopbandDb - 7.95) / (2.285 * kTwoPi * transition) + 1.0;
  std::size_t len = static_cast<std::size_t>(std::ceil(n));
  if (len % 2 == 0) ++len;
  return len;
}

}  // namespace

std::vector<double> subband_split_points(const RadarConfig& cfg) {
  const auto iv = dechirp_tone_intervals(cfg);
  check_disjoint(iv);
  const double guard = min_guard(iv);
  std::vector<double> s;
  s.push_back(0.5 * iv.front().first);
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) s.push_back(0.5 * (iv[i].second + iv[i + 1].first));
  s.push_back(iv.back().second + 0.5 * guard);
  if (s.back() >= 0.5 * cfg.dechirp_sample_rate)
    throw Error("receiver", "top subband filter edge exceeds the de-chirp Nyquist frequency");
  return s;
}

cvec subband_filter(const RadarConfig& cfg, int l) {
  if (l < 1 || l > cfg.l_max) throw Error("receiver", "harmonic order outside 1..l_max");
  const std::vector<double> s = subband_split_points(cfg);
  const double f1 = s[static_cast<std::size_t>(l) - 1] / cfg.dechirp_sample_rate;
  const double f2 = s[static_cast<std::size_t>(l)] / cfg.dechirp_sample_rate;
  const std::size_t len = filter_length(cfg);
  const std::vector<double> win = dsp::kaiser_window(len, dsp::kaiser_beta(kStopbandDb));
  const long half = static_cast<long>(len / 2);
  cvec h(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double n = static_cast<double>(static_cast<long>(i) - half);
    cplx ideal;
    if (n == 0.0) {
      ideal = f2 - f1;
    } else {
      // ∫_{f1}^{f2} e^{j2πfn} df
      ideal = (std::polar(1.0, kTwoPi * f2 * n) - std::polar(1.0, kTwoPi * f1 * n)) /
              cplx(0.0, kTwoPi * n);
    }
    h[i] = ideal * win[i];
  }
  return h;
}

DechirpedRecord subband_extract(const DechirpedRecord& rec, int l, const RadarConfig& cfg) {
  if (l < 1 || l > cfg.l_max) {
    std::ostringstream os;
    os << "harmonic order " << l << " outside 1.." << cfg.l_max;
    throw Error("receiver", os.str());
  }
  if (rec.samples.empty()) throw Error("receiver", "empty de-chirp record");
  const cvec h = subband_filter(cfg, l);
  const std::size_t pad = (h.size() - 1) / 2;
  const cvec ext = extend_by_prediction(rec.samples, kPredictionOrder, pad);
  const cvec y = dsp::convolve_same(ext, h);
  DechirpedRecord out = rec;
  out.order = l;
  std::copy(y.begin() + static_cast<std::ptrdiff_t>(pad),
            y.begin() + static_cast<std::ptrdiff_t>(pad + rec.samples.size()), out.samples.begin());
  return out;
}

}  // namespace pmr
