#include "pmr/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"

namespace pmr::dsp {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (size, direction) and kept for the
// lifetime of the process.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    cvec in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("dsp", "FFTW failed to create a plan of size " + std::to_string(n));
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

cvec transform(std::span<const cplx> x, std::size_t n, int sign) {
  if (n == 0) n = x.size();
  if (n == 0) return {};
  cvec in(n, cplx{});
  std::copy_n(x.begin(), std::min(n, x.size()), in.begin());
  cvec out(n);
  fftw_execute_dft(plan_cache().get(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

double bessel_i0(double x) {
  // Power series; converges quickly for the beta range used by Kaiser windows.
  double sum = 1.0, term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

cvec fft(std::span<const cplx> x, std::size_t n) { return transform(x, n, FFTW_FORWARD); }

cvec ifft(std::span<const cplx> x, std::size_t n) {
  cvec y = transform(x, n, FFTW_BACKWARD);
  const double scale = y.empty() ? 1.0 : 1.0 / static_cast<double>(y.size());
  for (auto& v : y) v *= scale;
  return y;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Window parse_window(std::string_view name) {
  if (name == "rect") return Window::rect;
  if (name == "hann") return Window::hann;
  throw Error("dsp", "unknown window '" + std::string(name) + "' (expected hann or rect)");
}

std::string to_string(Window w) { return w == Window::rect ? "rect" : "hann"; }

std::vector<double> make_window(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  if (w == Window::rect || n < 2) return out;
  for (std::size_t i = 0; i < n; ++i)
    out[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

cvec analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  cvec cx(x.begin(), x.end());
  cvec spec = fft(cx);
  // Keep DC and Nyquist, double positive frequencies, zero negative ones.
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) {
      spec[k] *= 2.0;
    } else if (2 * k > n) {
      spec[k] = 0.0;
    }
  }
  return ifft(spec);
}

double kaiser_beta(double attenuation_db) {
  if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
  if (attenuation_db >= 21.0)
    return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) + 0.07886 * (attenuation_db - 21.0);
  return 0.0;
}

std::vector<double> kaiser_window(std::size_t n, double beta) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  const double denom = bessel_i0(beta);
  const double half = 0.5 * static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (static_cast<double>(i) - half) / half;
    w[i] = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
  }
  return w;
}

cvec convolve_same(std::span<const cplx> x, std::span<const cplx> h) {
  if (x.empty() || h.empty()) return cvec(x.size());
  const std::size_t full = x.size() + h.size() - 1;
  const std::size_t n = next_pow2(full);
  cvec xf = fft(x, n);
  const cvec hf = fft(h, n);
  for (std::size_t k = 0; k < n; ++k) xf[k] *= hf[k];
  const cvec y = ifft(xf);
  const std::size_t delay = (h.size() - 1) / 2;
  return cvec(y.begin() + static_cast<std::ptrdiff_t>(delay),
              y.begin() + static_cast<std::ptrdiff_t>(delay + x.size()));
}

cvec sinc_interpolate(std::span<const cplx> x, std::span<const double> positions, int half_width,
                      double beta) {
  cvec out(positions.size());
  const double norm = bessel_i0(beta);
  const auto n = static_cast<long>(x.size());
  for (std::size_t p = 0; p < positions.size(); ++p) {
    const double pos = positions[p];
    const long base = static_cast<long>(std::floor(pos));
    cplx acc{};
    for (long m = base - half_width + 1; m <= base + half_width; ++m) {
      if (m < 0 || m >= n) continue;
      const double d = pos - static_cast<double>(m);
      const double r = d / static_cast<double>(half_width);
      if (std::abs(r) >= 1.0) continue;
      const double sinc = std::abs(d) < 1e-12 ? 1.0 : std::sin(kPi * d) / (kPi * d);
      const double taper = bessel_i0(beta * std::sqrt(1.0 - r * r)) / norm;
      acc += x[static_cast<std::size_t>(m)] * (sinc * taper);
    }
    out[p] = acc;
  }
  return out;
}

double parabolic_offset(double left, double center, double right) {
  const double denom = left - 2.0 * center + right;
  if (std::abs(denom) < 1e-300) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace pmr::dsp
