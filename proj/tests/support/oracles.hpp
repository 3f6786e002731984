#pragma once

// Reference computations for the tests. Each one avoids the library code
// path it is used to check: plain DFT sums instead of FFTW, grid search
// instead of the matrix pencil, closed-form Dirichlet kernels instead of
// FFT profiles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double c0 = 299792458.0;

/// Cosine-series coefficient of a 2π-periodic real function g(φ), from an
/// n-point rectangle-rule DFT (exact for band-limited g when n is large).
inline std::vector<double> cosine_coefficients(const std::function<double(double)>& g, int l_max,
                                               std::size_t n = 4096) {
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) samples[i] = g(2.0 * pi * static_cast<double>(i) / static_cast<double>(n));
  std::vector<double> out(static_cast<std::size_t>(l_max) + 1);
  for (int l = 0; l <= l_max; ++l) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += samples[i] * std::cos(2.0 * pi * l * static_cast<double>(i) / static_cast<double>(n));
    out[static_cast<std::size_t>(l)] = (l == 0 ? 1.0 : 2.0) * acc / static_cast<double>(n);
  }
  return out;
}

/// Direct DFT magnitude at an arbitrary frequency (cycles/sample).
inline cplx dtft(const std::vector<cplx>& x, double f) {
  cplx acc{};
  for (std::size_t n = 0; n < x.size(); ++n) acc += x[n] * std::polar(1.0, -2.0 * pi * f * static_cast<double>(n));
  return acc;
}

/// Closed-form response of a sum of rect-windowed complex tones of unit
/// amplitude, evaluated at frequency f (cycles/sample), length n.
inline cplx tone_sum_response(const std::vector<double>& freqs, const std::vector<cplx>& amps, std::size_t n,
                              double f) {
  cplx acc{};
  const double N = static_cast<double>(n);
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const double d = freqs[k] - f;
    cplx kernel;
    if (std::abs(std::sin(pi * d)) < 1e-15) {
      kernel = N;
    } else {
      kernel = std::polar(std::sin(pi * d * N) / std::sin(pi * d), pi * d * (N - 1.0));
    }
    acc += amps[k] * kernel;
  }
  return acc;
}

/// Closed-form target response H(f) = Σ a_i exp(−j2πfτ_i).
inline cplx response(const std::vector<double>& delays, const std::vector<cplx>& amps, double f) {
  cplx acc{};
  for (std::size_t i = 0; i < delays.size(); ++i) acc += amps[i] * std::polar(1.0, -2.0 * pi * f * delays[i]);
  return acc;
}

/// Steering vector exp(−j2πf_iτ).
inline std::vector<cplx> steering(const std::vector<double>& f, double tau) {
  std::vector<cplx> s(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) s[i] = std::polar(1.0, -2.0 * pi * f[i] * tau);
  return s;
}

/// ||x||² − b^H G^{-1} b for the columns s_k: the residual energy of the
/// best least-squares fit of x by those columns (Gauss–Jordan on G).
inline double projection_residual(const std::vector<const std::vector<cplx>*>& cols, const std::vector<cplx>& x) {
  const std::size_t k = cols.size();
  std::vector<std::vector<cplx>> g(k, std::vector<cplx>(k + 1));
  double xx = 0.0;
  for (const cplx& v : x) xx += std::norm(v);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      cplx acc{};
      for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj((*cols[a])[i]) * (*cols[b])[i];
      g[a][b] = acc;
      g[b][a] = std::conj(acc);
    }
    cplx rhs{};
    for (std::size_t i = 0; i < x.size(); ++i) rhs += std::conj((*cols[a])[i]) * x[i];
    g[a][k] = rhs;
  }
  const std::vector<cplx> b = [&] {
    std::vector<cplx> v(k);
    for (std::size_t a = 0; a < k; ++a) v[a] = g[a][k];
    return v;
  }();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(g[r][c]) > std::abs(g[piv][c])) piv = r;
    std::swap(g[c], g[piv]);
    if (std::abs(g[c][c]) == 0.0) return xx;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const cplx m = g[r][c] / g[c][c];
      for (std::size_t q = c; q <= k; ++q) g[r][q] -= m * g[c][q];
    }
  }
  double proj = 0.0;
  for (std::size_t a = 0; a < k; ++a) proj += std::real(std::conj(b[a]) * (g[a][k] / g[a][a]));
  return xx - proj;
}

inline double projection_residual(const std::vector<double>& f, const std::vector<cplx>& x,
                                  const std::vector<double>& delays) {
  std::vector<std::vector<cplx>> s;
  for (double t : delays) s.push_back(steering(f, t));
  std::vector<const std::vector<cplx>*> cols;
  for (const auto& v : s) cols.push_back(&v);
  return projection_residual(cols, x);
}

/// Brute-force least-squares delay search: every combination of grid points
/// in boxes centre ± half_width (step `step`), then golden-section polishing
/// of each coordinate in turn within ± step.
inline std::vector<double> grid_search_delays(const std::vector<double>& f, const std::vector<cplx>& x,
                                              const std::vector<double>& centers, double half_width,
                                              double step) {
  const std::size_t k = centers.size();
  const int m = static_cast<int>(std::floor(half_width / step));
  const std::size_t per = static_cast<std::size_t>(2 * m + 1);
  std::vector<std::vector<std::vector<cplx>>> grid(k);
  for (std::size_t a = 0; a < k; ++a)
    for (int i = -m; i <= m; ++i) grid[a].push_back(steering(f, centers[a] + i * step));
  std::vector<std::size_t> idx(k, 0), best_idx(k, 0);
  double best_cost = INFINITY;
  std::vector<const std::vector<cplx>*> cols(k);
  while (true) {
    for (std::size_t a = 0; a < k; ++a) cols[a] = &grid[a][idx[a]];
    const double cost = projection_residual(cols, x);
    if (cost < best_cost) {
      best_cost = cost;
      best_idx = idx;
    }
    std::size_t pos = 0;
    while (pos < k && ++idx[pos] == per) idx[pos++] = 0;
    if (pos == k) break;
  }
  std::vector<double> best(k);
  for (std::size_t a = 0; a < k; ++a) best[a] = centers[a] + (static_cast<double>(best_idx[a]) - m) * step;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < 8; ++sweep) {
    for (std::size_t a = 0; a < k; ++a) {
      double lo = best[a] - step, hi = best[a] + step;
      auto cost_at = [&](double t) {
        auto d = best;
        d[a] = t;
        return projection_residual(f, x, d);
      };
      double c = hi - gr * (hi - lo), e = lo + gr * (hi - lo);
      double fc = cost_at(c), fe = cost_at(e);
      for (int it = 0; it < 50; ++it) {
        if (fc < fe) {
          hi = e;
          e = c;
          fe = fc;
          c = hi - gr * (hi - lo);
          fc = cost_at(c);
        } else {
          lo = c;
          c = e;
          fc = fe;
          e = lo + gr * (hi - lo);
          fe = cost_at(e);
        }
      }
      best[a] = 0.5 * (lo + hi);
    }
  }
  std::sort(best.begin(), best.end());
  return best;
}

/// Number of local maxima of a sampled magnitude curve separated by valleys
/// at least `db` below the smaller neighbour (greedy left-to-right merge).
inline std::size_t count_resolved(const std::vector<double>& m, double db = 3.0) {
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < m.size(); ++i)
    if (m[i] > m[i - 1] && m[i] >= m[i + 1]) peaks.push_back(i);
  const double top = m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
  std::vector<std::size_t> kept;
  for (std::size_t p : peaks)
    if (m[p] >= top * 0.1 * std::sqrt(10.0)) kept.push_back(p);  // 10 dB floor
  bool merged = true;
  while (merged && kept.size() > 1) {
    merged = false;
    for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
      double v = INFINITY;
      for (std::size_t q = kept[i]; q <= kept[i + 1]; ++q) v = std::min(v, m[q]);
      if (v > std::min(m[kept[i]], m[kept[i + 1]]) * std::pow(10.0, -db / 20.0)) {
        kept.erase(kept.begin() + static_cast<long>(m[kept[i]] >= m[kept[i + 1]] ? i + 1 : i));
        merged = true;
        break;
      }
    }
  }
  return kept.size();
}

}  // namespace oracle
