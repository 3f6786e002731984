#pragma once

// Small DSP toolbox shared by the radar modules: FFTs, analysis windows,
// analytic-signal construction and band-limited interpolation.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pmr {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

namespace dsp {

/// Forward DFT (e^{-j2πkn/N}), unnormalized. `n` zero-pads (or truncates) to
/// that length; 0 keeps the input length.
cvec fft(std::span<const cplx> x, std::size_t n = 0);

/// Inverse DFT (e^{+j2πkn/N}) scaled by 1/N.
cvec ifft(std::span<const cplx> x, std::size_t n = 0);

/// Smallest power of two that is >= n.
std::size_t next_pow2(std::size_t n);

enum class Window { rect, hann };

Window parse_window(std::string_view name);
std::string to_string(Window w);

/// Symmetric window of length n.
std::vector<double> make_window(Window w, std::size_t n);

/// Analytic signal of a real sequence (negative-frequency half suppressed).
cvec analytic_signal(std::span<const double> x);

/// Kaiser window shape parameter for a given stopband attenuation in dB.
double kaiser_beta(double attenuation_db);

/// Kaiser window of odd or even length n.
std::vector<double> kaiser_window(std::size_t n, double beta);

/// Linear convolution of x with h, keeping the samples aligned with x after
/// removing the (len(h)-1)/2 group delay of an odd-length linear-phase h.
cvec convolve_same(std::span<const cplx> x, std::span<const cplx> h);

/// Windowed-sinc interpolation of a uniformly sampled sequence at fractional
/// sample positions. Positions outside [0, n-1] read zeros beyond the ends.
cvec sinc_interpolate(std::span<const cplx> x, std::span<const double> positions,
                      int half_width = 24, double beta = 10.0);

/// Parabolic refinement of a discrete peak at index i; returns the fractional
/// offset in [-0.5, 0.5].
double parabolic_offset(double left, double center, double right);

}  // namespace dsp
}  // namespace pmr
