#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"
#include "pmr/receiver.hpp"

namespace pmr {
namespace {

// Zero every bin of a length-n spectrum whose signed frequency fails keep(f).
template <class Keep>
void mask_spectrum(cvec& spec, double rate, Keep keep) {
  const std::size_t n = spec.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double f = (i <= n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n)) *
                     rate / static_cast<double>(n);
    if (!keep(f)) spec[i] = cplx{};
  }
}

}  // namespace

DechirpedRecord dechirp_waveform_oracle(const Scene& scene, const RadarConfig& cfg, int pulse_index,
                                        double waveform_rate) {
  if (pulse_index < 0) throw Error("receiver", "pulse_index must be >= 0");
  const LfmParams& lfm = cfg.lfm;
  const double f_top = cfg.l_max * lfm.f_stop();
  if (!std::isfinite(waveform_rate) || waveform_rate < 4.0 * f_top) {
    std::ostringstream os;
    os << "waveform_rate " << waveform_rate << " Hz is infeasible; the optical/RF chain needs at least "
       << 4.0 * f_top << " Hz";
    throw Error("receiver", os.str());
  }
  const double ratio = waveform_rate / cfg.dechirp_sample_rate;
  const auto decim = static_cast<std::size_t>(std::llround(ratio));
  if (decim < 1 || std::abs(ratio - static_cast<double>(decim)) > 1e-9 * ratio)
    throw Error("receiver", "waveform_rate must be an integer multiple of dechirp_sample_rate");
  const double next_low = (cfg.l_max + 1) * lfm.f_start;
  if (next_low <= f_top)
    throw Error("receiver", "harmonic l_max+1 overlaps harmonic l_max; cannot band-limit the echo");

  const double t_slow = pulse_index / cfg.prf;
  const std::vector<Echo> echoes = scatterers_at(scene, t_slow);
  double tau_top = 0.0;
  for (const Echo& e : echoes) {
    if (e.delay >= lfm.duration) throw Error("receiver", "echo delay leaves no overlap with the pulse");
    tau_top = std::max(tau_top, e.delay);
  }

  const auto n = static_cast<std::size_t>(std::floor(lfm.duration * waveform_rate * (1.0 + 1e-12)));
  const MzmParams& mzm = cfg.mzm;
  const double b0 = harmonic_amplitudes(mzm, cfg.l_max).signed_coefficient(0);
  auto drive = [&](double t) { return std::cos(lfm_phase(lfm, t)); };

  // Echo: delayed AC photocurrent of the transmitter, band-limited to the
  // first l_max harmonics by the RF front end.
  cvec echo(n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / waveform_rate;
    double acc = 0.0;
    for (const Echo& e : echoes) {
      const double u = t - e.delay;
      if (u < 0.0) continue;
      acc += e.amplitude * (1.0 + std::cos(mzm.bias_angle + mzm.modulation_index * drive(u)) - b0);
    }
    echo[i] = acc;
  }
  cvec spec = dsp::fft(echo);
  const double rf_low = 0.5 * lfm.f_start;
  const double rf_high = 0.5 * (f_top + next_low);
  mask_spectrum(spec, waveform_rate, [&](double f) {
    const double a = std::abs(f);
    return a >= rf_low && a <= rf_high;
  });
  echo = dsp::ifft(spec);

  // Reference field (push-pull MZM, real envelope) phase-modulated by the echo.
  cvec field(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / waveform_rate;
    const double ref = std::cos(0.5 * (mzm.bias_angle + mzm.modulation_index * drive(t)));
    field[i] = ref * std::polar(1.0, mzm.pm_index * echo[i].real());
  }
  // Optical band-pass: upper sidebands only, carrier and its close-in skirt removed.
  spec = dsp::fft(field);
  mask_spectrum(spec, waveform_rate, [&](double f) { return f >= rf_low; });
  field = dsp::ifft(spec);

  cvec current(n);
  for (std::size_t i = 0; i < n; ++i) current[i] = std::norm(field[i]);
  // Low-speed detector: keep positive beat frequencies below the de-chirp
  // Nyquist (analytic form), then decimate.
  spec = dsp::fft(current);
  const double cutoff = std::min(0.5 * cfg.dechirp_sample_rate, 0.5 * lfm.f_start);
  mask_spectrum(spec, waveform_rate, [&](double f) { return f > 0.0 && f < cutoff; });
  for (cplx& v : spec) v *= 2.0;
  const cvec analytic = dsp::ifft(spec);

  DechirpedRecord rec;
  rec.sample_rate = cfg.dechirp_sample_rate;
  rec.pulse_index = pulse_index;
  rec.t_slow = t_slow;
  rec.samples.resize(cfg.record_length());
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const std::size_t j = i * decim;
    rec.samples[i] = j < n ? analytic[j] : cplx{};
  }
  rec.valid_start = static_cast<std::size_t>(std::ceil(tau_top * cfg.dechirp_sample_rate));
  return rec;
}

}  // namespace pmr
