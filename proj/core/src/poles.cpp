#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmr/constants.hpp"
#include "pmr/error.hpp"
#include "pmr/fusion.hpp"

namespace pmr {
namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

constexpr double kNs = 1e-9;

// Matrix pencil on uniformly spaced samples; returns unwrapped delays.
std::vector<double> pencil_delays(std::span<const cplx> full, double delta_f, const PoleOptions& opt) {
  cvec decimated;
  std::span<const cplx> x = full;
  if (opt.max_pencil_samples > 0 && full.size() > opt.max_pencil_samples) {
    const std::size_t step = (full.size() + opt.max_pencil_samples - 1) / opt.max_pencil_samples;
    for (std::size_t i = 0; i < full.size(); i += step) decimated.push_back(full[i]);
    x = decimated;
    delta_f *= static_cast<double>(step);
  }
  const std::size_t n = x.size();
  if (opt.max_order < 1) throw Error("fusion", "max_order must be >= 1");
  if (n < 2 * static_cast<std::size_t>(opt.max_order) + 2) {
    std::ostringstream os;
    os << "matrix pencil needs at least " << 2 * opt.max_order + 2 << " contiguous samples, got " << n;
    throw Error("fusion", os.str());
  }
  if (!(opt.tau_max > opt.tau_min)) throw Error("fusion", "pole delay window is empty");
  const std::size_t p = n / 3;
  const std::size_t rows = n - p;
  Mat y(rows, p + 1);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c <= p; ++c) y(r, c) = x[r + c];

  Eigen::BDCSVD<Mat> svd(y, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0)) return {};
  int order = 0;
  while (order < s.size() && s(order) > opt.sv_threshold * s(0)) ++order;
  order = std::min(order, opt.max_order);

  // Row space of the Hankel matrix: W = V'^H spans the pole Vandermonde rows.
  const Mat w = svd.matrixV().leftCols(order).adjoint();
  const Mat w1 = w.leftCols(static_cast<Eigen::Index>(p));
  const Mat w2 = w.rightCols(static_cast<Eigen::Index>(p));
  const Mat shift = w2 * w1.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::ComplexEigenSolver<Mat> eig(shift, false);

  const double period = 1.0 / delta_f;
  std::vector<double> delays;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const cplx z = eig.eigenvalues()(i);
    const double tau = -std::arg(z) / (kTwoPi * delta_f);
    double t = opt.tau_min + std::fmod(tau - opt.tau_min, period);
    if (t < opt.tau_min) t += period;
    if (t <= opt.tau_max) delays.push_back(t);
  }
  std::sort(delays.begin(), delays.end());
  return delays;
}

struct Measured {
  std::vector<double> freqs;
  Vec values;
};

Measured measured_bins(const GappedSpectrum& g) {
  Measured m;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.mask[i]) m.freqs.push_back(g.freq(i));
  m.values.resize(static_cast<Eigen::Index>(m.freqs.size()));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.mask[i]) m.values(k++) = g.values[i];
  return m;
}

Mat steering(const std::vector<double>& freqs, const std::vector<double>& delays) {
  Mat a(static_cast<Eigen::Index>(freqs.size()), static_cast<Eigen::Index>(delays.size()));
  for (std::size_t i = 0; i < freqs.size(); ++i)
    for (std::size_t k = 0; k < delays.size(); ++k)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = std::polar(1.0, -kTwoPi * freqs[i] * delays[k]);
  return a;
}

PoleModel fit_measured(const Measured& m, std::vector<double> delays, double max_condition) {
  PoleModel model;
  std::sort(delays.begin(), delays.end());
  const double norm = m.values.norm();
  if (delays.empty()) {
    model.fit_residual = norm > 0.0 ? 1.0 : 0.0;
    return model;
  }
  const Mat a = steering(m.freqs, delays);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
  if (!(cond <= max_condition)) {
    std::ostringstream os;
    os << "amplitude least squares is ill-conditioned (condition " << cond << ")";
    throw Error("fusion", os.str());
  }
  const Vec amp = svd.solve(m.values);
  model.delays = delays;
  model.amplitudes.assign(amp.data(), amp.data() + amp.size());
  model.order = static_cast<int>(delays.size());
  model.fit_residual = norm > 0.0 ? (m.values - a * amp).norm() / norm : 0.0;
  return model;
}

}  // namespace

cplx PoleModel::evaluate(double f) const {
  cplx acc{};
  for (std::size_t i = 0; i < delays.size(); ++i) acc += amplitudes[i] * std::polar(1.0, -kTwoPi * f * delays[i]);
  return acc;
}

PoleOptions pole_options(const RadarConfig& cfg) {
  PoleOptions o;
  o.tau_min = cfg.tau_min();
  o.tau_max = cfg.tau_max();
  return o;
}

PoleModel estimate_poles(const BandSegment& segment, const PoleOptions& opt) {
  std::vector<double> delays = pencil_delays(segment.values, segment.delta_f, opt);
  Measured m;
  m.freqs = segment.freqs();
  m.values = Eigen::Map<const Vec>(segment.values.data(), static_cast<Eigen::Index>(segment.values.size()));
  return fit_measured(m, std::move(delays), opt.max_condition);
}

PoleModel estimate_poles(const GappedSpectrum& g, const PoleOptions& opt) {
  const auto [b, e] = g.longest_run();
  std::span<const cplx> run(g.values.data() + b, e - b);
  std::vector<double> delays = pencil_delays(run, g.delta_f, opt);
  return fit_measured(measured_bins(g), std::move(delays), opt.max_condition);
}

PoleModel fit_amplitudes(const GappedSpectrum& g, std::vector<double> delays, double max_condition) {
  return fit_measured(measured_bins(g), std::move(delays), max_condition);
}

PoleModel refine_global(const GappedSpectrum& g, const PoleModel& init, const RefineOptions& opt) {
  if (init.order == 0 || init.delays.empty()) throw Error("fusion", "refine_global needs a nonempty initial model");
  const Measured m = measured_bins(g);
  const double norm = m.values.norm();
  const auto n = static_cast<Eigen::Index>(m.freqs.size());
  const auto k = static_cast<Eigen::Index>(init.delays.size());

  // Residual, projected Jacobian (delays in ns) and amplitudes at delays tau.
  struct Eval {
    Vec r;
    Vec amp;
    Eigen::MatrixXd jac;
    double cost = 0.0;
  };
  auto evaluate = [&](const std::vector<double>& tau, bool with_jac) {
    Eval ev;
    const Mat a = steering(m.freqs, tau);
    Eigen::HouseholderQR<Mat> qr(a);
    const Mat q = qr.householderQ() * Mat::Identity(n, k);
    ev.amp = qr.solve(m.values);
    ev.r = m.values - a * ev.amp;
    ev.cost = ev.r.squaredNorm();
    if (!with_jac) return ev;
    ev.jac.resize(2 * n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      Vec d(n);
      for (Eigen::Index i = 0; i < n; ++i)
        d(i) = cplx(0.0, -kTwoPi * m.freqs[static_cast<std::size_t>(i)] * kNs) * a(i, c) * ev.amp(c);
      const Vec proj = -(d - q * (q.adjoint() * d));  // ∂r/∂τ_c, Kaufman form
      ev.jac.col(c).head(n) = proj.real();
      ev.jac.col(c).tail(n) = proj.imag();
    }
    return ev;
  };

  std::vector<double> tau = init.delays;
  Eval cur = evaluate(tau, true);
  PoleModel best = init;
  best.fit_residual = norm > 0.0 ? std::sqrt(cur.cost) / norm : 0.0;
  best.amplitudes.assign(cur.amp.data(), cur.amp.data() + cur.amp.size());
  best.residual_history = {best.fit_residual};
  best.degraded = false;
  best.iterations = 0;
  if (norm == 0.0 || cur.cost <= 1e-28 * norm * norm) return best;

  double lambda = 1e-3;
  int rejections = 0;
  bool accepted_any = false;
  for (int it = 0; it < opt.max_iters; ++it) {
    best.iterations = it + 1;
    Eigen::VectorXd rr(2 * n);
    rr.head(n) = cur.r.real();
    rr.tail(n) = cur.r.imag();
    const Eigen::MatrixXd jtj = cur.jac.transpose() * cur.jac;
    const Eigen::VectorXd grad = cur.jac.transpose() * rr;
    if (grad.norm() <= 1e-14 * norm * norm) break;
    Eigen::MatrixXd lhs = jtj;
    lhs.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
    const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
    std::vector<double> trial = tau;
    for (Eigen::Index c = 0; c < k; ++c) trial[static_cast<std::size_t>(c)] += step(c) * kNs;
    const Eval next = evaluate(trial, true);
    if (next.cost < cur.cost) {
      const double rel_change = (cur.cost - next.cost) / cur.cost;
      tau = trial;
      cur = next;
      accepted_any = true;
      rejections = 0;
      lambda = std::max(lambda / 10.0, 1e-12);
      best.residual_history.push_back(std::sqrt(cur.cost) / norm);
      if (rel_change < opt.rel_tol) break;
    } else {
      lambda *= 10.0;
      if (++rejections >= opt.max_rejections) break;
    }
  }

  if (!accepted_any && rejections >= opt.max_rejections) {
    PoleModel out = init;
    out.degraded = true;
    out.iterations = best.iterations;
    out.residual_history = best.residual_history;
    return out;
  }
  // Keep delays sorted with their amplitudes.
  std::vector<std::size_t> idx(tau.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return tau[a] < tau[b]; });
  best.delays.clear();
  best.amplitudes.clear();
  for (std::size_t i : idx) {
    best.delays.push_back(tau[i]);
    best.amplitudes.push_back(cur.amp(static_cast<Eigen::Index>(i)));
  }
  best.order = static_cast<int>(best.delays.size());
  best.fit_residual = std::sqrt(cur.cost) / norm;
  return best;
}

}  // namespace pmr
