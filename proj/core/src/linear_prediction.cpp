#include "pmr/linear_prediction.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace pmr {
namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

cvec solve_min_norm(const Mat& a, const Vec& b) {
  Eigen::CompleteOrthogonalDecomposition<Mat> cod;
  cod.setThreshold(1e-11);
  cod.compute(a);
  const Vec sol = cod.solve(b);
  return cvec(sol.data(), sol.data() + sol.size());
}

}  // namespace

LinearPredictor fit_linear_predictor(std::span<const cplx> x, std::size_t order) {
  const std::size_t n = x.size();
  order = std::min(order, n / 3);
  LinearPredictor lp;
  if (order == 0) return lp;
  const std::size_t rows = n - order;

  Mat af(rows, order);
  Vec bf(rows);
  Mat ab(rows, order);
  Vec bb(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t target = r + order;
    bf(r) = x[target];
    for (std::size_t k = 0; k < order; ++k) af(r, k) = x[target - 1 - k];
    bb(r) = x[r];
    for (std::size_t k = 0; k < order; ++k) ab(r, k) = x[r + 1 + k];
  }
  lp.forward = solve_min_norm(af, bf);
  lp.backward = solve_min_norm(ab, bb);
  return lp;
}

cvec extend_by_prediction(std::span<const cplx> x, std::size_t order, std::size_t pad) {
  const std::size_t n = x.size();
  cvec out(n + 2 * pad, cplx{});
  std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(pad));
  if (pad == 0 || n == 0) return out;
  const LinearPredictor lp = fit_linear_predictor(x, order);
  const std::size_t p = lp.forward.size();
  if (p == 0) return out;

  for (std::size_t i = pad + n; i < out.size(); ++i) {
    cplx acc{};
    for (std::size_t k = 0; k < p; ++k) acc += lp.forward[k] * out[i - 1 - k];
    out[i] = acc;
  }
  for (std::size_t j = pad; j-- > 0;) {
    cplx acc{};
    for (std::size_t k = 0; k < p; ++k) acc += lp.backward[k] * out[j + 1 + k];
    out[j] = acc;
  }
  return out;
}

}  // namespace pmr
