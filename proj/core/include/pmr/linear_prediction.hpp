#pragma once

// Forward/backward least-squares linear prediction, used to extend short
// records before FIR filtering and spectral phase correction so that the
// filters see steady-state input at the record edges.

#include <cstddef>
#include <span>

#include "pmr/dsp.hpp"

namespace pmr {

struct LinearPredictor {
  /// x[n] ≈ Σ_k forward[k]·x[n-1-k]
  cvec forward;
  /// x[n] ≈ Σ_k backward[k]·x[n+1+k]
  cvec backward;
};

/// Minimum-norm least-squares predictors of the given order. Orders larger
/// than a third of the record are clamped.
LinearPredictor fit_linear_predictor(std::span<const cplx> x, std::size_t order);

/// Returns `pad` backward-predicted samples, the record itself, then `pad`
/// forward-predicted samples.
cvec extend_by_prediction(std::span<const cplx> x, std::size_t order, std::size_t pad);

}  // namespace pmr
