#pragma once

#include <string>
#include <vector>

#include "rangevol/figarch.hpp"
#include "rangevol/series.hpp"

namespace rangevol {

/// Model-implied OHLC bars. For every period i+1 of `closes`:
///   C = observed close, O = exp(x_i + mu),
///   H = max(O, C, exp(q_0.75)), L = min(O, C, exp(q_0.25)).
/// The first close has no conditional distribution, so the output has one
/// bar fewer than `closes`. `state` must be filtered from the log returns of
/// `closes` (h may be zero to force the vanishing-variance limit).
OhlcSeries build_ohlc(const CloseSeries& closes, const FilterState& state,
                      const FigarchParams& params);

struct SynthResult {
  OhlcSeries series;
  FitResult fit;
};

/// Fit, filter and build in one call. Constant-growth or constant input
/// yields flat bars and a degenerate FitResult with a warning.
SynthResult ohlc_from_closes(const CloseSeries& closes, const FitOptions& options = {});

/// Log returns x_{i+1} - x_i of a price series.
std::vector<double> log_returns(const std::vector<double>& prices);

}  // namespace rangevol
