#include "rangevol/ohlc_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rangevol/error.hpp"
#include "rangevol/ged.hpp"

namespace rangevol {

std::vector<double> log_returns(const std::vector<double>& prices) {
  std::vector<double> r;
  if (prices.size() < 2) return r;
  r.reserve(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i) r.push_back(std::log(prices[i] / prices[i - 1]));
  return r;
}

OhlcSeries build_ohlc(const CloseSeries& closes, const FilterState& state,
                      const FigarchParams& params) {
  validate_closes(closes);
  const std::size_t T = closes.size();
  if (T < 2 || state.h.size() != T - 1) {
    throw Error(ErrorCode::LengthMismatch, "filter state must cover every close but the first");
  }
  const double a_lo = ged_quantile(0.25, params.nu);
  const double a_hi = ged_quantile(0.75, params.nu);

  OhlcSeries out;
  out.market_id = closes.market_id;
  out.bars.reserve(T - 1);
  for (std::size_t i = 0; i + 1 < T; ++i) {
    const double h = state.h[i];
    if (!(h >= 0.0) || !std::isfinite(h)) {
      throw Error(ErrorCode::NonFiniteVariance, "negative or non-finite variance in filter state");
    }
    // O = exp(m) with m = x_i + mu, evaluated as C_i * exp(m - x_i) so that
    // mu = 0 reproduces the previous close exactly.
    const double prev = closes.closes[i];
    const double x_prev = std::log(prev);
    const double m = state.m_next.empty() ? x_prev + params.mu : state.m_next[i];
    const double s = std::sqrt(h);
    const double open = prev * std::exp(m - x_prev);
    const double close = closes.closes[i + 1];
    const double high_star = open * std::exp(s * a_hi);
    const double low_star = open * std::exp(s * a_lo);
    PriceBar bar;
    bar.period = closes.periods[i + 1];
    bar.open = open;
    bar.close = close;
    bar.high = std::max({open, close, high_star});
    bar.low = std::min({open, close, low_star});
    out.bars.push_back(bar);
  }
  return out;
}

SynthResult ohlc_from_closes(const CloseSeries& closes, const FitOptions& options) {
  validate_closes(closes);
  if (closes.size() < kMinFilterLength) {
    throw Error(ErrorCode::SeriesTooShort,
                "synthesis needs at least " + std::to_string(kMinFilterLength) + " closes");
  }
  std::vector<double> x(closes.size());
  std::transform(closes.closes.begin(), closes.closes.end(), x.begin(),
                 [](double c) { return std::log(c); });
  const std::vector<double> r = log_returns(closes.closes);

  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());

  SynthResult out;
  if (!has_variation(r)) {
    // No variation: nothing to estimate, emit H = L = O = C.
    out.fit.degenerate = true;
    out.fit.params = FigarchParams{mean, 0.0, 0.0, 0.0, 0.0, 2.0};
    out.fit.truncation = default_truncation(r.size());
    out.fit.warnings.push_back("returns have zero variance; emitting flat bars, nu fixed at 2");
    out.series.market_id = closes.market_id;
    for (std::size_t i = 1; i < closes.size(); ++i) {
      const double c = closes.closes[i];
      out.series.bars.push_back(PriceBar{closes.periods[i], c, c, c, c});
    }
    return out;
  }

  out.fit = fit(r, options);
  FilterOptions fo;
  fo.truncation = out.fit.truncation;
  fo.discard = out.fit.discard;
  const FilterState state = filter(r, out.fit.params, fo, x);
  out.series = build_ohlc(closes, state, out.fit.params);
  validate_series(out.series);
  return out;
}

}  // namespace rangevol
