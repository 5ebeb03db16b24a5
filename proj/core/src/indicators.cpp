#include "rangevol/indicators.hpp"

#include <algorithm>
#include <cmath>

#include "rangevol/error.hpp"

namespace rangevol {

namespace {

OptionalSeries lift(std::span<const double> values) {
  return OptionalSeries(values.begin(), values.end());
}

// Calls fn(first, t) for every t whose trailing window is fully defined.
template <typename Fn>
void for_each_full_window(std::span<const std::optional<double>> values, std::size_t window, Fn&& fn) {
  std::size_t run = 0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    run = values[t] ? run + 1 : 0;
    if (run >= window) fn(t + 1 - window, t);
  }
}

}  // namespace

OptionalSeries sma(std::span<const std::optional<double>> values, int window) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "sma of an empty series");
  if (window < 1) throw Error(ErrorCode::InvalidConfig, "sma window must be >= 1");
  const auto w = static_cast<std::size_t>(window);
  OptionalSeries out(values.size());
  for_each_full_window(values, w, [&](std::size_t first, std::size_t t) {
    double acc = 0.0;
    for (std::size_t i = first; i <= t; ++i) acc += *values[i];
    out[t] = acc / static_cast<double>(w);
  });
  return out;
}

OptionalSeries sma(std::span<const double> values, int window) {
  const auto lifted = lift(values);
  return sma(std::span<const std::optional<double>>(lifted), window);
}

BollingerBands bollinger(std::span<const std::optional<double>> values, int window, double width) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "bollinger of an empty series");
  if (window < 2) throw Error(ErrorCode::InvalidConfig, "bollinger window must be >= 2");
  const auto w = static_cast<std::size_t>(window);
  BollingerBands out;
  out.mid = sma(values, window);
  out.upper.resize(values.size());
  out.lower.resize(values.size());
  for_each_full_window(values, w, [&](std::size_t first, std::size_t t) {
    const double mid = *out.mid[t];
    double ss = 0.0;
    for (std::size_t i = first; i <= t; ++i) ss += (*values[i] - mid) * (*values[i] - mid);
    const double sd = std::sqrt(ss / static_cast<double>(w - 1));
    out.upper[t] = mid + width * sd;
    out.lower[t] = mid - width * sd;
  });
  return out;
}

BollingerBands bollinger(std::span<const double> values, int window, double width) {
  const auto lifted = lift(values);
  return bollinger(std::span<const std::optional<double>>(lifted), window, width);
}

OptionalSeries rsi(std::span<const double> closes, int period) {
  if (period < 1) throw Error(ErrorCode::InvalidConfig, "rsi period must be >= 1");
  const auto p = static_cast<std::size_t>(period);
  if (closes.size() < p + 1) {
    throw Error(ErrorCode::SeriesTooShort, "rsi needs at least period + 1 closes");
  }
  auto value = [](double gain, double loss) {
    if (loss == 0.0) return gain == 0.0 ? 50.0 : 100.0;
    return 100.0 - 100.0 / (1.0 + gain / loss);
  };
  OptionalSeries out(closes.size());
  double gain = 0.0;
  double loss = 0.0;
  for (std::size_t i = 1; i <= p; ++i) {
    const double change = closes[i] - closes[i - 1];
    gain += std::max(change, 0.0);
    loss += std::max(-change, 0.0);
  }
  gain /= static_cast<double>(p);
  loss /= static_cast<double>(p);
  out[p] = value(gain, loss);
  const double keep = static_cast<double>(p - 1);
  for (std::size_t i = p + 1; i < closes.size(); ++i) {
    const double change = closes[i] - closes[i - 1];
    gain = (gain * keep + std::max(change, 0.0)) / static_cast<double>(p);
    loss = (loss * keep + std::max(-change, 0.0)) / static_cast<double>(p);
    out[i] = value(gain, loss);
  }
  return out;
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "percentile of an empty set");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange, "percentile level must lie in [0,1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double percentile(std::span<const std::optional<double>> values, double p) {
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v) defined.push_back(*v);
  }
  return percentile(std::span<const double>(defined), p);
}

}  // namespace rangevol
