#include "rangevol/range_vol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rangevol/error.hpp"

namespace rangevol {

namespace {

const double kTwoLn2Minus1 = 2.0 * std::numbers::ln2 - 1.0;

// Mean and Bessel-corrected variance of v[first, first + n).
double sample_variance(const std::vector<double>& v, std::size_t first, std::size_t n) {
  double mean = 0.0;
  for (std::size_t i = first; i < first + n; ++i) mean += v[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = first; i < first + n; ++i) ss += (v[i] - mean) * (v[i] - mean);
  return ss / static_cast<double>(n - 1);
}

double window_mean(const std::vector<double>& v, std::size_t first, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = first; i < first + n; ++i) acc += v[i];
  return acc / static_cast<double>(n);
}

VolSeries make_series(EstimatorId id, const OhlcSeries& series, const AnnualizationConfig& config) {
  VolSeries out;
  out.estimator = id;
  out.periods = series.periods();
  out.values.assign(series.size(), std::nullopt);
  out.variance.assign(series.size(), std::nullopt);
  out.config = config;
  return out;
}

// Fills variance/values from index `first` on, with window variances from `fn(t)`.
template <typename Fn>
void fill(VolSeries& out, std::size_t first, Fn&& fn) {
  const std::size_t T = out.values.size();
  out.warmup = std::min(first, T);
  const double root_n = std::sqrt(out.config.annualization_N);
  for (std::size_t t = first; t < T; ++t) {
    const double v = fn(t);
    out.variance[t] = v;
    if (v >= 0.0) {
      out.values[t] = root_n * std::sqrt(v);
    } else {
      out.diagnostics.push_back("negative window variance at " + out.periods[t].to_string() +
                                "; value reported absent");
    }
  }
}

void require_window(const AnnualizationConfig& config, int minimum, const char* who) {
  config.validate();
  if (config.window_n < minimum) {
    throw Error(ErrorCode::WindowTooShort, std::string(who) + " needs a window of at least " +
                                               std::to_string(minimum) + " periods");
  }
}

// Overnight returns of bars 1..T-1; bar 0 never has one.
std::vector<double> defined_overnight(const LogComponents& lc) {
  std::vector<double> o(lc.size(), 0.0);
  for (std::size_t i = 1; i < lc.size(); ++i) {
    if (!lc.overnight[i]) {
      throw Error(ErrorCode::MissingOvernight, "overnight return missing at bar " + std::to_string(i));
    }
    o[i] = *lc.overnight[i];
  }
  return o;
}

}  // namespace

std::string_view to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::CC: return "cc";
    case EstimatorId::P: return "p";
    case EstimatorId::GK: return "gk";
    case EstimatorId::RS: return "rs";
    case EstimatorId::GKYZ: return "gkyz";
    case EstimatorId::YZ: return "yz";
  }
  return "?";
}

std::optional<EstimatorId> parse_estimator(std::string_view name) {
  for (EstimatorId id : kAllEstimators) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

std::size_t VolSeries::defined_count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](const auto& v) { return v.has_value(); }));
}

double parkinson_term(double range) { return range * range / (4.0 * std::numbers::ln2); }

double garman_klass_term(double range, double open_close) {
  return 0.5 * range * range - kTwoLn2Minus1 * open_close * open_close;
}

double rogers_satchell_term(const PriceBar& b) {
  return std::log(b.high / b.close) * std::log(b.high / b.open) +
         std::log(b.low / b.close) * std::log(b.low / b.open);
}

double yz_weight(int n, double alpha) {
  if (n < 2) throw Error(ErrorCode::WindowTooShort, "Yang-Zhang weight needs n >= 2");
  const double nn = static_cast<double>(n);
  return (alpha - 1.0) / (alpha + (nn + 1.0) / (nn - 1.0));
}

VolSeries close_to_close(const OhlcSeries& series, const AnnualizationConfig& config) {
  // n prices give m = n - 1 arithmetic returns; the sample variance needs m >= 2
  require_window(config, 3, "close-to-close");
  validate_series(series);
  const std::size_t n = static_cast<std::size_t>(config.window_n);
  const auto& bars = series.bars;
  std::vector<double> r(bars.size(), 0.0);
  for (std::size_t i = 1; i < bars.size(); ++i) {
    r[i] = (bars[i].close - bars[i - 1].close) / bars[i - 1].close;
  }
  VolSeries out = make_series(EstimatorId::CC, series, config);
  fill(out, n - 1, [&](std::size_t t) { return sample_variance(r, t - (n - 1) + 1, n - 1); });
  return out;
}

VolSeries parkinson(const OhlcSeries& series, const AnnualizationConfig& config) {
  require_window(config, 1, "Parkinson");
  const LogComponents lc = log_components(series);
  std::vector<double> term(lc.size());
  std::transform(lc.range.begin(), lc.range.end(), term.begin(), parkinson_term);
  const std::size_t n = static_cast<std::size_t>(config.window_n);
  VolSeries out = make_series(EstimatorId::P, series, config);
  fill(out, n - 1, [&](std::size_t t) { return window_mean(term, t + 1 - n, n); });
  return out;
}

VolSeries garman_klass(const OhlcSeries& series, const AnnualizationConfig& config) {
  require_window(config, 1, "Garman-Klass");
  const LogComponents lc = log_components(series);
  std::vector<double> term(lc.size());
  for (std::size_t i = 0; i < lc.size(); ++i) term[i] = garman_klass_term(lc.range[i], lc.open_close[i]);
  const std::size_t n = static_cast<std::size_t>(config.window_n);
  VolSeries out = make_series(EstimatorId::GK, series, config);
  fill(out, n - 1, [&](std::size_t t) { return window_mean(term, t + 1 - n, n); });
  return out;
}

VolSeries rogers_satchell(const OhlcSeries& series, const AnnualizationConfig& config) {
  require_window(config, 1, "Rogers-Satchell");
  validate_series(series);
  std::vector<double> term(series.size());
  std::transform(series.bars.begin(), series.bars.end(), term.begin(), rogers_satchell_term);
  const std::size_t n = static_cast<std::size_t>(config.window_n);
  VolSeries out = make_series(EstimatorId::RS, series, config);
  fill(out, n - 1, [&](std::size_t t) { return window_mean(term, t + 1 - n, n); });
  return out;
}

VolSeries gk_yang_zhang(const OhlcSeries& series, const AnnualizationConfig& config) {
  require_window(config, 1, "Garman-Klass-Yang-Zhang");
  const LogComponents lc = log_components(series);
  const std::vector<double> o = defined_overnight(lc);
  std::vector<double> term(lc.size());
  for (std::size_t i = 0; i < lc.size(); ++i) {
    term[i] = o[i] * o[i] + garman_klass_term(lc.range[i], lc.open_close[i]);
  }
  const std::size_t n = static_cast<std::size_t>(config.window_n);
  VolSeries out = make_series(EstimatorId::GKYZ, series, config);
  // windows start at bar 1, the first bar with an overnight return
  fill(out, n, [&](std::size_t t) { return window_mean(term, t + 1 - n, n); });
  return out;
}

VolSeries yang_zhang(const OhlcSeries& series, const AnnualizationConfig& config, double alpha) {
  require_window(config, 2, "Yang-Zhang");
  const LogComponents lc = log_components(series);
  const std::vector<double> o = defined_overnight(lc);
  std::vector<double> rs(series.size());
  std::transform(series.bars.begin(), series.bars.end(), rs.begin(), rogers_satchell_term);
  const std::size_t n = static_cast<std::size_t>(config.window_n);
  const double k = yz_weight(config.window_n, alpha);
  VolSeries out = make_series(EstimatorId::YZ, series, config);
  fill(out, n, [&](std::size_t t) {
    const std::size_t first = t + 1 - n;
    return sample_variance(o, first, n) + k * sample_variance(lc.open_close, first, n) +
           (1.0 - k) * window_mean(rs, first, n);
  });
  return out;
}

VolSeries estimate(EstimatorId id, const OhlcSeries& series, const AnnualizationConfig& config) {
  switch (id) {
    case EstimatorId::CC: return close_to_close(series, config);
    case EstimatorId::P: return parkinson(series, config);
    case EstimatorId::GK: return garman_klass(series, config);
    case EstimatorId::RS: return rogers_satchell(series, config);
    case EstimatorId::GKYZ: return gk_yang_zhang(series, config);
    case EstimatorId::YZ: return yang_zhang(series, config);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown estimator");
}

std::map<EstimatorId, VolSeries> estimate_all(const OhlcSeries& series,
                                              const AnnualizationConfig& config) {
  std::map<EstimatorId, VolSeries> out;
  for (EstimatorId id : kAllEstimators) out.emplace(id, estimate(id, series, config));
  return out;
}

}  // namespace rangevol
