#include "rangevol/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "rangevol/error.hpp"

namespace rangevol {

YearMonth YearMonth::from_index(int index) {
  int year = index >= 0 ? index / 12 : -((-index + 11) / 12);
  return YearMonth{year, index - year * 12 + 1};
}

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') return std::nullopt;
  int year = 0;
  int month = 0;
  auto ry = std::from_chars(text.data(), text.data() + 4, year);
  auto rm = std::from_chars(text.data() + 5, text.data() + 7, month);
  if (ry.ec != std::errc{} || ry.ptr != text.data() + 4) return std::nullopt;
  if (rm.ec != std::errc{} || rm.ptr != text.data() + 7) return std::nullopt;
  if (month < 1 || month > 12) return std::nullopt;
  return YearMonth{year, month};
}

std::string YearMonth::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

std::vector<YearMonth> OhlcSeries::periods() const {
  std::vector<YearMonth> out;
  out.reserve(bars.size());
  for (const auto& b : bars) out.push_back(b.period);
  return out;
}

std::vector<double> OhlcSeries::closes() const {
  std::vector<double> out;
  out.reserve(bars.size());
  for (const auto& b : bars) out.push_back(b.close);
  return out;
}

void AnnualizationConfig::validate() const {
  if (window_n < 1) {
    throw Error(ErrorCode::InvalidConfig, "window_n must be >= 1");
  }
  if (!(annualization_N > 0.0) || !std::isfinite(annualization_N)) {
    throw Error(ErrorCode::InvalidConfig, "annualization factor must be positive");
  }
  if (delta_t) {
    const double product = annualization_N * *delta_t;
    if (!(*delta_t > 0.0) || std::abs(product - 1.0) > 0.05) {
      throw Error(ErrorCode::InvalidConfig,
                  "annualization factor must be close to 1/delta_t");
    }
  }
}

namespace {

std::string where(const PriceBar& bar) { return " at " + bar.period.to_string(); }

void check_sequence(const std::vector<YearMonth>& periods) {
  for (std::size_t i = 1; i < periods.size(); ++i) {
    const int step = periods[i].index() - periods[i - 1].index();
    if (step <= 0) {
      throw Error(ErrorCode::NonMonotonicDates,
                  "periods not strictly increasing at " + periods[i].to_string());
    }
    if (step > 1) {
      throw Error(ErrorCode::MonthGap, "missing month(s) before " + periods[i].to_string());
    }
  }
}

}  // namespace

void validate_bar(const PriceBar& bar) {
  for (double v : {bar.open, bar.high, bar.low, bar.close}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NonPositivePrice, "non-positive or non-finite price" + where(bar));
    }
  }
  if (bar.high < std::max(bar.open, bar.close) || bar.low > std::min(bar.open, bar.close)) {
    throw Error(ErrorCode::EnvelopeViolation, "open/close outside [low, high]" + where(bar));
  }
}

const OhlcSeries& validate_series(const OhlcSeries& series) {
  if (series.bars.empty()) throw Error(ErrorCode::EmptySeries, "series has no bars");
  for (const auto& bar : series.bars) validate_bar(bar);
  check_sequence(series.periods());
  return series;
}

const CloseSeries& validate_closes(const CloseSeries& series) {
  if (series.closes.empty()) throw Error(ErrorCode::EmptySeries, "series has no closes");
  if (series.periods.size() != series.closes.size()) {
    throw Error(ErrorCode::LengthMismatch, "periods and closes differ in length");
  }
  for (std::size_t i = 0; i < series.closes.size(); ++i) {
    if (!(series.closes[i] > 0.0) || !std::isfinite(series.closes[i])) {
      throw Error(ErrorCode::NonPositivePrice,
                  "non-positive close at " + series.periods[i].to_string());
    }
  }
  check_sequence(series.periods);
  return series;
}

LogComponents log_components(const OhlcSeries& series) {
  validate_series(series);
  const auto& bars = series.bars;
  LogComponents out;
  const std::size_t n = bars.size();
  out.range.resize(n);
  out.open_close.resize(n);
  out.overnight.resize(n);
  // Ratios first, then log: avoids cancellation in log(a) - log(b) on flat bars.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = bars[i];
    out.range[i] = std::log(b.high / b.low);
    out.open_close[i] = std::log(b.close / b.open);
    if (i > 0) out.overnight[i] = std::log(b.open / bars[i - 1].close);
  }
  return out;
}

}  // namespace rangevol
