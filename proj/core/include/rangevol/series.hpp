#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rangevol {

/// Calendar month. Ordering and arithmetic go through a linear month index.
struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  static YearMonth from_index(int index);
  /// Parses "YYYY-MM"; returns nullopt on malformed input.
  static std::optional<YearMonth> parse(std::string_view text);

  int index() const { return year * 12 + (month - 1); }
  YearMonth next() const { return from_index(index() + 1); }
  std::string to_string() const;

  friend bool operator==(const YearMonth&, const YearMonth&) = default;
  friend auto operator<=>(const YearMonth& a, const YearMonth& b) {
    return a.index() <=> b.index();
  }
};

struct PriceBar {
  YearMonth period;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
};

/// Monthly OHLC bars for one market, consecutive months, oldest first.
struct OhlcSeries {
  std::string market_id;
  std::vector<PriceBar> bars;

  std::size_t size() const { return bars.size(); }
  bool empty() const { return bars.empty(); }
  std::vector<YearMonth> periods() const;
  std::vector<double> closes() const;
};

/// Close-only monthly series, the input to OHLC synthesis.
struct CloseSeries {
  std::string market_id;
  std::vector<YearMonth> periods;
  std::vector<double> closes;

  std::size_t size() const { return closes.size(); }
};

/// Per-bar log components. `overnight[0]` is always absent.
struct LogComponents {
  std::vector<double> range;                   // d = ln(H/L)
  std::vector<double> open_close;              // c = ln(C/O)
  std::vector<std::optional<double>> overnight;  // o = ln(O/C_prev)

  std::size_t size() const { return range.size(); }
};

struct AnnualizationConfig {
  int window_n = 10;
  double annualization_N = 12.0;
  std::optional<double> delta_t;  // years per period; defaults to 1/N

  double period_years() const { return delta_t.value_or(1.0 / annualization_N); }
  /// Throws InvalidConfig when window_n < 1, N <= 0 or N*delta_t is far from 1.
  void validate() const;
};

/// Checks every bar and the month sequence. Returns the series unchanged.
const OhlcSeries& validate_series(const OhlcSeries& series);
void validate_bar(const PriceBar& bar);
/// Positivity and consecutive-month checks for close-only input.
const CloseSeries& validate_closes(const CloseSeries& series);

LogComponents log_components(const OhlcSeries& series);

}  // namespace rangevol
