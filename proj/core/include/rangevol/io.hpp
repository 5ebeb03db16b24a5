#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rangevol/detection.hpp"
#include "rangevol/figarch.hpp"
#include "rangevol/indicators.hpp"
#include "rangevol/range_vol.hpp"
#include "rangevol/series.hpp"

namespace rangevol {

enum class IngestMode { Ohlc, CloseOnly };

// CSV input: header row, columns matched by name (case-insensitive).
//   ohlc mode:       date,open,high,low,close
//   close-only mode: date,close
// An optional market_id column names the market; otherwise the file stem is
// used. Extra columns are ignored. Rows are sorted by date; a repeated month
// is a DuplicateMonth error, a malformed cell a ParseError naming row and
// column, and a bar failing validation a ValidationError.
OhlcSeries parse_ohlc_csv(std::istream& in, const std::string& source = "<stream>");
CloseSeries parse_close_csv(std::istream& in, const std::string& source = "<stream>");
OhlcSeries ingest_ohlc_csv(const std::filesystem::path& path);
CloseSeries ingest_close_csv(const std::filesystem::path& path);
std::variant<OhlcSeries, CloseSeries> ingest_csv(const std::filesystem::path& path, IngestMode mode);

void write_ohlc_csv(const OhlcSeries& series, std::ostream& out);
void write_close_csv(const CloseSeries& series, std::ostream& out);

/// Shortest text that parses back to exactly `v`.
std::string format_number(double v);

struct RunConfig {
  std::string command;
  std::string input;
  AnnualizationConfig annualization;
  DetectionConfig detection;
  EstimatorId estimator = EstimatorId::YZ;
  int rsi_period = 14;
  int price_ma_window = 12;
  double bollinger_width = 2.0;
  std::optional<std::uint64_t> seed;
};

struct RunReport {
  RunConfig config;
  OhlcSeries series;
  std::map<EstimatorId, VolSeries> vols;
  OptionalSeries price_sma;
  BollingerBands bollinger;
  OptionalSeries rsi;
  std::optional<DetectionResult> detection;
  std::vector<Episode> episodes;
  std::optional<FitResult> fit;
  std::vector<std::string> diagnostics;
};

/// Estimates, overlays and (when `detect`) flags and episodes for one series.
RunReport build_report(const OhlcSeries& series, const RunConfig& config, bool detect,
                       std::optional<FitResult> fit = std::nullopt);

/// Report document with top-level keys config, series, thresholds, flags,
/// episodes, fit (plus diagnostics). Dates are YYYY-MM, absent values null.
std::string report_json(const RunReport& report);
/// Wide per-month table: date, OHLC, each estimator, overlays, flag.
void write_report_csv(const RunReport& report, std::ostream& out);
void write_episodes_csv(const std::vector<Episode>& episodes, std::ostream& out);
/// Candlestick tuples plus overlay series for external chart renderers.
std::string plot_data_json(const RunReport& report);

enum class ReportFormat { Json, Csv, Both };

/// Writes report.json and/or report.csv + episodes.csv, plus plot.json when
/// `with_plot`, into `dir`. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> emit_report(const RunReport& report,
                                               const std::filesystem::path& dir,
                                               ReportFormat format, bool with_plot = false);

std::string fit_json(const FitResult& fit);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace rangevol
