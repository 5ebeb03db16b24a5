#include "rangevol/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rangevol/error.hpp"

namespace rangevol {

using Json = nlohmann::ordered_json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t row, const std::string& column,
                              const std::string& what) {
  throw Error(ErrorCode::ParseError, source + ": row " + std::to_string(row) + ", column '" +
                                         column + "': " + what);
}

struct Table {
  std::map<std::string, std::size_t> columns;
  struct Row {
    std::size_t line;
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;
};

Table read_table(std::istream& in, const std::string& source,
                 const std::vector<std::string>& required) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (!header) {
      for (std::size_t i = 0; i < cells.size(); ++i) table.columns[lower(cells[i])] = i;
      for (const auto& name : required) {
        if (!table.columns.contains(name)) parse_error(source, line_no, name, "missing from header");
      }
      header = true;
      continue;
    }
    table.rows.push_back({line_no, std::move(cells)});
  }
  if (!header) throw Error(ErrorCode::ParseError, source + ": empty file, expected a header row");
  return table;
}

const std::string& cell(const Table& t, const Table::Row& row, const std::string& column,
                        const std::string& source) {
  const std::size_t idx = t.columns.at(column);
  if (idx >= row.cells.size()) parse_error(source, row.line, column, "missing value");
  return row.cells[idx];
}

double parse_price(const Table& t, const Table::Row& row, const std::string& column,
                   const std::string& source) {
  const std::string& text = cell(t, row, column, source);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    parse_error(source, row.line, column, "not a decimal number: '" + text + "'");
  }
  return v;
}

YearMonth parse_date(const Table& t, const Table::Row& row, const std::string& source) {
  const std::string& text = cell(t, row, "date", source);
  const auto ym = YearMonth::parse(text);
  if (!ym) parse_error(source, row.line, "date", "expected YYYY-MM, got '" + text + "'");
  return *ym;
}

std::string market_of(const Table& t, const std::string& source) {
  if (t.columns.contains("market_id") && !t.rows.empty()) {
    const std::size_t idx = t.columns.at("market_id");
    if (idx < t.rows.front().cells.size() && !t.rows.front().cells[idx].empty()) {
      return t.rows.front().cells[idx];
    }
  }
  return std::filesystem::path(source).stem().string();
}

template <typename Record>
void sort_unique(std::vector<Record>& records, const std::string& source) {
  std::stable_sort(records.begin(), records.end(),
                   [](const Record& a, const Record& b) { return a.period < b.period; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].period == records[i - 1].period) {
      throw Error(ErrorCode::DuplicateMonth,
                  source + ": month " + records[i].period.to_string() + " appears more than once");
    }
  }
}

template <typename Fn>
void as_validation_error(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, std::string(to_string(e.code())) + ": " + e.what());
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string opt_text(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

const OptionalSeries* vol_sma(const RunReport& r) {
  return r.detection ? &r.detection->moving_average : nullptr;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

OhlcSeries parse_ohlc_csv(std::istream& in, const std::string& source) {
  const Table t = read_table(in, source, {"date", "open", "high", "low", "close"});
  OhlcSeries series;
  series.market_id = market_of(t, source);
  for (const auto& row : t.rows) {
    PriceBar b;
    b.period = parse_date(t, row, source);
    b.open = parse_price(t, row, "open", source);
    b.high = parse_price(t, row, "high", source);
    b.low = parse_price(t, row, "low", source);
    b.close = parse_price(t, row, "close", source);
    series.bars.push_back(b);
  }
  sort_unique(series.bars, source);
  as_validation_error([&] { validate_series(series); });
  return series;
}

CloseSeries parse_close_csv(std::istream& in, const std::string& source) {
  const Table t = read_table(in, source, {"date", "close"});
  struct Rec {
    YearMonth period;
    double close;
  };
  std::vector<Rec> recs;
  for (const auto& row : t.rows) recs.push_back({parse_date(t, row, source), parse_price(t, row, "close", source)});
  sort_unique(recs, source);
  CloseSeries series;
  series.market_id = market_of(t, source);
  for (const auto& r : recs) {
    series.periods.push_back(r.period);
    series.closes.push_back(r.close);
  }
  as_validation_error([&] { validate_closes(series); });
  return series;
}

OhlcSeries ingest_ohlc_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_ohlc_csv(in, path.string());
}

CloseSeries ingest_close_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_close_csv(in, path.string());
}

std::variant<OhlcSeries, CloseSeries> ingest_csv(const std::filesystem::path& path, IngestMode mode) {
  if (mode == IngestMode::Ohlc) return ingest_ohlc_csv(path);
  return ingest_close_csv(path);
}

void write_ohlc_csv(const OhlcSeries& series, std::ostream& out) {
  out << "date,open,high,low,close\n";
  for (const auto& b : series.bars) {
    out << b.period.to_string() << ',' << format_number(b.open) << ',' << format_number(b.high)
        << ',' << format_number(b.low) << ',' << format_number(b.close) << '\n';
  }
}

void write_close_csv(const CloseSeries& series, std::ostream& out) {
  out << "date,close\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.periods[i].to_string() << ',' << format_number(series.closes[i]) << '\n';
  }
}

RunReport build_report(const OhlcSeries& series, const RunConfig& config, bool detect,
                       std::optional<FitResult> fit) {
  validate_series(series);
  RunReport r;
  r.config = config;
  r.series = series;
  r.fit = std::move(fit);
  for (EstimatorId id : kAllEstimators) {
    try {
      r.vols.emplace(id, estimate(id, series, config.annualization));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WindowTooShort || (detect && id == config.estimator)) throw;
      VolSeries empty;
      empty.estimator = id;
      empty.periods = series.periods();
      empty.values.assign(series.size(), std::nullopt);
      empty.variance.assign(series.size(), std::nullopt);
      empty.diagnostics.push_back(std::string("omitted: ") + e.what());
      r.vols.emplace(id, std::move(empty));
    }
  }
  for (const auto& [id, vol] : r.vols) {
    for (const auto& d : vol.diagnostics) r.diagnostics.push_back(std::string(to_string(id)) + ": " + d);
  }
  const std::vector<double> closes = series.closes();
  r.price_sma = sma(closes, config.price_ma_window);
  if (closes.size() >= 2) {
    r.bollinger = bollinger(closes, config.price_ma_window, config.bollinger_width);
  } else {
    r.bollinger = {OptionalSeries(closes.size()), OptionalSeries(closes.size()), OptionalSeries(closes.size())};
  }
  if (closes.size() >= static_cast<std::size_t>(config.rsi_period) + 1) {
    r.rsi = rsi(closes, config.rsi_period);
  } else {
    r.rsi.assign(closes.size(), std::nullopt);
    r.diagnostics.push_back("rsi: series shorter than period + 1; omitted");
  }
  if (detect) {
    const VolSeries& vol = r.vols.at(config.estimator);
    r.detection = flag_months(vol, config.detection);
    r.episodes = segment_episodes(r.detection->flags, vol);
  }
  return r;
}

std::string fit_json(const FitResult& f) {
  Json j;
  j["mu"] = f.params.mu;
  j["omega"] = f.params.omega;
  j["beta1"] = f.params.beta1;
  j["phi1"] = f.params.phi1;
  j["d"] = f.params.d;
  j["nu"] = f.params.nu;
  j["loglik"] = f.loglik;
  j["converged"] = f.converged;
  j["iterations"] = f.iterations;
  j["restarts_used"] = f.restarts_used;
  j["truncation"] = f.truncation;
  j["discard"] = f.discard;
  j["degenerate"] = f.degenerate;
  j["warnings"] = f.warnings;
  return j.dump(2) + "\n";
}

std::string report_json(const RunReport& r) {
  Json doc;
  Json cfg;
  cfg["command"] = r.config.command;
  cfg["input"] = r.config.input;
  cfg["market_id"] = r.series.market_id;
  cfg["window"] = r.config.annualization.window_n;
  cfg["annualize"] = r.config.annualization.annualization_N;
  cfg["estimator"] = std::string(to_string(r.config.estimator));
  cfg["ma_window"] = r.config.detection.ma_window;
  cfg["upper_pct"] = r.config.detection.upper_pct;
  cfg["lower_pct"] = r.config.detection.lower_pct;
  cfg["mode"] = std::string(to_string(r.config.detection.mode));
  cfg["rsi_period"] = r.config.rsi_period;
  cfg["seed"] = r.config.seed ? Json(*r.config.seed) : Json(nullptr);
  doc["config"] = cfg;

  const OptionalSeries* vsma = vol_sma(r);
  Json series = Json::object();
  for (std::size_t t = 0; t < r.series.size(); ++t) {
    const auto& b = r.series.bars[t];
    Json row;
    row["open"] = b.open;
    row["high"] = b.high;
    row["low"] = b.low;
    row["close"] = b.close;
    for (const auto& [id, vol] : r.vols) row[std::string(to_string(id))] = opt(vol.values[t]);
    row["price_sma"] = opt(r.price_sma[t]);
    row["bb_upper"] = opt(r.bollinger.upper[t]);
    row["bb_lower"] = opt(r.bollinger.lower[t]);
    row["rsi"] = opt(r.rsi[t]);
    if (vsma) row["vol_sma"] = opt((*vsma)[t]);
    series[b.period.to_string()] = row;
  }
  doc["series"] = series;

  if (r.detection) {
    Json th;
    th["estimator"] = std::string(to_string(r.config.estimator));
    th["upper_pct"] = r.detection->config.upper_pct;
    th["upper"] = r.detection->upper_threshold;
    th["lower_pct"] = r.detection->config.lower_pct;
    th["lower"] = r.detection->lower_threshold;
    doc["thresholds"] = th;
    Json flags = Json::object();
    for (std::size_t t = 0; t < r.series.size(); ++t) {
      flags[r.series.bars[t].period.to_string()] = static_cast<bool>(r.detection->flags[t]);
    }
    doc["flags"] = flags;
  } else {
    doc["thresholds"] = nullptr;
    doc["flags"] = nullptr;
  }
  Json episodes = Json::array();
  for (const auto& e : r.episodes) {
    episodes.push_back(Json{{"start", e.start.to_string()},
                            {"end", e.end.to_string()},
                            {"peak_month", e.peak_month.to_string()},
                            {"peak_vol", e.peak_vol},
                            {"length", e.length}});
  }
  doc["episodes"] = episodes;
  doc["fit"] = r.fit ? Json::parse(fit_json(*r.fit)) : Json(nullptr);
  doc["diagnostics"] = r.diagnostics;
  return doc.dump(2) + "\n";
}

void write_report_csv(const RunReport& r, std::ostream& out) {
  out << "date,open,high,low,close";
  for (const auto& [id, vol] : r.vols) out << ',' << to_string(id);
  out << ",price_sma,bb_upper,bb_lower,rsi,vol_sma,flag\n";
  const OptionalSeries* vsma = vol_sma(r);
  for (std::size_t t = 0; t < r.series.size(); ++t) {
    const auto& b = r.series.bars[t];
    out << b.period.to_string() << ',' << format_number(b.open) << ',' << format_number(b.high)
        << ',' << format_number(b.low) << ',' << format_number(b.close);
    for (const auto& [id, vol] : r.vols) out << ',' << opt_text(vol.values[t]);
    out << ',' << opt_text(r.price_sma[t]) << ',' << opt_text(r.bollinger.upper[t]) << ','
        << opt_text(r.bollinger.lower[t]) << ',' << opt_text(r.rsi[t]) << ','
        << (vsma ? opt_text((*vsma)[t]) : std::string()) << ',';
    if (r.detection) out << (r.detection->flags[t] ? 1 : 0);
    out << '\n';
  }
}

void write_episodes_csv(const std::vector<Episode>& episodes, std::ostream& out) {
  out << "start,end,peak_month,peak_vol,length\n";
  for (const auto& e : episodes) {
    out << e.start.to_string() << ',' << e.end.to_string() << ',' << e.peak_month.to_string() << ','
        << format_number(e.peak_vol) << ',' << e.length << '\n';
  }
}

std::string plot_data_json(const RunReport& r) {
  Json doc;
  doc["market_id"] = r.series.market_id;
  Json candles = Json::array();
  for (const auto& b : r.series.bars) {
    candles.push_back(Json::array({b.period.to_string(), b.open, b.high, b.low, b.close}));
  }
  auto column = [](const OptionalSeries& s) {
    Json a = Json::array();
    for (const auto& v : s) a.push_back(opt(v));
    return a;
  };
  Json price_panel;
  price_panel["candles"] = candles;
  price_panel["moving_average"] = column(r.price_sma);
  price_panel["bollinger_upper"] = column(r.bollinger.upper);
  price_panel["bollinger_lower"] = column(r.bollinger.lower);
  doc["price_panel"] = price_panel;

  Json rsi_panel;
  rsi_panel["rsi"] = column(r.rsi);
  rsi_panel["levels"] = Json::array({30, 70});
  doc["rsi_panel"] = rsi_panel;

  Json vol_panels = Json::object();
  for (const auto& [id, vol] : r.vols) vol_panels[std::string(to_string(id))] = column(vol.values);
  doc["volatility_panels"] = vol_panels;

  Json signal;
  signal["estimator"] = std::string(to_string(r.config.estimator));
  signal["values"] = column(r.vols.at(r.config.estimator).values);
  if (r.detection) {
    signal["moving_average"] = column(r.detection->moving_average);
    Json segments = Json::array();
    for (const auto& e : r.episodes) {
      segments.push_back(Json::array({e.start.to_string(), e.end.to_string()}));
    }
    signal["episodes"] = segments;
  }
  doc["signal_panel"] = signal;
  return doc.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<std::filesystem::path> emit_report(const RunReport& report,
                                               const std::filesystem::path& dir,
                                               ReportFormat format, bool with_plot) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  if (format != ReportFormat::Csv) {
    written.push_back(dir / "report.json");
    write_text_file(written.back(), report_json(report));
  }
  if (format != ReportFormat::Json) {
    std::ostringstream wide;
    write_report_csv(report, wide);
    written.push_back(dir / "report.csv");
    write_text_file(written.back(), wide.str());
    std::ostringstream eps;
    write_episodes_csv(report.episodes, eps);
    written.push_back(dir / "episodes.csv");
    write_text_file(written.back(), eps.str());
  }
  if (with_plot) {
    written.push_back(dir / "plot.json");
    write_text_file(written.back(), plot_data_json(report));
  }
  return written;
}

}  // namespace rangevol
