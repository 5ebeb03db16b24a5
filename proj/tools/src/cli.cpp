#include "rangevol/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "rangevol/detection.hpp"
#include "rangevol/error.hpp"
#include "rangevol/figarch.hpp"
#include "rangevol/io.hpp"
#include "rangevol/ohlc_synth.hpp"
#include "rangevol/range_vol.hpp"
#include "rangevol/series.hpp"
#include "rangevol/simulation.hpp"

namespace rangevol {

namespace {

using Json = nlohmann::ordered_json;

// Bad flag values detected after CLI11 has parsed the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string quoted(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

void report_error(std::ostream& err, std::string_view code, std::string_view message) {
  err << "error: code=" << code << " message=\"" << quoted(message) << "\"\n";
}

struct Options {
  std::string input;
  std::string output;
  std::string config_file;
  int window = 10;
  double annualize = 12.0;
  std::string estimator = "yz";
  int ma_window = 12;
  double upper_pct = 0.85;
  double lower_pct = 0.20;
  std::string mode = "hysteresis";
  int rsi_period = 14;
  std::uint64_t seed = 0;
  bool close_only = false;
  std::string format = "both";
  bool plot = false;
  std::string model;
  int starts = 4;
  // simulate / mc
  std::string kind = "gbm";
  std::size_t periods = 120;
  int steps = 1024;
  double sigma = 0.2;
  double drift = 0.0;
  double start_price = 100.0;
  std::string start = "2000-01";
  std::size_t replications = 10000;
  bool bridge = true;
};

// Options that can also come from a --config JSON file. Keys match the long
// flag names with '-' replaced by '_'.
struct Bindings {
  std::map<std::string, CLI::Option*> by_key;
};

void add_common(CLI::App& sub, Options& o, Bindings& b) {
  b.by_key["input"] = sub.add_option("--input", o.input, "Input CSV file");
  b.by_key["output"] = sub.add_option("--output", o.output, "Output file or directory");
  sub.add_option("--config", o.config_file, "JSON file with the same keys as the flags");
}

void add_estimation(CLI::App& sub, Options& o, Bindings& b) {
  b.by_key["window"] = sub.add_option("--window", o.window, "Rolling window length n")->capture_default_str();
  b.by_key["annualize"] =
      sub.add_option("--annualize", o.annualize, "Periods per year N")->capture_default_str();
  b.by_key["rsi_period"] =
      sub.add_option("--rsi-period", o.rsi_period, "RSI period")->capture_default_str();
  b.by_key["format"] = sub.add_option("--format", o.format, "Report format")
                           ->check(CLI::IsMember({"json", "csv", "both"}))
                           ->capture_default_str();
  b.by_key["plot"] = sub.add_flag("--plot", o.plot, "Also write plot.json");
  b.by_key["close_only"] =
      sub.add_flag("--close-only", o.close_only, "Input holds closes only; synthesize OHLC first");
  b.by_key["seed"] = sub.add_option("--seed", o.seed, "Seed for the fit starts");
}

void add_detection(CLI::App& sub, Options& o, Bindings& b) {
  b.by_key["estimator"] = sub.add_option("--estimator", o.estimator, "Volatility series to screen")
                              ->check(CLI::IsMember({"cc", "p", "gk", "rs", "gkyz", "yz"}))
                              ->capture_default_str();
  b.by_key["ma_window"] =
      sub.add_option("--ma-window", o.ma_window, "Moving-average window")->capture_default_str();
  b.by_key["upper_pct"] =
      sub.add_option("--upper-pct", o.upper_pct, "Upper percentile")->capture_default_str();
  b.by_key["lower_pct"] =
      sub.add_option("--lower-pct", o.lower_pct, "Lower percentile")->capture_default_str();
  b.by_key["mode"] = sub.add_option("--mode", o.mode, "Detection mode")
                         ->check(CLI::IsMember({"strict", "hysteresis"}))
                         ->capture_default_str();
}

// Fills options not given on the command line from the config file.
void apply_config_file(const Options& o, const Bindings& b) {
  if (o.config_file.empty()) return;
  std::ifstream in(o.config_file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + o.config_file);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, "config " + o.config_file + ": " + e.what());
  }
  if (doc.contains("config") && doc["config"].is_object()) doc = doc["config"];
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    const auto it = b.by_key.find(key);
    if (it == b.by_key.end() || it->second->count() > 0 || value.is_null()) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else {
      text = value.dump();
    }
    try {
      it->second->add_result(text);
      it->second->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config key " + key + ": " + e.what());
    }
  }
}

RunConfig run_config(const std::string& command, const Options& o, bool seeded) {
  RunConfig c;
  c.command = command;
  c.input = o.input;
  c.annualization.window_n = o.window;
  c.annualization.annualization_N = o.annualize;
  c.estimator = *parse_estimator(o.estimator);
  c.detection.ma_window = o.ma_window;
  c.detection.upper_pct = o.upper_pct;
  c.detection.lower_pct = o.lower_pct;
  c.detection.mode = *parse_detection_mode(o.mode);
  c.rsi_period = o.rsi_period;
  if (seeded) c.seed = o.seed;
  try {
    c.annualization.validate();
    c.detection.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (c.rsi_period < 1) throw UsageError("--rsi-period must be >= 1");
  return c;
}

void require_input(const Options& o) {
  if (o.input.empty()) throw UsageError("--input is required");
}

ReportFormat report_format(const std::string& f) {
  if (f == "json") return ReportFormat::Json;
  if (f == "csv") return ReportFormat::Csv;
  return ReportFormat::Both;
}

// Writes `text` to --output, or to `out` when no output path was given.
void deliver(const Options& o, const std::string& text, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
  } else {
    write_text_file(o.output, text);
  }
}

FitOptions fit_options(const Options& o, bool seeded) {
  FitOptions f;
  f.starts = o.starts;
  if (seeded) f.seed = o.seed;
  return f;
}

std::string ohlc_text(const OhlcSeries& s) {
  std::ostringstream os;
  write_ohlc_csv(s, os);
  return os.str();
}

std::string close_text(const CloseSeries& s) {
  std::ostringstream os;
  write_close_csv(s, os);
  return os.str();
}

FigarchParams read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open model " + path);
  try {
    const Json j = Json::parse(in);
    return FigarchParams{j.at("mu").get<double>(),    j.at("omega").get<double>(),
                         j.at("beta1").get<double>(), j.at("phi1").get<double>(),
                         j.at("d").get<double>(),     j.at("nu").get<double>()};
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, "model " + path + ": " + e.what());
  }
}

int run_report_like(const std::string& command, const Options& o, bool seeded, bool detect,
                    bool full, std::ostream& out) {
  require_input(o);
  const RunConfig config = run_config(command, o, seeded);
  OhlcSeries series;
  std::optional<FitResult> fitted;
  if (o.close_only) {
    auto synth = ohlc_from_closes(ingest_close_csv(o.input), fit_options(o, seeded));
    series = std::move(synth.series);
    fitted = std::move(synth.fit);
  } else {
    series = ingest_ohlc_csv(o.input);
  }
  const RunReport report = build_report(series, config, detect, std::move(fitted));
  if (o.output.empty()) {
    out << report_json(report);
    return kExitOk;
  }
  const auto written =
      emit_report(report, o.output, full ? ReportFormat::Both : report_format(o.format), full || o.plot);
  for (const auto& p : written) out << p.string() << '\n';
  if (report.detection) {
    out << "flagged " << report.detection->flagged_count() << " months in " << report.episodes.size()
        << " episodes\n";
  }
  return kExitOk;
}

Json mc_json(const McStats& s, const GbmSettings& g, const AnnualizationConfig& a, std::uint64_t seed) {
  Json doc;
  Json scenario;
  scenario["drift"] = g.mu_annual;
  scenario["sigma"] = g.sigma_annual;
  scenario["delta_t"] = g.delta_t;
  scenario["steps"] = g.steps_per_period;
  scenario["periods"] = g.periods;
  scenario["extrema"] = g.extrema == ExtremaMode::Bridge ? "bridge" : "discrete";
  scenario["window"] = a.window_n;
  scenario["annualize"] = a.annualization_N;
  scenario["replications"] = s.replications;
  scenario["seed"] = seed;
  doc["scenario"] = scenario;
  doc["true_variance"] = s.true_variance;
  Json est = Json::object();
  for (const auto& [id, st] : s.estimators) {
    Json e;
    e["mean_variance"] = st.mean_variance;
    e["dispersion"] = st.dispersion;
    e["bias"] = st.bias;
    e["relative_bias"] = st.relative_bias;
    e["windows"] = st.windows;
    est[std::string(to_string(id))] = e;
  }
  doc["estimators"] = est;
  return doc;
}

GbmSettings gbm_settings(const Options& o, bool seeded) {
  GbmSettings g;
  g.mu_annual = o.drift;
  g.sigma_annual = o.sigma;
  if (!(o.annualize > 0.0)) throw UsageError("--annualize must be positive");
  g.delta_t = 1.0 / o.annualize;
  g.steps_per_period = o.steps;
  g.periods = o.periods;
  if (seeded) g.seed = o.seed;
  g.start_price = o.start_price;
  const auto start = YearMonth::parse(o.start);
  if (!start) throw UsageError("--start must be YYYY-MM");
  g.start_period = *start;
  g.extrema = o.bridge ? ExtremaMode::Bridge : ExtremaMode::Discrete;
  return g;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Range-based volatility estimation and stress-episode detection", "rangevol"};
  app.require_subcommand(1);
  Options o;
  std::map<std::string, Bindings> bindings;

  auto* ingest = app.add_subcommand("ingest", "Validate a CSV file and write it back normalized");
  add_common(*ingest, o, bindings["ingest"]);
  ingest->add_flag("--close-only", o.close_only, "Input holds date,close only");

  auto* fit_cmd = app.add_subcommand("fit", "Fit fiGARCH(1,d,1)-GED to a close-only series");
  add_common(*fit_cmd, o, bindings["fit"]);
  bindings["fit"].by_key["seed"] = fit_cmd->add_option("--seed", o.seed, "Seed for the start jitter");
  bindings["fit"].by_key["starts"] =
      fit_cmd->add_option("--starts", o.starts, "Optimizer starts")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Synthesize OHLC bars from a close-only series");
  add_common(*synth, o, bindings["synth"]);
  bindings["synth"].by_key["seed"] = synth->add_option("--seed", o.seed, "Seed for the start jitter");
  bindings["synth"].by_key["starts"] =
      synth->add_option("--starts", o.starts, "Optimizer starts")->capture_default_str();
  bindings["synth"].by_key["model"] =
      synth->add_option("--model", o.model, "Also write the fitted model JSON here");

  auto* estimate_cmd = app.add_subcommand("estimate", "Rolling volatility estimators");
  add_common(*estimate_cmd, o, bindings["estimate"]);
  add_estimation(*estimate_cmd, o, bindings["estimate"]);

  auto* detect = app.add_subcommand("detect", "Estimators plus volatility-shock flags and episodes");
  add_common(*detect, o, bindings["detect"]);
  add_estimation(*detect, o, bindings["detect"]);
  add_detection(*detect, o, bindings["detect"]);

  auto* report = app.add_subcommand("report", "Full report: JSON, CSV tables and plot data");
  add_common(*report, o, bindings["report"]);
  add_estimation(*report, o, bindings["report"]);
  add_detection(*report, o, bindings["report"]);

  auto* simulate = app.add_subcommand("simulate", "Simulate a series in the ingestion schema");
  add_common(*simulate, o, bindings["simulate"]);
  {
    auto& b = bindings["simulate"].by_key;
    b["kind"] = simulate->add_option("--kind", o.kind, "Truth model")
                    ->check(CLI::IsMember({"gbm", "figarch"}))
                    ->capture_default_str();
    b["model"] = simulate->add_option("--model", o.model, "fiGARCH model JSON (kind figarch)");
    b["periods"] = simulate->add_option("--periods", o.periods, "Number of periods")->capture_default_str();
    b["steps"] = simulate->add_option("--steps", o.steps, "GBM steps per period")->capture_default_str();
    b["sigma"] = simulate->add_option("--sigma", o.sigma, "GBM annual volatility")->capture_default_str();
    b["drift"] = simulate->add_option("--drift", o.drift, "GBM annual drift")->capture_default_str();
    b["annualize"] =
        simulate->add_option("--annualize", o.annualize, "Periods per year")->capture_default_str();
    b["start_price"] =
        simulate->add_option("--start-price", o.start_price, "Initial price")->capture_default_str();
    b["start"] = simulate->add_option("--start", o.start, "First month YYYY-MM")->capture_default_str();
    b["seed"] = simulate->add_option("--seed", o.seed, "Random seed");
  }
  simulate->add_flag("!--discrete", o.bridge, "GBM high/low from grid points only");

  auto* mc = app.add_subcommand("mc", "Monte Carlo bias and dispersion of the estimators under GBM");
  add_common(*mc, o, bindings["mc"]);
  {
    auto& b = bindings["mc"].by_key;
    b["replications"] =
        mc->add_option("--replications", o.replications, "Independent series")->capture_default_str();
    b["periods"] = mc->add_option("--periods", o.periods, "Periods per series")->capture_default_str();
    b["steps"] = mc->add_option("--steps", o.steps, "Steps per period")->capture_default_str();
    b["sigma"] = mc->add_option("--sigma", o.sigma, "Annual volatility")->capture_default_str();
    b["drift"] = mc->add_option("--drift", o.drift, "Annual drift")->capture_default_str();
    b["window"] = mc->add_option("--window", o.window, "Rolling window length n")->capture_default_str();
    b["annualize"] = mc->add_option("--annualize", o.annualize, "Periods per year")->capture_default_str();
    b["seed"] = mc->add_option("--seed", o.seed, "Random seed");
  }
  mc->add_flag("!--discrete", o.bridge, "High/low from grid points only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "Usage", e.what());
    err << app.help();
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    apply_config_file(o, bindings[name]);
    const bool seeded = bindings[name].by_key.count("seed") && bindings[name].by_key["seed"]->count() > 0;

    if (name == "ingest") {
      require_input(o);
      deliver(o, o.close_only ? close_text(ingest_close_csv(o.input)) : ohlc_text(ingest_ohlc_csv(o.input)),
              out);
    } else if (name == "fit") {
      require_input(o);
      const CloseSeries closes = ingest_close_csv(o.input);
      deliver(o, fit_json(fit(log_returns(closes.closes), fit_options(o, seeded))), out);
    } else if (name == "synth") {
      require_input(o);
      const SynthResult r = ohlc_from_closes(ingest_close_csv(o.input), fit_options(o, seeded));
      deliver(o, ohlc_text(r.series), out);
      if (!o.model.empty()) write_text_file(o.model, fit_json(r.fit));
      for (const auto& w : r.fit.warnings) err << "warning: " << w << '\n';
    } else if (name == "estimate") {
      return run_report_like(name, o, seeded, false, false, out);
    } else if (name == "detect") {
      return run_report_like(name, o, seeded, true, false, out);
    } else if (name == "report") {
      return run_report_like(name, o, seeded, true, true, out);
    } else if (name == "simulate") {
      if (o.kind == "gbm") {
        deliver(o, ohlc_text(simulate_gbm_ohlc(gbm_settings(o, seeded))), out);
      } else {
        if (o.model.empty()) throw UsageError("--model is required for --kind figarch");
        const auto start = YearMonth::parse(o.start);
        if (!start) throw UsageError("--start must be YYYY-MM");
        const FigarchPath path = simulate_figarch(read_model(o.model), o.periods, seeded ? o.seed : 1);
        CloseSeries closes;
        closes.market_id = "figarch";
        double price = o.start_price;
        YearMonth period = *start;
        closes.periods.push_back(period);
        closes.closes.push_back(price);
        for (double r : path.returns) {
          price *= std::exp(r);
          period = period.next();
          closes.periods.push_back(period);
          closes.closes.push_back(price);
        }
        deliver(o, close_text(closes), out);
      }
    } else if (name == "mc") {
      AnnualizationConfig a;
      a.window_n = o.window;
      a.annualization_N = o.annualize;
      try {
        a.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      const GbmSettings g = gbm_settings(o, seeded);
      const std::uint64_t seed = seeded ? o.seed : 1;
      const McStats stats = mc_estimator_stats(g, a, o.replications, seed);
      deliver(o, mc_json(stats, g, a, seed).dump(2) + "\n", out);
    }
  } catch (const UsageError& e) {
    report_error(err, "Usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    report_error(err, to_string(e.code()), e.what());
    return kExitDataError;
  } catch (const std::exception& e) {
    report_error(err, "Internal", e.what());
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace rangevol
