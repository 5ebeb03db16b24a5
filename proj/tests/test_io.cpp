#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rangevol/io.hpp"
#include "rangevol/simulation.hpp"
#include "test_util.hpp"

using namespace rangevol;

namespace {

OhlcSeries parse(const std::string& text) {
  std::istringstream in(text);
  return parse_ohlc_csv(in, "test.csv");
}

std::string error_message(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

OhlcSeries sample_series(std::size_t n = 60) {
  GbmSettings g;
  g.periods = n;
  g.steps_per_period = 64;
  g.seed = 21;
  g.sigma_annual = 0.3;
  return simulate_gbm_ohlc(g);
}

}  // namespace

TEST_CASE("parsing OHLC CSV") {
  SUBCASE("three rows, three bars") {
    const auto s = parse("date,open,high,low,close\n2020-01,10,12,9,11\n2020-02,11,13,10,12\n2020-03,12,12.5,11,11.5\n");
    REQUIRE(s.size() == 3);
    CHECK(s.bars[0].period == YearMonth{2020, 1});
    CHECK(s.bars[2].close == 11.5);
    CHECK(s.market_id == "test");
  }
  SUBCASE("column order, case and extras do not matter") {
    const auto s = parse("Close,Extra,LOW,high,Open,Date,market_id\n11,x,9,12,10,2020-01,ABC\n");
    REQUIRE(s.size() == 1);
    CHECK(s.bars[0].open == 10.0);
    CHECK(s.bars[0].low == 9.0);
    CHECK(s.market_id == "ABC");
  }
  SUBCASE("rows are sorted by month") {
    const auto s = parse("date,open,high,low,close\n2020-02,11,13,10,12\n2020-01,10,12,9,11\n");
    CHECK(s.bars[0].period == YearMonth{2020, 1});
    CHECK(s.bars[1].close == 12.0);
  }
  SUBCASE("missing column is named") {
    const std::string text = "date,open,low,close\n2020-01,10,9,11\n";
    CHECK_ERROR_CODE(parse(text), ErrorCode::ParseError);
    CHECK(error_message(text).find("high") != std::string::npos);
  }
  SUBCASE("malformed cells name row and column") {
    const std::string text = "date,open,high,low,close\n2020-01,10,12,9,11\n2020-02,11,abc,10,12\n";
    CHECK_ERROR_CODE(parse(text), ErrorCode::ParseError);
    const auto msg = error_message(text);
    CHECK(msg.find("high") != std::string::npos);
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK_ERROR_CODE(parse("date,open,high,low,close\n2020-13,10,12,9,11\n"), ErrorCode::ParseError);
    CHECK_ERROR_CODE(parse(""), ErrorCode::ParseError);
  }
  SUBCASE("duplicates and invalid bars") {
    CHECK_ERROR_CODE(parse("date,open,high,low,close\n2020-01,10,12,9,11\n2020-01,10,12,9,11\n"),
                     ErrorCode::DuplicateMonth);
    CHECK_ERROR_CODE(parse("date,open,high,low,close\n2020-01,10,10.5,9,11\n"), ErrorCode::ValidationError);
    CHECK_ERROR_CODE(parse("date,open,high,low,close\n2020-01,-1,12,9,11\n"), ErrorCode::ValidationError);
  }
}

TEST_CASE("close-only ingestion") {
  std::istringstream in("date,close\n2019-12,100\n2020-01,101.5\n2020-02,99\n");
  const auto c = parse_close_csv(in, "idx.csv");
  REQUIRE(c.size() == 3);
  CHECK(c.closes[1] == 101.5);
  CHECK(c.periods[0] == YearMonth{2019, 12});
  std::istringstream bad("date,close\n2020-01,0\n");
  CHECK_ERROR_CODE(parse_close_csv(bad), ErrorCode::ValidationError);

  std::ostringstream out;
  write_close_csv(c, out);
  std::istringstream back(out.str());
  const auto c2 = parse_close_csv(back);
  CHECK(c2.closes == c.closes);
  CHECK(c2.periods == c.periods);
}

TEST_CASE("file ingestion") {
  const auto dir = std::filesystem::temp_directory_path() / "rangevol_test_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "SPX.csv";
  {
    std::ofstream f(path);
    f << "date,open,high,low,close\n2020-01,10,12,9,11\n";
  }
  CHECK(ingest_ohlc_csv(path).market_id == "SPX");
  CHECK(std::holds_alternative<OhlcSeries>(ingest_csv(path, IngestMode::Ohlc)));
  CHECK(std::holds_alternative<CloseSeries>(ingest_csv(path, IngestMode::CloseOnly)));
  CHECK_ERROR_CODE(ingest_ohlc_csv(dir / "missing.csv"), ErrorCode::IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_number round-trips") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::exp(u(gen)) * (i % 2 ? 1.0 : -1.0);
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(100.0) == "100");
  CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("CSV round trip preserves estimates exactly") {
  const auto s = sample_series();
  std::ostringstream out;
  write_ohlc_csv(s, out);
  const auto back = parse(out.str());
  REQUIRE(back.size() == s.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    CHECK(back.bars[t].open == s.bars[t].open);
    CHECK(back.bars[t].high == s.bars[t].high);
    CHECK(back.bars[t].low == s.bars[t].low);
    CHECK(back.bars[t].close == s.bars[t].close);
  }
  const auto a = estimate_all(s, {});
  const auto b = estimate_all(back, {});
  for (const auto& [id, v] : a) {
    CHECK(b.at(id).values == v.values);
    CHECK(b.at(id).variance == v.variance);
  }
}

TEST_CASE("report JSON") {
  const auto s = sample_series();
  RunConfig cfg;
  cfg.command = "detect";
  const auto report = build_report(s, cfg, true);
  const auto doc = nlohmann::json::parse(report_json(report));
  for (const char* key : {"config", "series", "thresholds", "flags", "episodes", "fit"}) CHECK(doc.contains(key));
  CHECK(doc["fit"].is_null());
  CHECK(doc["config"]["window"] == 10);

  // thresholds are the type-7 percentiles of the defined YZ values
  std::vector<double> yz;
  for (const auto& v : report.vols.at(EstimatorId::YZ).values) {
    if (v) yz.push_back(*v);
  }
  CHECK(doc["thresholds"]["upper"].get<double>() == doctest::Approx(oracle::percentile(yz, 0.85)).epsilon(1e-14));
  CHECK(doc["thresholds"]["lower"].get<double>() == doctest::Approx(oracle::percentile(yz, 0.20)).epsilon(1e-14));

  // warmup months are null, later months numeric
  const auto& first = doc["series"]["2000-01"];
  CHECK(first["yz"].is_null());
  CHECK(first["p"].is_null());
  CHECK(first["close"].is_number());
  CHECK(doc["series"][s.bars.back().period.to_string()]["yz"].is_number());
  CHECK(doc["flags"].size() == s.size());

  const auto no_detect = nlohmann::json::parse(report_json(build_report(s, cfg, false)));
  CHECK(no_detect["thresholds"].is_null());
  CHECK(no_detect["episodes"].empty());
}

TEST_CASE("report CSV and episodes") {
  std::ostringstream empty;
  write_episodes_csv({}, empty);
  CHECK(empty.str() == "start,end,peak_month,peak_vol,length\n");

  const auto s = sample_series(30);
  RunConfig cfg;
  const auto report = build_report(s, cfg, true);
  std::ostringstream csv;
  write_report_csv(report, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::size_t count = 0;
  std::getline(lines, line);
  CHECK(line.rfind("date,open,high,low,close", 0) == 0);
  while (std::getline(lines, line)) ++count;
  CHECK(count == s.size());

  const auto dir = std::filesystem::temp_directory_path() / "rangevol_test_emit";
  std::filesystem::remove_all(dir);
  const auto paths = emit_report(report, dir, ReportFormat::Both, true);
  CHECK(paths.size() == 4);
  for (const auto& p : paths) CHECK(std::filesystem::exists(p));
  const auto plot = nlohmann::json::parse(plot_data_json(report));
  CHECK(plot.contains("market_id"));
  std::filesystem::remove_all(dir);
}
