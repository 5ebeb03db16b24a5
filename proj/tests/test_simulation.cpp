#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rangevol/ged.hpp"
#include "rangevol/simulation.hpp"
#include "test_util.hpp"

using namespace rangevol;

namespace {

GbmSettings settings(std::size_t periods, int steps, std::uint64_t seed, double drift = 0.0) {
  GbmSettings g;
  g.periods = periods;
  g.steps_per_period = steps;
  g.seed = seed;
  g.mu_annual = drift;
  return g;
}

double parkinson_relative_bias(int steps) {
  GbmSettings g = settings(20000, steps, 99);
  g.extrema = ExtremaMode::Discrete;
  const auto s = simulate_gbm_ohlc(g);
  double acc = 0.0;
  for (const auto& b : s.bars) {
    const double d = std::log(b.high / b.low);
    acc += d * d / (4.0 * std::log(2.0));
  }
  const double truth = g.sigma_annual * g.sigma_annual * g.delta_t;
  return acc / static_cast<double>(s.size()) / truth - 1.0;
}

}  // namespace

TEST_CASE("random streams") {
  Rng a(5), b(5), c(6);
  CHECK(a.normal() == b.normal());
  CHECK(a.uniform_open() == b.uniform_open());
  CHECK(a.normal() != c.normal());
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
  Rng u(11);
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform_open();
    CHECK((x > 0.0 && x < 1.0));
  }
}

TEST_CASE("GBM bars") {
  SUBCASE("sigma = 0 gives a deterministic ramp of flat bars") {
    GbmSettings g = settings(24, 8, 1, 0.12);
    g.sigma_annual = 0.0;
    const auto s = simulate_gbm_ohlc(g);
    for (std::size_t t = 0; t < s.size(); ++t) {
      const auto& b = s.bars[t];
      CHECK(b.high != b.low);
      CHECK(b.low == std::min(b.open, b.close));
      CHECK(b.high == std::max(b.open, b.close));
      CHECK(b.close == doctest::Approx(100.0 * std::exp(0.12 * (t + 1) / 12.0)).epsilon(1e-12));
    }
    g.mu_annual = 0.0;
    for (const auto& b : simulate_gbm_ohlc(g).bars) {
      CHECK(b.open == doctest::Approx(b.close).epsilon(1e-14));
      CHECK(b.high == doctest::Approx(b.low).epsilon(1e-14));
    }
  }
  SUBCASE("bars chain and respect the envelope") {
    const auto s = simulate_gbm_ohlc(settings(200, 32, 3));
    CHECK(s.bars[0].open == 100.0);
    CHECK(s.bars[0].period == YearMonth{2000, 1});
    for (std::size_t t = 1; t < s.size(); ++t) CHECK(s.bars[t].open == s.bars[t - 1].close);
    CHECK_NOTHROW(validate_series(s));
  }
  SUBCASE("log-return drift is mu - sigma^2 / 2") {
    const auto s = simulate_gbm_ohlc(settings(20000, 16, 4));
    std::vector<double> c;
    for (const auto& b : s.bars) c.push_back(std::log(b.close / b.open));
    const double expected = -0.5 * 0.04 / 12.0;
    const double se = std::sqrt(0.04 / 12.0 / 20000.0);
    CHECK(std::abs(oracle::mean(c) - expected) < 4.0 * se);
    CHECK(oracle::sample_var(c) == doctest::Approx(0.04 / 12.0).epsilon(0.05));
  }
  SUBCASE("same seed, same series") {
    const auto a = simulate_gbm_ohlc(settings(50, 16, 8));
    const auto b = simulate_gbm_ohlc(settings(50, 16, 8));
    for (std::size_t t = 0; t < a.size(); ++t) {
      CHECK(a.bars[t].high == b.bars[t].high);
      CHECK(a.bars[t].low == b.bars[t].low);
      CHECK(a.bars[t].close == b.bars[t].close);
    }
  }
  SUBCASE("bad settings") {
    GbmSettings g = settings(10, 0, 1);
    CHECK_ERROR_CODE(simulate_gbm_ohlc(g), ErrorCode::InadmissibleParams);
    g = settings(10, 4, 1);
    g.sigma_annual = -0.1;
    CHECK_ERROR_CODE(simulate_gbm_ohlc(g), ErrorCode::InadmissibleParams);
  }
}

TEST_CASE("discrete extremes converge from below as the grid refines") {
  const double b100 = parkinson_relative_bias(100);
  const double b400 = parkinson_relative_bias(400);
  const double b1600 = parkinson_relative_bias(1600);
  CHECK(b100 < 0.0);
  CHECK(b100 < b400);
  CHECK(b400 < b1600);
  CHECK(std::abs(b1600) < std::abs(b100));
}

TEST_CASE("fiGARCH simulation") {
  SUBCASE("constant-variance reduction") {
    const FigarchParams p{0.001, 4e-4, 0.0, 0.0, 0.0, 1.5};
    const auto path = simulate_figarch(p, 100000, 3);
    for (double h : path.h) CHECK(h == 4e-4);
    std::vector<double> e(path.returns);
    CHECK(oracle::sample_var(e) == doctest::Approx(4e-4).epsilon(0.03));
    CHECK(oracle::mean(e) == doctest::Approx(0.001).epsilon(0.1));
  }
  SUBCASE("nu = 2 innovations have kurtosis 3") {
    const auto path = simulate_figarch({0.0, 1e-4, 0.3, 0.1, 0.2, 2.0}, 100000, 4);
    const double m = oracle::mean(path.z);
    double m2 = 0, m4 = 0;
    for (double z : path.z) {
      m2 += (z - m) * (z - m);
      m4 += std::pow(z - m, 4);
    }
    m2 /= path.z.size();
    m4 /= path.z.size();
    CHECK(m4 / (m2 * m2) == doctest::Approx(3.0).epsilon(0.04));
  }
  SUBCASE("reproducible and admissibility-checked") {
    const FigarchParams p{0.0, 1e-4, 0.4, 0.2, 0.3, 1.5};
    const auto a = simulate_figarch(p, 300, 9);
    const auto b = simulate_figarch(p, 300, 9);
    CHECK(a.returns == b.returns);
    CHECK(a.h == b.h);
    CHECK(a.returns.size() == 300);
    CHECK_ERROR_CODE(simulate_figarch({0.0, 1e-4, 0.5, 0.1, 0.0, 2.0}, 100, 1), ErrorCode::InadmissibleParams);
    CHECK_ERROR_CODE(simulate_figarch({0.0, -1.0, 0.0, 0.0, 0.0, 2.0}, 100, 1), ErrorCode::InadmissibleParams);
  }
}

TEST_CASE("Monte Carlo estimator statistics") {
  AnnualizationConfig cfg;
  const GbmSettings zero = settings(60, 128, 0);
  const McStats a = mc_estimator_stats(zero, cfg, 400, 77);
  const McStats b = mc_estimator_stats(zero, cfg, 400, 77);
  CHECK(a.true_variance == doctest::Approx(0.04 / 12.0));
  CHECK(a.replications == 400);
  for (EstimatorId id : kAllEstimators) {
    CHECK(a.estimators.at(id).mean_variance == b.estimators.at(id).mean_variance);
    CHECK(a.estimators.at(id).dispersion == b.estimators.at(id).dispersion);
  }
  const auto& P = a.estimators.at(EstimatorId::P);
  const auto& GK = a.estimators.at(EstimatorId::GK);
  const auto& CC = a.estimators.at(EstimatorId::CC);
  CHECK(P.windows == 400u * 51u);
  CHECK(std::abs(P.relative_bias) < 0.05);
  CHECK(std::abs(GK.relative_bias) < 0.05);
  CHECK(GK.dispersion < P.dispersion);
  CHECK(P.dispersion < CC.dispersion);
  // continuous trading: no overnight returns, so GK-YZ and GK see the same bars
  CHECK(a.estimators.at(EstimatorId::GKYZ).mean_variance ==
        doctest::Approx(GK.mean_variance).epsilon(0.02));

  const McStats drift = mc_estimator_stats(settings(60, 128, 0, 1.0), cfg, 400, 78);
  CHECK(std::abs(drift.estimators.at(EstimatorId::RS).bias) <
        std::abs(drift.estimators.at(EstimatorId::P).bias));

  CHECK_ERROR_CODE(mc_estimator_stats(zero, cfg, 0, 1), ErrorCode::InvalidConfig);
}
