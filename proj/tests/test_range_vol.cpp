#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rangevol/range_vol.hpp"
#include "rangevol/simulation.hpp"
#include "test_util.hpp"

using namespace rangevol;
using testutil::flat_series;
using testutil::make_series;

namespace {

AnnualizationConfig window(int n, double N = 12.0) {
  AnnualizationConfig c;
  c.window_n = n;
  c.annualization_N = N;
  return c;
}

// Per-period variances written directly from the estimator definitions, using
// differences of logs instead of logs of ratios.
struct Reference {
  std::vector<std::optional<double>> cc, p, gk, rs, gkyz, yz;
};

Reference reference(const OhlcSeries& s, int n_int, double alpha = 1.34) {
  const std::size_t T = s.size(), n = static_cast<std::size_t>(n_int);
  Reference out;
  for (auto* v : {&out.cc, &out.p, &out.gk, &out.rs, &out.gkyz, &out.yz}) v->assign(T, std::nullopt);
  auto L = [](double x) { return std::log(x); };
  std::vector<double> d(T), c(T), o(T), u(T), l(T), ret(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& b = s.bars[t];
    d[t] = L(b.high) - L(b.low);
    c[t] = L(b.close) - L(b.open);
    u[t] = L(b.high) - L(b.open);
    l[t] = L(b.low) - L(b.open);
    if (t > 0) {
      o[t] = L(b.open) - L(s.bars[t - 1].close);
      ret[t] = b.close / s.bars[t - 1].close - 1.0;
    }
  }
  const double k = (alpha - 1.0) / (alpha + (n_int + 1.0) / (n_int - 1.0));
  for (std::size_t t = 0; t < T; ++t) {
    if (t + 1 >= n) {
      double sp = 0, sgk = 0, srs = 0;
      for (std::size_t i = t + 1 - n; i <= t; ++i) {
        sp += d[i] * d[i] / (4.0 * std::log(2.0));
        sgk += 0.5 * d[i] * d[i] - (2.0 * std::log(2.0) - 1.0) * c[i] * c[i];
        srs += u[i] * (u[i] - c[i]) + l[i] * (l[i] - c[i]);
      }
      out.p[t] = sp / n;
      out.gk[t] = sgk / n;
      out.rs[t] = srs / n;
      if (n >= 3) {
        std::vector<double> w(ret.begin() + (t + 2 - n), ret.begin() + t + 1);
        out.cc[t] = oracle::sample_var(w);
      }
    }
    if (t >= n) {
      double s2 = 0, srs = 0;
      std::vector<double> ow, cw;
      for (std::size_t i = t + 1 - n; i <= t; ++i) {
        s2 += o[i] * o[i] + 0.5 * d[i] * d[i] - (2.0 * std::log(2.0) - 1.0) * c[i] * c[i];
        srs += u[i] * (u[i] - c[i]) + l[i] * (l[i] - c[i]);
        ow.push_back(o[i]);
        cw.push_back(c[i]);
      }
      out.gkyz[t] = s2 / n;
      if (n >= 2) out.yz[t] = oracle::sample_var(ow) + k * oracle::sample_var(cw) + (1 - k) * srs / n;
    }
  }
  return out;
}

OhlcSeries gbm(std::size_t periods, std::uint64_t seed, double drift = 0.0) {
  GbmSettings g;
  g.periods = periods;
  g.seed = seed;
  g.steps_per_period = 64;
  g.mu_annual = drift;
  return simulate_gbm_ohlc(g);
}

// Shifts every open away from the previous close so overnight returns are nonzero.
OhlcSeries with_gaps(OhlcSeries s, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 0.02);
  for (auto& b : s.bars) {
    const double f = std::exp(z(gen));
    b.open *= f;
    b.high = std::max(b.high, b.open);
    b.low = std::min(b.low, b.open);
  }
  return s;
}

void check_close(const VolSeries& v, const std::vector<std::optional<double>>& ref) {
  REQUIRE(v.variance.size() == ref.size());
  for (std::size_t t = 0; t < ref.size(); ++t) {
    CAPTURE(t);
    REQUIRE(v.variance[t].has_value() == ref[t].has_value());
    if (ref[t]) CHECK(*v.variance[t] == doctest::Approx(*ref[t]).epsilon(1e-10).scale(1e-18));
  }
}

}  // namespace

TEST_CASE("close-to-close") {
  SUBCASE("constant closes") {
    const auto v = close_to_close(flat_series(std::vector<double>(12, 50.0)), window(3));
    for (std::size_t t = 2; t < 12; ++t) CHECK(*v.values[t] == 0.0);
  }
  SUBCASE("alternating 100, 110 with n = 3") {
    const auto v = close_to_close(flat_series({100, 110, 100}), window(3));
    const double r1 = 0.10, r2 = 100.0 / 110.0 - 1.0;
    const double m = 0.5 * (r1 + r2);
    const double var = (r1 - m) * (r1 - m) + (r2 - m) * (r2 - m);  // divisor m - 1 = 1
    CHECK_FALSE(v.values[1].has_value());
    CHECK(*v.variance[2] == doctest::Approx(var).epsilon(1e-14));
    CHECK(*v.values[2] == doctest::Approx(std::sqrt(12.0 * var)).epsilon(1e-14));
  }
  SUBCASE("equal returns") {
    std::vector<double> c{100.0};
    for (int i = 0; i < 11; ++i) c.push_back(c.back() * 1.1);
    const auto v = close_to_close(flat_series(c), window(4));
    for (std::size_t t = 3; t < c.size(); ++t) CHECK(*v.values[t] == doctest::Approx(0.0).scale(1e-6));
  }
  CHECK_ERROR_CODE(close_to_close(flat_series({1, 2, 3}), window(2)), ErrorCode::WindowTooShort);
}

TEST_CASE("Parkinson") {
  const auto zero = parkinson(flat_series({3, 4, 5}), window(2));
  CHECK(*zero.values[1] == 0.0);
  CHECK(*zero.values[2] == 0.0);
  const auto v = parkinson(make_series({{1.5, 2.0, 1.0, 1.5}}), window(1));
  CHECK(*v.variance[0] == doctest::Approx(std::numbers::ln2 / 4.0).epsilon(1e-15));
  CHECK(*v.variance[0] == doctest::Approx(0.17329).epsilon(1e-4));
  CHECK(*v.values[0] == doctest::Approx(1.4422).epsilon(1e-4));
  CHECK(parkinson_term(std::numbers::ln2) == doctest::Approx(std::numbers::ln2 / 4.0));
}

TEST_CASE("Garman-Klass") {
  CHECK(*garman_klass(flat_series({3, 3}), window(1)).values[1] == 0.0);
  const auto v = garman_klass(make_series({{1.5, 2.0, 1.0, 1.5}}), window(1));
  CHECK(*v.variance[0] == doctest::Approx(0.5 * std::numbers::ln2 * std::numbers::ln2).epsilon(1e-15));
  CHECK(*v.variance[0] == doctest::Approx(0.24023).epsilon(1e-4));
}

TEST_CASE("Rogers-Satchell") {
  CHECK(rogers_satchell_term({{2020, 1}, 10.0, 12.0, 10.0, 12.0}) == 0.0);
  const double e = std::exp(0.1);
  const PriceBar mid{{2020, 1}, 100.0, 100.0 * e, 100.0 / e, 100.0};
  CHECK(rogers_satchell_term(mid) == doctest::Approx(0.02).epsilon(1e-13));
  const auto v = rogers_satchell(make_series({{100.0, 100.0 * e, 100.0 / e, 100.0}}), window(1));
  CHECK(*v.variance[0] == doctest::Approx(0.02).epsilon(1e-13));

  SUBCASE("non-negative for every valid bar") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int i = 0; i < 10000; ++i) {
      const double o = u(gen), c = u(gen);
      const double h = std::max(o, c) * u(gen) / 0.5, l = std::min(o, c) * 0.5 / u(gen);
      CHECK(rogers_satchell_term({{2020, 1}, o, std::max({h, o, c}), std::min({l, o, c}), c}) >= 0.0);
    }
  }
}

TEST_CASE("Garman-Klass-Yang-Zhang") {
  SUBCASE("no overnight gaps equals Garman-Klass") {
    const auto s = gbm(60, 4);
    const auto a = gk_yang_zhang(s, window(10));
    const auto b = garman_klass(s, window(10));
    CHECK_FALSE(a.values[9].has_value());
    for (std::size_t t = 10; t < s.size(); ++t) CHECK(*a.variance[t] == doctest::Approx(*b.variance[t]).epsilon(1e-13));
  }
  SUBCASE("flat bars with a jump") {
    const auto v = gk_yang_zhang(make_series({{100, 100, 100, 100}, {110, 110, 110, 110}}), window(1));
    CHECK_FALSE(v.values[0].has_value());
    CHECK(*v.variance[1] == doctest::Approx(std::log(1.1) * std::log(1.1)).epsilon(1e-14));
    CHECK(*v.variance[1] == doctest::Approx(0.009084).epsilon(1e-4));
  }
}

TEST_CASE("Yang-Zhang") {
  SUBCASE("weight") {
    CHECK(yz_weight(10, 1.34) == doctest::Approx(0.34 / (1.34 + 11.0 / 9.0)).epsilon(1e-15));
    CHECK(std::abs(yz_weight(10, 1.34) - 0.13270) <= 1e-5);
    CHECK(yz_weight(2, 1.34) == doctest::Approx(0.078341).epsilon(1e-5));
    CHECK(yz_weight(1000000, 1.34) == doctest::Approx(0.34 / 2.34).epsilon(1e-5));
    CHECK(yz_weight(7, 1.0) == 0.0);
    CHECK_ERROR_CODE(yz_weight(1, 1.34), ErrorCode::WindowTooShort);
  }
  SUBCASE("constant components give zero") {
    const auto v = yang_zhang(flat_series(std::vector<double>(15, 7.0)), window(5));
    for (std::size_t t = 5; t < 15; ++t) CHECK(*v.values[t] == 0.0);
    CHECK_FALSE(v.values[4].has_value());
  }
  SUBCASE("alpha = 1 reduces to v_o + v_RS") {
    const auto s = with_gaps(gbm(40, 8), 1);
    const auto v = yang_zhang(s, window(6), 1.0);
    const auto ref = reference(s, 6, 1.0);
    check_close(v, ref.yz);
  }
  CHECK_ERROR_CODE(yang_zhang(flat_series({1, 1, 1}), window(1)), ErrorCode::WindowTooShort);
}

TEST_CASE("all estimators agree with the reference formulas") {
  for (int n : {3, 10}) {
    for (std::uint64_t seed : {1u, 2u}) {
      const auto s = with_gaps(gbm(50, seed, 0.3), seed + 10);
      const auto all = estimate_all(s, window(n));
      const auto ref = reference(s, n);
      CAPTURE(n);
      check_close(all.at(EstimatorId::CC), ref.cc);
      check_close(all.at(EstimatorId::P), ref.p);
      check_close(all.at(EstimatorId::GK), ref.gk);
      check_close(all.at(EstimatorId::RS), ref.rs);
      check_close(all.at(EstimatorId::GKYZ), ref.gkyz);
      check_close(all.at(EstimatorId::YZ), ref.yz);
    }
  }
}

TEST_CASE("estimate_all properties") {
  SUBCASE("flat series") {
    for (const auto& [id, v] : estimate_all(flat_series(std::vector<double>(20, 9.0)), window(10))) {
      CHECK(v.defined_count() > 0);
      for (std::size_t t = v.warmup; t < v.values.size(); ++t) CHECK(*v.values[t] == 0.0);
    }
  }
  SUBCASE("warmup is absent, never zero") {
    const auto all = estimate_all(gbm(30, 3), window(10));
    CHECK(all.at(EstimatorId::CC).warmup == 9);
    CHECK(all.at(EstimatorId::P).warmup == 9);
    CHECK(all.at(EstimatorId::GK).warmup == 9);
    CHECK(all.at(EstimatorId::RS).warmup == 9);
    CHECK(all.at(EstimatorId::GKYZ).warmup == 10);
    CHECK(all.at(EstimatorId::YZ).warmup == 10);
    for (const auto& [id, v] : all) {
      for (std::size_t t = 0; t < v.warmup; ++t) CHECK_FALSE(v.values[t].has_value());
      for (std::size_t t = v.warmup; t < v.values.size(); ++t) CHECK(v.values[t].has_value());
    }
  }
  SUBCASE("H = L = O = C with varying closes: only c and o matter") {
    const auto s = flat_series({100, 104, 99, 101, 107, 103, 98, 100, 102, 105, 99, 97, 101});
    const auto all = estimate_all(s, window(5));
    const auto ref = reference(s, 5);
    for (std::size_t t = 5; t < s.size(); ++t) {
      CHECK(*all.at(EstimatorId::P).values[t] == 0.0);
      CHECK(*all.at(EstimatorId::GK).values[t] == 0.0);
      CHECK(*all.at(EstimatorId::RS).values[t] == 0.0);
      CHECK(*all.at(EstimatorId::GKYZ).values[t] > 0.0);
      CHECK(*all.at(EstimatorId::YZ).values[t] > 0.0);
    }
    check_close(all.at(EstimatorId::GKYZ), ref.gkyz);
    check_close(all.at(EstimatorId::YZ), ref.yz);
  }
  SUBCASE("determinism, scale equivariance, annualization") {
    const auto s = with_gaps(gbm(40, 5), 6);
    auto scaled = s;
    for (auto& b : scaled.bars) {
      b.open *= 37.5;
      b.high *= 37.5;
      b.low *= 37.5;
      b.close *= 37.5;
    }
    const auto a = estimate_all(s, window(10));
    const auto b = estimate_all(s, window(10));
    const auto c = estimate_all(scaled, window(10));
    const auto one = estimate_all(s, window(10, 1.0));
    for (EstimatorId id : kAllEstimators) {
      for (std::size_t t = 0; t < s.size(); ++t) {
        CHECK(a.at(id).values[t] == b.at(id).values[t]);
        if (!a.at(id).values[t]) continue;
        CHECK(*c.at(id).values[t] == doctest::Approx(*a.at(id).values[t]).epsilon(1e-9));
        CHECK(*a.at(id).values[t] == std::sqrt(12.0) * std::sqrt(*one.at(id).variance[t]));
        CHECK(*a.at(id).values[t] == doctest::Approx(std::sqrt(12.0) * *one.at(id).values[t]).epsilon(1e-15));
      }
    }
  }
  SUBCASE("window locality") {
    const auto s = with_gaps(gbm(40, 9), 2);
    auto changed = s;
    changed.bars[5].high *= 1.5;  // only windows covering bar 5 (or bar 6's overnight) move
    const auto a = estimate_all(s, window(10));
    const auto b = estimate_all(changed, window(10));
    for (EstimatorId id : kAllEstimators) {
      for (std::size_t t = 16; t < s.size(); ++t) CHECK(a.at(id).values[t] == b.at(id).values[t]);
    }
    CHECK(a.at(EstimatorId::P).values[14] != b.at(EstimatorId::P).values[14]);
    CHECK(a.at(EstimatorId::P).values[15] == b.at(EstimatorId::P).values[15]);
  }
}

TEST_CASE("estimator names") {
  for (EstimatorId id : kAllEstimators) CHECK(parse_estimator(to_string(id)) == id);
  CHECK_FALSE(parse_estimator("garch").has_value());
}
