#include "rangevol/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>

#include "rangevol/error.hpp"
#include "rangevol/ged.hpp"

namespace rangevol {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return splitmix64(seed) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Rng(stream_seed(seed, stream_id));
}

double Rng::uniform_open() {
  const std::uint64_t bits = engine_() >> 11;  // 53 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

OhlcSeries simulate_gbm_ohlc(const GbmSettings& s) {
  if (!(s.sigma_annual >= 0.0) || !std::isfinite(s.sigma_annual) || !std::isfinite(s.mu_annual) ||
      !(s.delta_t > 0.0) || s.steps_per_period < 1 || s.periods < 1 || !(s.start_price > 0.0)) {
    throw Error(ErrorCode::InadmissibleParams, "invalid GBM simulation settings");
  }
  Rng rng(s.seed);
  const double h = s.delta_t / s.steps_per_period;
  const double drift = (s.mu_annual - 0.5 * s.sigma_annual * s.sigma_annual) * h;
  const double sd = s.sigma_annual * std::sqrt(h);
  const double two_var = 2.0 * sd * sd;

  OhlcSeries out;
  out.market_id = s.market_id;
  out.bars.reserve(s.periods);
  double x = std::log(s.start_price);
  double prev_close = s.start_price;
  YearMonth period = s.start_period;
  for (std::size_t p = 0; p < s.periods; ++p) {
    double hi = x;
    double lo = x;
    for (int k = 0; k < s.steps_per_period; ++k) {
      const double next = x + drift + sd * rng.normal();
      if (s.extrema == ExtremaMode::Bridge) {
        // Max / min of a Brownian bridge between the two grid points.
        const double gap = (next - x) * (next - x);
        const double up = 0.5 * (x + next + std::sqrt(gap - two_var * std::log(rng.uniform_open())));
        const double dn = 0.5 * (x + next - std::sqrt(gap - two_var * std::log(rng.uniform_open())));
        hi = std::max(hi, up);
        lo = std::min(lo, dn);
      } else {
        hi = std::max(hi, next);
        lo = std::min(lo, next);
      }
      x = next;
    }
    PriceBar bar;
    bar.period = period;
    bar.open = prev_close;
    bar.close = std::exp(x);
    prev_close = bar.close;
    bar.high = std::max({std::exp(hi), bar.open, bar.close});
    bar.low = std::min({std::exp(lo), bar.open, bar.close});
    out.bars.push_back(bar);
    period = period.next();
  }
  return out;
}

FigarchPath simulate_figarch(const FigarchParams& params, std::size_t periods, std::uint64_t seed,
                             const FigarchSimOptions& options) {
  try {
    params.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InadmissibleParams, e.what());
  }
  if (periods < 1 || options.truncation < 1) {
    throw Error(ErrorCode::InadmissibleParams, "periods and truncation must be positive");
  }
  const auto lambda = arch_infty_weights_unchecked(params, options.truncation);
  if (!weights_admissible(lambda)) {
    throw Error(ErrorCode::InadmissibleParams, "parameters give negative ARCH weights");
  }
  double lambda_sum = 0.0;
  for (double w : lambda) lambda_sum += w;
  const double presample = options.presample.value_or(
      params.omega / ((1.0 - params.beta1) * std::max(1.0 - lambda_sum, 1e-3)));

  const ArchRecursion rec(params, options.truncation, presample);
  const std::size_t total = options.burn_in + periods;
  std::vector<double> eps2(total);
  FigarchPath path;
  path.presample = presample;
  path.returns.reserve(periods);
  path.h.reserve(periods);
  path.z.reserve(periods);
  Rng rng(seed);
  for (std::size_t t = 0; t < total; ++t) {
    const double h = rec.variance(eps2, t);
    const double z = ged_quantile(rng.uniform_open(), params.nu);
    const double eps = std::sqrt(h) * z;
    eps2[t] = eps * eps;
    if (t >= options.burn_in) {
      path.returns.push_back(params.mu + eps);
      path.h.push_back(h);
      path.z.push_back(z);
    }
  }
  return path;
}

namespace {

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  void merge(const Accumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
};

using Pooled = std::array<Accumulator, kAllEstimators.size()>;

Pooled run_replication(const GbmSettings& scenario, const AnnualizationConfig& config,
                       std::uint64_t seed, std::size_t r) {
  GbmSettings s = scenario;
  s.seed = stream_seed(seed, r);
  const OhlcSeries series = simulate_gbm_ohlc(s);
  Pooled pooled;
  const auto all = estimate_all(series, config);
  for (std::size_t e = 0; e < kAllEstimators.size(); ++e) {
    for (const auto& v : all.at(kAllEstimators[e]).variance) {
      if (v) pooled[e].add(*v);
    }
  }
  return pooled;
}

}  // namespace

McStats mc_estimator_stats(const GbmSettings& scenario, const AnnualizationConfig& config,
                           std::size_t replications, std::uint64_t seed) {
  if (replications < 1) throw Error(ErrorCode::InvalidConfig, "need at least one replication");
  config.validate();
  std::vector<Pooled> per_rep(replications);
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, replications);
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = w; r < replications; r += workers) {
            per_rep[r] = run_replication(scenario, config, seed, r);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  // Reduce in replication order so the result does not depend on scheduling.
  Pooled total;
  for (const auto& rep : per_rep) {
    for (std::size_t e = 0; e < total.size(); ++e) total[e].merge(rep[e]);
  }

  McStats out;
  out.true_variance = scenario.sigma_annual * scenario.sigma_annual * scenario.delta_t;
  out.replications = replications;
  out.periods_per_replication = scenario.periods;
  for (std::size_t e = 0; e < total.size(); ++e) {
    const auto& acc = total[e];
    EstimatorStats st;
    st.windows = acc.count;
    if (acc.count > 0) {
      const double n = static_cast<double>(acc.count);
      st.mean_variance = acc.sum / n;
      st.dispersion = acc.count > 1 ? (acc.sum_sq - n * st.mean_variance * st.mean_variance) / (n - 1.0) : 0.0;
      st.bias = st.mean_variance - out.true_variance;
      st.relative_bias = out.true_variance > 0.0 ? st.bias / out.true_variance : 0.0;
    }
    out.estimators.emplace(kAllEstimators[e], st);
  }
  return out;
}

}  // namespace rangevol
