#include "rangevol/figarch.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>

#include "rangevol/error.hpp"
#include "rangevol/ged.hpp"
#include "rangevol/nelder_mead.hpp"

namespace rangevol {

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr std::size_t kMaxTruncation = 1000;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

double mean_square_about(std::span<const double> r, double mu) {
  double acc = 0.0;
  for (double v : r) acc += (v - mu) * (v - mu);
  return acc / static_cast<double>(r.size());
}

struct LikelihoodEval {
  bool ok = false;
  double loglik = 0.0;
};

// Non-throwing likelihood for the optimizer; `rec` must be built from `params`.
LikelihoodEval evaluate(std::span<const double> r, const FigarchParams& params,
                        const ArchRecursion& rec, std::size_t discard,
                        std::vector<double>& eps2) {
  const std::size_t T = r.size();
  eps2.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double e = r[t] - params.mu;
    eps2[t] = e * e;
  }
  const GedLogDensity logpdf(params.nu);
  double ll = 0.0;
  for (std::size_t t = discard; t < T; ++t) {
    const double h = rec.variance(eps2, t);
    if (!(h > 0.0) || !std::isfinite(h)) return {};
    ll += logpdf((r[t] - params.mu) / std::sqrt(h)) - 0.5 * std::log(h);
  }
  if (!std::isfinite(ll)) return {};
  return {true, ll};
}

}  // namespace

void FigarchParams::validate() const {
  const bool ok = std::isfinite(mu) && omega > 0.0 && std::isfinite(omega) && beta1 >= 0.0 &&
                  beta1 < 1.0 && phi1 >= 0.0 && phi1 < 1.0 && d >= 0.0 && d < 1.0 &&
                  nu > 0.0 && std::isfinite(nu);
  if (!ok) throw Error(ErrorCode::InadmissibleParams, "fiGARCH parameters outside their box");
}

std::size_t default_truncation(std::size_t sample_size) {
  return std::max<std::size_t>(1, std::min(sample_size, kMaxTruncation));
}

std::vector<double> frac_diff_coeffs(double d, std::size_t K) {
  if (!(d >= 0.0 && d <= 1.0)) throw Error(ErrorCode::InvalidD, "d must lie in [0, 1]");
  if (K < 1) throw Error(ErrorCode::InvalidConfig, "truncation must be >= 1");
  std::vector<double> pi(K + 1);
  pi[0] = 1.0;
  for (std::size_t j = 1; j <= K; ++j) {
    pi[j] = pi[j - 1] * (static_cast<double>(j) - 1.0 - d) / static_cast<double>(j);
  }
  return pi;
}

std::vector<double> arch_infty_weights_unchecked(const FigarchParams& p, std::size_t K) {
  // lambda(L) = 1 - (1 - phi1 L)(1 - L)^d / (1 - beta1 L)
  const std::vector<double> pi = frac_diff_coeffs(p.d, K);
  std::vector<double> lambda(K);
  double psi_prev = 1.0;  // psi_0
  for (std::size_t j = 1; j <= K; ++j) {
    const double delta = pi[j] - p.phi1 * pi[j - 1];
    const double psi = delta + p.beta1 * psi_prev;
    lambda[j - 1] = -psi;
    psi_prev = psi;
  }
  return lambda;
}

bool weights_admissible(std::span<const double> lambda) {
  return std::all_of(lambda.begin(), lambda.end(),
                     [](double w) { return w >= -kWeightTolerance && std::isfinite(w); });
}

std::vector<double> arch_infty_weights(const FigarchParams& params, std::size_t K) {
  auto lambda = arch_infty_weights_unchecked(params, K);
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (!(lambda[j] >= -kWeightTolerance)) {
      throw Error(ErrorCode::NegativeWeight,
                  "ARCH weight lambda_" + std::to_string(j + 1) + " is negative");
    }
  }
  return lambda;
}

ArchRecursion::ArchRecursion(const FigarchParams& params, std::size_t K, double presample)
    : intercept_(params.omega / (1.0 - params.beta1)), presample_(presample) {
  const auto lambda = arch_infty_weights_unchecked(params, K);
  reversed_.assign(lambda.rbegin(), lambda.rend());
  tail_.assign(K + 1, 0.0);
  for (std::size_t t = K; t-- > 0;) tail_[t] = tail_[t + 1] + lambda[t];
}

double ArchRecursion::variance(std::span<const double> eps2, std::size_t t) const {
  const std::size_t K = reversed_.size();
  const std::size_t m = std::min(t, K);
  double h = intercept_;
  if (t < K) h += presample_ * tail_[t];
  // sum_{j=1..m} lambda_j eps2[t-j], walked with both arrays ascending
  const double* w = reversed_.data() + (K - m);
  const double* e = eps2.data() + (t - m);
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= m; k += 4) {
    a0 += w[k] * e[k];
    a1 += w[k + 1] * e[k + 1];
    a2 += w[k + 2] * e[k + 2];
    a3 += w[k + 3] * e[k + 3];
  }
  for (; k < m; ++k) a0 += w[k] * e[k];
  return h + ((a0 + a1) + (a2 + a3));
}

FilterState filter(std::span<const double> returns, const FigarchParams& params,
                   const FilterOptions& options, std::span<const double> log_prices) {
  const std::size_t T = returns.size();
  if (T < kMinFilterLength) {
    throw Error(ErrorCode::SeriesTooShort,
                "filter needs at least " + std::to_string(kMinFilterLength) + " returns");
  }
  params.validate();
  if (!log_prices.empty() && log_prices.size() != T + 1) {
    throw Error(ErrorCode::LengthMismatch, "log prices must have one more entry than returns");
  }
  const std::size_t K = options.truncation.value_or(default_truncation(T));
  const auto lambda = arch_infty_weights(params, K);  // admissibility gate
  (void)lambda;

  FilterState state;
  state.truncation = K;
  state.presample = options.presample.value_or(mean_square_about(returns, params.mu));
  const ArchRecursion rec(params, K, state.presample);

  std::vector<double> eps2(T);
  for (std::size_t t = 0; t < T; ++t) eps2[t] = (returns[t] - params.mu) * (returns[t] - params.mu);

  const GedLogDensity logpdf(params.nu);
  state.h.resize(T);
  state.z.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double h = rec.variance(eps2, t);
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw Error(ErrorCode::NonFiniteVariance,
                  "conditional variance not positive and finite at t=" + std::to_string(t));
    }
    state.h[t] = h;
    state.z[t] = (returns[t] - params.mu) / std::sqrt(h);
    if (t >= options.discard) state.loglik += logpdf(state.z[t]) - 0.5 * std::log(h);
  }
  if (!log_prices.empty()) {
    state.m_next.resize(T);
    for (std::size_t t = 0; t < T; ++t) state.m_next[t] = log_prices[t] + params.mu;
  }
  return state;
}

double log_likelihood(std::span<const double> returns, const FigarchParams& params,
                      const FilterOptions& options) {
  if (returns.empty()) throw Error(ErrorCode::SeriesTooShort, "empty return series");
  return filter(returns, params, options).loglik;
}

namespace {

struct Transform {
  double nu_min;
  double nu_max;

  FigarchParams to_params(std::span<const double> x) const {
    return FigarchParams{x[0], std::exp(x[1]), logistic(x[2]), logistic(x[3]), logistic(x[4]),
                         std::exp(x[5])};
  }
  std::vector<double> to_vector(const FigarchParams& p) const {
    return {p.mu, std::log(p.omega), logit(p.beta1), logit(p.phi1), logit(p.d), std::log(p.nu)};
  }
};

struct StartOutcome {
  bool admissible = false;
  NelderMeadResult nm;
  int iterations = 0;
};

}  // namespace

bool has_variation(std::span<const double> returns) {
  if (returns.empty()) return false;
  const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi)) return true;
  return *hi - *lo > 1e-12 * std::max({1.0, std::abs(*lo), std::abs(*hi)});
}

FitResult fit(std::span<const double> returns, const FitOptions& options) {
  const std::size_t T = returns.size();
  if (T < kMinFilterLength) {
    throw Error(ErrorCode::SeriesTooShort,
                "fit needs at least " + std::to_string(kMinFilterLength) + " returns");
  }
  FitResult result;
  if (T < 100) result.warnings.push_back("fewer than 100 returns; estimates will be noisy");

  const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(T);
  const double var = mean_square_about(returns, mean);
  if (!has_variation(returns) || !(var > 0.0) || !std::isfinite(var)) {
    throw Error(ErrorCode::NoAdmissibleStart, "returns have no variation");
  }
  const double sd = std::sqrt(var);
  const std::size_t K = options.truncation.value_or(default_truncation(T));
  const Transform tr{options.nu_min, options.nu_max};

  auto objective = [&](std::span<const double> x, std::vector<double>& scratch) {
    const FigarchParams p = tr.to_params(x);
    if (!(p.nu >= tr.nu_min && p.nu <= tr.nu_max) || !(p.omega > 0.0) || !(p.beta1 < 1.0) ||
        !(p.phi1 < 1.0) || !(p.d < 1.0) || !std::isfinite(p.mu)) {
      return std::numeric_limits<double>::infinity();
    }
    const auto lambda = arch_infty_weights_unchecked(p, K);
    if (!weights_admissible(lambda)) return std::numeric_limits<double>::infinity();
    const ArchRecursion rec(p, K, mean_square_about(returns, p.mu));
    const auto e = evaluate(returns, p, rec, options.discard, scratch);
    return e.ok ? -e.loglik : std::numeric_limits<double>::infinity();
  };

  // Deterministic starting grid in (beta1, phi1, d, nu); starts past the
  // first are jittered in transformed space from the seed.
  struct Seed { double beta1, phi1, d, nu; };
  const Seed grid[] = {{0.30, 0.10, 0.30, 1.5}, {0.50, 0.20, 0.40, 2.0},
                       {0.20, 0.10, 0.15, 1.2}, {0.60, 0.30, 0.45, 2.5}};
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> jitter(0.0, 0.25);

  std::vector<std::vector<double>> starts;
  for (int s = 0; s < std::max(1, options.starts); ++s) {
    const Seed& g = grid[s % 4];
    FigarchParams p{mean, 1.0, g.beta1, g.phi1, g.d, g.nu};
    std::vector<double> x = tr.to_vector(p);
    if (s > 0) {
      for (std::size_t i = 2; i < 6; ++i) x[i] += jitter(rng);
    }
    p = tr.to_params(x);
    p.nu = std::clamp(p.nu, tr.nu_min * 1.05, tr.nu_max * 0.95);
    // omega chosen so the implied long-run level sits near the sample variance
    const auto lambda = arch_infty_weights_unchecked(p, K);
    double lambda_sum = 0.0;
    for (double w : lambda) lambda_sum += w;
    p.omega = var * (1.0 - p.beta1) * std::max(1.0 - lambda_sum, 0.05);
    starts.push_back(tr.to_vector(p));
  }

  const std::vector<double> step = {0.25 * sd, 0.5, 0.5, 0.5, 0.5, 0.2};
  NelderMeadOptions nm_opts;
  nm_opts.ftol = options.ftol;
  nm_opts.max_iterations = options.max_iterations;

  auto run_start = [&](const std::vector<double>& x0) {
    StartOutcome out;
    std::vector<double> scratch;
    auto f = [&](std::span<const double> x) { return objective(x, scratch); };
    if (!std::isfinite(f(x0))) return out;
    out.admissible = true;
    out.nm = nelder_mead(f, x0, step, nm_opts);
    out.iterations = out.nm.iterations;
    // Restart from the optimum until a fresh simplex no longer improves it;
    // guards against premature collapse of the simplex.
    for (int round = 0; round < 3 && out.nm.converged; ++round) {
      std::vector<double> half(step.size());
      for (std::size_t i = 0; i < step.size(); ++i) half[i] = 0.5 * step[i];
      NelderMeadOptions polish = nm_opts;
      polish.max_iterations = std::max(0, options.max_iterations - out.iterations);
      auto again = nelder_mead(f, out.nm.x, half, polish);
      out.iterations += again.iterations;
      const double gain = out.nm.f - again.f;
      if (again.f <= out.nm.f) out.nm = again;
      if (gain <= options.ftol) break;
    }
    return out;
  };

  std::vector<std::future<StartOutcome>> jobs;
  for (const auto& x0 : starts) {
    jobs.push_back(std::async(std::launch::async, run_start, std::cref(x0)));
  }
  std::vector<StartOutcome> outcomes;
  for (auto& j : jobs) outcomes.push_back(j.get());

  int best = -1;
  int admissible = 0;
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    if (!outcomes[s].admissible) continue;
    ++admissible;
    if (best < 0 || outcomes[s].nm.f < outcomes[static_cast<std::size_t>(best)].nm.f) {
      best = static_cast<int>(s);
    }
  }
  if (best < 0) throw Error(ErrorCode::NoAdmissibleStart, "no admissible starting point");
  const auto& chosen = outcomes[static_cast<std::size_t>(best)];
  if (!std::isfinite(chosen.nm.f)) throw Error(ErrorCode::NoAdmissibleStart, "no finite likelihood");
  const bool any_converged =
      std::any_of(outcomes.begin(), outcomes.end(),
                  [](const StartOutcome& o) { return o.admissible && o.nm.converged; });
  if (!any_converged) {
    throw Error(ErrorCode::NoConvergence, "no start reached the log-likelihood tolerance");
  }

  result.params = tr.to_params(chosen.nm.x);
  result.truncation = K;
  result.discard = options.discard;
  FilterOptions fo;
  fo.truncation = K;
  fo.discard = options.discard;
  result.loglik = log_likelihood(returns, result.params, fo);
  result.converged = chosen.nm.converged;
  result.iterations = chosen.iterations;
  result.restarts_used = admissible;
  if (!result.converged) result.warnings.push_back("best start hit the iteration cap");
  return result;
}

double conditional_quantile(const FilterState& state, const FigarchParams& params, double p,
                            std::size_t index) {
  if (index >= state.m_next.size() || index >= state.h.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "quantile index outside the filtered range");
  }
  return state.m_next[index] + std::sqrt(state.h[index]) * ged_quantile(p, params.nu);
}

}  // namespace rangevol
