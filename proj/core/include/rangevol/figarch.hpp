#pragma once

// fiGARCH(1,d,1) with standardized GED innovations:
//
//   r_t = mu + eps_t,  eps_t = sqrt(h_t) z_t,  z_t ~ GED(0, 1, nu)
//   (1 - beta1 L) h_t = omega + [(1 - beta1 L) - (1 - phi1 L)(1 - L)^d] eps_t^2
//
// Variances are evaluated through the truncated ARCH(inf) form
//   h_t = omega / (1 - beta1) + sum_{j=1..K} lambda_j eps_{t-j}^2,
// with eps^2 before the sample start replaced by a pre-sample value.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rangevol {

struct FigarchParams {
  double mu = 0.0;
  double omega = 1.0;
  double beta1 = 0.0;
  double phi1 = 0.0;
  double d = 0.0;
  double nu = 2.0;

  /// Box constraints only (omega > 0, beta1/phi1/d in [0,1), nu > 0).
  /// Throws InadmissibleParams.
  void validate() const;
};

/// Truncation used when none is given: min(T, 1000).
std::size_t default_truncation(std::size_t sample_size);

/// Coefficients pi_0..pi_K of (1 - L)^d. d must lie in [0, 1].
std::vector<double> frac_diff_coeffs(double d, std::size_t K);

/// lambda_1..lambda_K of the ARCH(inf) representation (index 0 holds lambda_1).
/// Throws NegativeWeight when any weight is below -1e-12.
std::vector<double> arch_infty_weights(const FigarchParams& params, std::size_t K);
/// Same weights without the admissibility check.
std::vector<double> arch_infty_weights_unchecked(const FigarchParams& params, std::size_t K);
bool weights_admissible(std::span<const double> lambda);

/// Evaluates h_t from past squared residuals. Shared by the filter and the
/// simulator so both produce bit-identical variances for the same inputs.
class ArchRecursion {
 public:
  ArchRecursion(const FigarchParams& params, std::size_t K, double presample);

  /// h_t given eps2[0..t-1]; lags before the sample use the pre-sample value.
  double variance(std::span<const double> eps2, std::size_t t) const;

  std::size_t truncation() const { return reversed_.size(); }
  double intercept() const { return intercept_; }
  double presample() const { return presample_; }

 private:
  std::vector<double> reversed_;  // lambda_K .. lambda_1
  std::vector<double> tail_;      // tail_[t] = sum_{j>t} lambda_j, t = 0..K
  double intercept_;
  double presample_;
};

struct FilterOptions {
  std::optional<std::size_t> truncation;  // default min(T, 1000)
  std::optional<double> presample;        // default mean of (r - mu)^2
  std::size_t discard = 0;                // leading periods left out of the likelihood
};

struct FilterState {
  std::vector<double> h;
  std::vector<double> z;
  /// m_next[i] = x_i + mu, the conditional mean of x_{i+1}; empty when no
  /// log prices were supplied.
  std::vector<double> m_next;
  double loglik = 0.0;
  std::size_t truncation = 0;
  double presample = 0.0;
};

/// Minimum sample accepted by filter().
inline constexpr std::size_t kMinFilterLength = 30;

/// Runs the variance recursion over `returns`. When `log_prices` is given it
/// must hold x_0..x_T (one more entry than `returns`).
FilterState filter(std::span<const double> returns, const FigarchParams& params,
                   const FilterOptions& options = {},
                   std::span<const double> log_prices = {});

/// sum_t [ log f_GED(z_t; nu) - 0.5 ln h_t ].
double log_likelihood(std::span<const double> returns, const FigarchParams& params,
                      const FilterOptions& options = {});

/// False when the returns are constant up to rounding (spread below 1e-12
/// relative), i.e. no variance model can be identified.
bool has_variation(std::span<const double> returns);

struct FitOptions {
  int starts = 4;
  std::uint64_t seed = 42;
  int max_iterations = 5000;
  double ftol = 1e-7;
  std::optional<std::size_t> truncation;
  std::size_t discard = 0;
  double nu_min = 0.3;
  double nu_max = 10.0;
};

struct FitResult {
  FigarchParams params;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  int restarts_used = 0;
  std::size_t truncation = 0;
  std::size_t discard = 0;
  /// Set when the input had no variation and no model was estimated.
  bool degenerate = false;
  std::vector<std::string> warnings;
};

/// Quasi-maximum-likelihood fit by multi-start Nelder-Mead over transformed
/// parameters. Throws NoAdmissibleStart or NoConvergence.
FitResult fit(std::span<const double> returns, const FitOptions& options = {});

/// q_{p,i} = m_next[i] + sqrt(h[i]) * a_p(nu): conditional p-quantile of the
/// log price of period i+1 given information up to period i.
double conditional_quantile(const FilterState& state, const FigarchParams& params, double p,
                            std::size_t index);

}  // namespace rangevol
