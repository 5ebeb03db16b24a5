#pragma once

// Standardized (unit-variance) generalized error distribution.
//
//   f(z; nu) = nu / (2 beta Gamma(1/nu)) * exp(-(|z|/beta)^nu),
//   beta(nu) = sqrt(Gamma(1/nu) / Gamma(3/nu)).
//
// nu = 2 is the standard normal, nu < 2 has heavier tails. The CDF uses the
// fact that (|z|/beta)^nu is Gamma(1/nu, 1) distributed, so both the CDF and
// its inverse reduce to the regularized incomplete gamma function.

namespace rangevol {

struct GedShape {
  double nu = 2.0;
  double beta = 1.4142135623730951;

  /// Throws NonPositiveShape unless nu is finite and > 0.
  static GedShape make(double nu);
};

double ged_scale(double nu);
double ged_pdf(double z, double nu);
double ged_log_density(double z, double nu);
double ged_cdf(double z, double nu);
/// Inverse CDF. Throws ProbabilityOutOfRange unless 0 < p < 1 and
/// NoConvergence if the incomplete-gamma inversion stalls.
double ged_quantile(double p, double nu);
/// Gamma(5/nu) Gamma(1/nu) / Gamma(3/nu)^2.
double ged_kurtosis(double nu);

/// Precomputed constants for repeated log-density evaluation at one shape.
class GedLogDensity {
 public:
  explicit GedLogDensity(double nu);
  double operator()(double z) const;
  double nu() const { return shape_.nu; }

 private:
  GedShape shape_;
  double log_norm_;
};

}  // namespace rangevol
