#include "rangevol/ged.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rangevol/error.hpp"

namespace rangevol {

namespace {

// Boost's incomplete gamma routines are accurate to a few ulp over the
// argument ranges used here (shape 1/nu for nu in [0.3, 10]).
double upper_reg_gamma(double a, double x) { return boost::math::gamma_q(a, x); }

double log_normaliser(const GedShape& s) {
  return std::log(s.nu) - std::numbers::ln2 - std::log(s.beta) -
         boost::math::lgamma(1.0 / s.nu);
}

}  // namespace

GedShape GedShape::make(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw Error(ErrorCode::NonPositiveShape, "GED shape must be positive, got " + std::to_string(nu));
  }
  return GedShape{nu, std::sqrt(boost::math::tgamma_ratio(1.0 / nu, 3.0 / nu))};
}

double ged_scale(double nu) { return GedShape::make(nu).beta; }

GedLogDensity::GedLogDensity(double nu) : shape_(GedShape::make(nu)), log_norm_(log_normaliser(shape_)) {}

double GedLogDensity::operator()(double z) const {
  return log_norm_ - std::pow(std::abs(z) / shape_.beta, shape_.nu);
}

double ged_log_density(double z, double nu) { return GedLogDensity(nu)(z); }

double ged_pdf(double z, double nu) { return std::exp(ged_log_density(z, nu)); }

double ged_cdf(double z, double nu) {
  const GedShape s = GedShape::make(nu);
  if (std::isnan(z)) return z;
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  const double y = std::pow(std::abs(z) / s.beta, s.nu);
  const double tail = 0.5 * upper_reg_gamma(1.0 / s.nu, y);
  return z < 0.0 ? tail : 1.0 - tail;
}

double ged_quantile(double p, double nu) {
  const GedShape s = GedShape::make(nu);
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange, "probability must lie in (0,1)");
  }
  if (p == 0.5) return 0.0;

  // (|z|/beta)^nu ~ Gamma(1/nu, 1), so P(|Z| > q) = Q(1/nu, (q/beta)^nu).
  const double target = 2.0 * std::min(p, 1.0 - p);
  double y = 0.0;
  try {
    y = boost::math::gamma_q_inv(1.0 / s.nu, target);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::NoConvergence, std::string("GED quantile inversion failed: ") + e.what());
  }
  if (!std::isfinite(y)) throw Error(ErrorCode::NoConvergence, "GED quantile inversion overflowed");

  const double magnitude = s.beta * std::pow(y, 1.0 / s.nu);
  return p < 0.5 ? -magnitude : magnitude;
}

double ged_kurtosis(double nu) {
  const GedShape s = GedShape::make(nu);
  const double a = 1.0 / s.nu;
  return boost::math::tgamma_ratio(5.0 * a, 3.0 * a) * boost::math::tgamma_ratio(a, 3.0 * a);
}

}  // namespace rangevol
