#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rangevol/figarch.hpp"
#include "rangevol/range_vol.hpp"
#include "rangevol/series.hpp"

namespace rangevol {

/// Seedable generator. Independent streams are derived from (seed, stream)
/// with a splitmix64 mix, so replication r of a run is reproducible on its own.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  double normal() { return normal_(engine_); }
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Seed of stream `stream_id` derived from a run seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream_id);

/// How the intra-period high and low are taken from the simulated path.
enum class ExtremaMode {
  Discrete,  // extremes of the grid points only (biased low for coarse grids)
  Bridge,    // exact extremes of the continuous path between grid points
};

struct GbmSettings {
  double mu_annual = 0.0;
  double sigma_annual = 0.2;
  double delta_t = 1.0 / 12.0;
  int steps_per_period = 1024;
  std::size_t periods = 120;
  std::uint64_t seed = 1;
  double start_price = 100.0;
  YearMonth start_period{2000, 1};
  ExtremaMode extrema = ExtremaMode::Bridge;
  std::string market_id = "gbm";
};

/// Geometric Brownian motion sampled on `steps_per_period` steps per bar.
/// Bars chain: each open equals the previous close.
OhlcSeries simulate_gbm_ohlc(const GbmSettings& settings);

struct FigarchSimOptions {
  std::size_t burn_in = 500;
  std::size_t truncation = 1000;
  /// Pre-sample eps^2; defaults to the truncated long-run level
  /// omega / ((1 - beta1)(1 - sum lambda)).
  std::optional<double> presample;
};

struct FigarchPath {
  std::vector<double> returns;
  std::vector<double> h;
  std::vector<double> z;
  double presample = 0.0;
};

/// fiGARCH-GED returns with inverse-CDF GED innovations. Throws
/// InadmissibleParams for parameters outside the box or with negative weights.
FigarchPath simulate_figarch(const FigarchParams& params, std::size_t periods, std::uint64_t seed,
                             const FigarchSimOptions& options = {});

struct EstimatorStats {
  double mean_variance = 0.0;  // mean of window per-period variance estimates
  double dispersion = 0.0;     // sample variance of those estimates
  double bias = 0.0;           // mean_variance - sigma^2 dt
  double relative_bias = 0.0;  // bias / (sigma^2 dt)
  std::size_t windows = 0;
};

struct McStats {
  double true_variance = 0.0;  // sigma^2 dt
  std::size_t replications = 0;
  std::size_t periods_per_replication = 0;
  std::map<EstimatorId, EstimatorStats> estimators;
};

/// Runs `replications` independent GBM series (replication r uses stream r
/// of `seed`) through estimate_all and pools the window estimates.
McStats mc_estimator_stats(const GbmSettings& scenario, const AnnualizationConfig& config,
                           std::size_t replications, std::uint64_t seed);

}  // namespace rangevol
