#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rangevol/series.hpp"

namespace rangevol {

enum class EstimatorId { CC, P, GK, RS, GKYZ, YZ };

inline constexpr std::array<EstimatorId, 6> kAllEstimators = {
    EstimatorId::CC, EstimatorId::P,    EstimatorId::GK,
    EstimatorId::RS, EstimatorId::GKYZ, EstimatorId::YZ};

/// Lower-case short name: cc, p, gk, rs, gkyz, yz.
std::string_view to_string(EstimatorId id);
std::optional<EstimatorId> parse_estimator(std::string_view name);

/// Rolling-window volatility for one estimator, aligned to the input bars.
/// `variance` is the raw per-period window variance; `values` is the
/// annualized volatility sqrt(N) * sqrt(variance), absent during warm-up and
/// wherever the window variance came out negative.
struct VolSeries {
  EstimatorId estimator = EstimatorId::YZ;
  std::vector<YearMonth> periods;
  std::vector<std::optional<double>> values;
  std::vector<std::optional<double>> variance;
  std::size_t warmup = 0;
  AnnualizationConfig config;
  std::vector<std::string> diagnostics;

  std::size_t size() const { return values.size(); }
  std::size_t defined_count() const;
};

// Per-bar contributions.
double parkinson_term(double range);
double garman_klass_term(double range, double open_close);
/// ln(H/C) ln(H/O) + ln(L/C) ln(L/O); non-negative for bars inside their envelope.
double rogers_satchell_term(const PriceBar& bar);

/// (alpha - 1) / (alpha + (n + 1) / (n - 1)). Throws WindowTooShort for n < 2.
double yz_weight(int n, double alpha = 1.34);

VolSeries close_to_close(const OhlcSeries& series, const AnnualizationConfig& config = {});
VolSeries parkinson(const OhlcSeries& series, const AnnualizationConfig& config = {});
VolSeries garman_klass(const OhlcSeries& series, const AnnualizationConfig& config = {});
VolSeries rogers_satchell(const OhlcSeries& series, const AnnualizationConfig& config = {});
VolSeries gk_yang_zhang(const OhlcSeries& series, const AnnualizationConfig& config = {});
VolSeries yang_zhang(const OhlcSeries& series, const AnnualizationConfig& config = {},
                     double alpha = 1.34);

VolSeries estimate(EstimatorId id, const OhlcSeries& series, const AnnualizationConfig& config = {});
std::map<EstimatorId, VolSeries> estimate_all(const OhlcSeries& series,
                                              const AnnualizationConfig& config = {});

}  // namespace rangevol
