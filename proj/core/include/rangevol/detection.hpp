#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "rangevol/indicators.hpp"
#include "rangevol/range_vol.hpp"
#include "rangevol/series.hpp"

namespace rangevol {

enum class DetectionMode { Strict, Hysteresis };

std::string_view to_string(DetectionMode mode);
std::optional<DetectionMode> parse_detection_mode(std::string_view name);

struct DetectionConfig {
  int ma_window = 12;
  double upper_pct = 0.85;
  double lower_pct = 0.20;
  DetectionMode mode = DetectionMode::Hysteresis;

  /// Throws InvalidConfig unless 0 < lower < upper < 1 and ma_window >= 2.
  void validate() const;
};

struct DetectionResult {
  std::vector<bool> flags;
  OptionalSeries moving_average;
  double upper_threshold = 0.0;  // percentile(upper_pct) over all defined values
  double lower_threshold = 0.0;  // percentile(lower_pct) over all defined values
  DetectionConfig config;

  std::size_t flagged_count() const;
};

/// Volatility shock rule. A month needs a defined value and a defined
/// moving average to be flagged.
///  - strict: vol > SMA and vol > Q_upper.
///  - hysteresis: a run starts when vol > SMA and vol > Q_upper and
///    continues while vol > SMA and vol >= Q_lower.
/// Throws InsufficientHistory when fewer than ma_window values are defined.
DetectionResult flag_months(const VolSeries& vol, const DetectionConfig& config = {});

struct Episode {
  YearMonth start;
  YearMonth end;
  YearMonth peak_month;
  double peak_vol = 0.0;
  std::size_t length = 0;
  std::size_t start_index = 0;
  std::size_t end_index = 0;
};

/// Maximal runs of flagged months; the peak is the largest value in the run,
/// earliest month on ties.
std::vector<Episode> segment_episodes(const std::vector<bool>& flags, const VolSeries& vol);

}  // namespace rangevol
