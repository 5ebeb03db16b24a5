#include "rangevol/detection.hpp"

#include <algorithm>

#include "rangevol/error.hpp"

namespace rangevol {

std::string_view to_string(DetectionMode mode) {
  return mode == DetectionMode::Strict ? "strict" : "hysteresis";
}

std::optional<DetectionMode> parse_detection_mode(std::string_view name) {
  if (name == "strict") return DetectionMode::Strict;
  if (name == "hysteresis") return DetectionMode::Hysteresis;
  return std::nullopt;
}

void DetectionConfig::validate() const {
  if (!(lower_pct > 0.0 && lower_pct < upper_pct && upper_pct < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "percentiles must satisfy 0 < lower < upper < 1");
  }
  if (ma_window < 2) throw Error(ErrorCode::InvalidConfig, "moving-average window must be >= 2");
}

std::size_t DetectionResult::flagged_count() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

DetectionResult flag_months(const VolSeries& vol, const DetectionConfig& config) {
  config.validate();
  if (vol.defined_count() < static_cast<std::size_t>(config.ma_window)) {
    throw Error(ErrorCode::InsufficientHistory,
                "need at least ma_window defined volatility values");
  }
  DetectionResult out;
  out.config = config;
  out.moving_average = sma(vol.values, config.ma_window);
  out.upper_threshold = percentile(vol.values, config.upper_pct);
  out.lower_threshold = percentile(vol.values, config.lower_pct);
  out.flags.assign(vol.size(), false);

  bool active = false;
  for (std::size_t t = 0; t < vol.size(); ++t) {
    const auto& v = vol.values[t];
    const auto& ma = out.moving_average[t];
    if (!v || !ma) {
      active = false;
      continue;
    }
    const bool above_ma = *v > *ma;
    const bool starts = above_ma && *v > out.upper_threshold;
    if (config.mode == DetectionMode::Strict) {
      out.flags[t] = starts;
      continue;
    }
    active = active ? above_ma && *v >= out.lower_threshold : starts;
    out.flags[t] = active;
  }
  return out;
}

std::vector<Episode> segment_episodes(const std::vector<bool>& flags, const VolSeries& vol) {
  if (flags.size() != vol.size()) {
    throw Error(ErrorCode::LengthMismatch, "flags and volatility series differ in length");
  }
  std::vector<Episode> episodes;
  std::size_t t = 0;
  while (t < flags.size()) {
    if (!flags[t]) {
      ++t;
      continue;
    }
    Episode e;
    e.start_index = t;
    std::size_t peak = t;
    double peak_value = vol.values[t].value_or(0.0);
    while (t < flags.size() && flags[t]) {
      const double v = vol.values[t].value_or(0.0);
      if (v > peak_value) {
        peak_value = v;
        peak = t;
      }
      ++t;
    }
    e.end_index = t - 1;
    e.start = vol.periods[e.start_index];
    e.end = vol.periods[e.end_index];
    e.peak_month = vol.periods[peak];
    e.peak_vol = peak_value;
    e.length = e.end_index - e.start_index + 1;
    episodes.push_back(e);
  }
  return episodes;
}

}  // namespace rangevol
