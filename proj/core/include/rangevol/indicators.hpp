#pragma once

#include <optional>
#include <span>
#include <vector>

namespace rangevol {

using OptionalSeries = std::vector<std::optional<double>>;

/// Trailing simple moving average; absent until `window` consecutive defined
/// values are available. Throws EmptyInput on an empty series.
OptionalSeries sma(std::span<const std::optional<double>> values, int window);
OptionalSeries sma(std::span<const double> values, int window);

struct BollingerBands {
  OptionalSeries mid;
  OptionalSeries upper;
  OptionalSeries lower;
};

/// mid = SMA, bands = mid +/- width * trailing sample standard deviation.
BollingerBands bollinger(std::span<const std::optional<double>> values, int window = 12,
                         double width = 2.0);
BollingerBands bollinger(std::span<const double> values, int window = 12, double width = 2.0);

/// Wilder RSI. The first value appears at index `period`; the seed averages
/// are simple means of the first `period` changes. Flat input gives 50.
OptionalSeries rsi(std::span<const double> closes, int period = 14);

/// Interpolated order statistic: position p * (n - 1) in the sorted defined
/// values, so p = 0 is the minimum and p = 1 the maximum.
double percentile(std::span<const std::optional<double>> values, double p);
double percentile(std::span<const double> values, double p);

}  // namespace rangevol
