#include "spuct/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spuct {

double power_mean(std::span<const double> values, std::span<const std::uint64_t> counts, double p) {
  if (values.empty()) throw std::invalid_argument("power_mean: empty input");
  if (values.size() != counts.size()) throw std::invalid_argument("power_mean: values/counts length mismatch");
  if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument("power_mean: p must be finite and >= 1");

  std::uint64_t total = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("power_mean: values must be finite and nonnegative");
    if (counts[i] == 0) continue;
    total += counts[i];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (total == 0) throw std::invalid_argument("power_mean: all counts are zero");

  const double n = static_cast<double>(total);
  if (p == 1.0) return weighted_mean(values, counts);
  double result = 0.0;
  if (p == 2.0) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += static_cast<double>(counts[i]) * values[i] * values[i];
    result = std::sqrt(sum / n);
  } else {
    if (hi == 0.0) return 0.0;
    // sum_i w_i (x_i/hi)^p lies in (0, 1]; terms are exp(p * log(x_i/hi)).
    double scaled = 0.0;
    const double log_hi = std::log(hi);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (counts[i] == 0 || values[i] == 0.0) continue;
      scaled += static_cast<double>(counts[i]) * std::exp(p * (std::log(values[i]) - log_hi));
    }
    result = hi * std::exp((std::log(scaled) - std::log(n)) / p);
  }
  return std::clamp(result, lo, hi);
}

double weighted_mean(std::span<const double> values, std::span<const std::uint64_t> counts) {
  if (values.empty()) throw std::invalid_argument("weighted_mean: empty input");
  if (values.size() != counts.size()) throw std::invalid_argument("weighted_mean: values/counts length mismatch");
  double sum = 0.0;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += static_cast<double>(counts[i]) * values[i];
    total += counts[i];
  }
  if (total == 0) throw std::invalid_argument("weighted_mean: all counts are zero");
  return sum / static_cast<double>(total);
}

RunningMean running_mean_update(RunningMean rm, double sample) {
  if (!std::isfinite(sample)) throw std::invalid_argument("running_mean_update: non-finite sample");
  const double prev = static_cast<double>(rm.count);
  return {(rm.mean * prev + sample) / (prev + 1.0), rm.count + 1};
}

}  // namespace spuct
