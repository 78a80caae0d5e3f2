#pragma once

#include <cstdint>
#include <span>

namespace spuct {

/// Weighted power mean (sum_i w_i x_i^p)^(1/p) with weights w_i = counts_i / sum(counts).
///
/// Values must be nonnegative and p >= 1. Entries with count 0 are ignored and
/// zero values contribute exactly 0. p = 1 and p = 2 take exact closed-form
/// paths; every other p is evaluated against the largest positively-weighted
/// value so that x^p cannot overflow or underflow for large p. For p != 1 the
/// result is clamped into [min, max] of the positively-weighted values; p = 1
/// returns the plain weighted mean sum(c_i x_i) / sum(c_i).
///
/// Throws std::invalid_argument on empty or mismatched input, negative or
/// non-finite values, all-zero counts, or p < 1.
double power_mean(std::span<const double> values, std::span<const std::uint64_t> counts, double p);

/// Count-weighted arithmetic mean sum(c_i x_i) / sum(c_i) over arbitrary
/// finite reals, accumulated in index order. Throws std::invalid_argument on
/// empty or mismatched input or all-zero counts.
double weighted_mean(std::span<const double> values, std::span<const std::uint64_t> counts);

/// Incremental sample mean.
struct RunningMean {
  double mean = 0.0;
  std::uint64_t count = 0;
};

/// Folds one sample: mean' = (mean * count + sample) / (count + 1).
/// Throws std::invalid_argument for a non-finite sample.
RunningMean running_mean_update(RunningMean rm, double sample);

}  // namespace spuct
