#pragma once

#include <cstdint>
#include <span>

namespace spuct {

/// Ordinary least-squares slope of log(error) against log(n). Requires at
/// least 3 points, strictly increasing budgets and strictly positive errors.
double fit_polynomial_rate(std::span<const double> budgets, std::span<const double> errors);

/// Two-sided Welch t-test p-value from summary statistics (sample variances).
/// Degenerate inputs with both variances 0 return 1 for equal means and 0
/// otherwise.
double welch_t_test(double mean_a, double var_a, std::uint64_t n_a, double mean_b, double var_b, std::uint64_t n_b);

struct SampleSummary {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n - 1); 0 for a single sample
  double stddev() const;
  double stderr_mean() const;
};

SampleSummary summarize(std::span<const double> xs);

}  // namespace spuct
