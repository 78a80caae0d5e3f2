#include "spuct/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace spuct {

double fit_polynomial_rate(std::span<const double> budgets, std::span<const double> errors) {
  if (budgets.size() != errors.size()) throw std::invalid_argument("fit_polynomial_rate: length mismatch");
  if (budgets.size() < 3) throw std::invalid_argument("fit_polynomial_rate: need at least 3 points");
  const std::size_t m = budgets.size();
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(budgets[i] > 0.0) || (i > 0 && !(budgets[i] > budgets[i - 1]))) {
      throw std::invalid_argument("fit_polynomial_rate: budgets must be positive and strictly increasing");
    }
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i])) throw std::invalid_argument("fit_polynomial_rate: errors must be positive");
    sx += std::log(budgets[i]);
    sy += std::log(errors[i]);
  }
  const double mx = sx / static_cast<double>(m);
  const double my = sy / static_cast<double>(m);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(budgets[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double welch_t_test(double mean_a, double var_a, std::uint64_t n_a, double mean_b, double var_b, std::uint64_t n_b) {
  if (n_a < 2 || n_b < 2) throw std::invalid_argument("welch_t_test: need at least 2 samples per group");
  if (!(var_a >= 0.0) || !(var_b >= 0.0)) throw std::invalid_argument("welch_t_test: variances must be >= 0");
  const double se_a = var_a / static_cast<double>(n_a);
  const double se_b = var_b / static_cast<double>(n_b);
  const double se2 = se_a + se_b;
  if (se2 == 0.0) return mean_a == mean_b ? 1.0 : 0.0;
  const double t = (mean_a - mean_b) / std::sqrt(se2);
  const double df = se2 * se2 /
                    (se_a * se_a / static_cast<double>(n_a - 1) + se_b * se_b / static_cast<double>(n_b - 1));
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double SampleSummary::stddev() const { return std::sqrt(variance); }

double SampleSummary::stderr_mean() const {
  return count == 0 ? 0.0 : std::sqrt(variance / static_cast<double>(count));
}

SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<double>(xs.size() - 1);
  }
  return s;
}

}  // namespace spuct
