#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace spuct {

/// One measurement row.
struct ExperimentRecord {
  std::string env;
  std::string algorithm;
  double p = 1.0;
  double C = 0.0;
  std::uint64_t n_simulations = 0;
  std::uint64_t seed = 0;
  std::string metric;  // root_abs_error | discounted_return | concentration_freq | slope
  double value = 0.0;

  bool operator==(const ExperimentRecord&) const = default;
};

inline constexpr std::string_view kCsvHeader = "env,algorithm,p,C,n_simulations,seed,metric,value";

bool is_known_metric(std::string_view metric);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
std::string to_csv(const std::vector<ExperimentRecord>& records);
/// Parses text produced by write_csv. Throws std::invalid_argument on a bad
/// header, wrong field count or unparsable number.
std::vector<ExperimentRecord> parse_csv(std::string_view text);

}  // namespace spuct
