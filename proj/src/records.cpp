#include "spuct/records.hpp"

#include <array>
#include <charconv>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace spuct {

namespace {

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos) throw std::invalid_argument("csv: field contains a separator: " + s);
}

template <typename T>
T parse_number(std::string_view field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::invalid_argument("csv: cannot parse number '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

bool is_known_metric(std::string_view metric) {
  return metric == "root_abs_error" || metric == "discounted_return" || metric == "concentration_freq" || metric == "slope";
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kCsvHeader << '\n';
  for (const ExperimentRecord& r : records) {
    check_field(r.env);
    check_field(r.algorithm);
    check_field(r.metric);
    out << r.env << ',' << r.algorithm << ',' << format_double(r.p) << ',' << format_double(r.C) << ','
        << r.n_simulations << ',' << r.seed << ',' << r.metric << ',' << format_double(r.value) << '\n';
  }
}

std::string to_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

std::vector<ExperimentRecord> parse_csv(std::string_view text) {
  std::vector<ExperimentRecord> out;
  bool header = true;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header) {
      if (line != kCsvHeader) throw std::invalid_argument("csv: unexpected header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::array<std::string_view, 8> f;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (count == f.size()) throw std::invalid_argument("csv: too many fields");
      f[count++] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count != f.size()) throw std::invalid_argument("csv: expected 8 fields");
    out.push_back({std::string(f[0]), std::string(f[1]), parse_number<double>(f[2]), parse_number<double>(f[3]),
                   parse_number<std::uint64_t>(f[4]), parse_number<std::uint64_t>(f[5]), std::string(f[6]),
                   parse_number<double>(f[7])});
  }
  if (header) throw std::invalid_argument("csv: missing header");
  return out;
}

}  // namespace spuct
