#include "pfopt/bench/rates.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pfopt/bench/config.hpp"
#include "pfopt/bench/runner.hpp"

namespace pfopt::bench {

RateReport compare_rates(std::vector<RatePoint> points) {
  if (points.size() < 2) throw std::invalid_argument("compare_rates: need at least 2 summaries");
  std::set<std::uint64_t> ts;
  for (const RatePoint& p : points) {
    ts.insert(p.T);
    if (p.algorithm != points.front().algorithm)
      throw std::invalid_argument("compare_rates: summaries mix algorithms (" + p.algorithm +
                                  " vs " + points.front().algorithm + ")");
    if (!(p.median > 0.0) || !std::isfinite(p.median))
      throw std::invalid_argument("compare_rates: medians must be positive and finite");
  }
  if (ts.size() < 2) throw std::invalid_argument("compare_rates: need at least 2 distinct T values");

  std::sort(points.begin(), points.end(),
            [](const RatePoint& a, const RatePoint& b) { return a.T < b.T; });

  double sx = 0.0, sy = 0.0;
  for (const RatePoint& p : points) {
    sx += std::log(static_cast<double>(p.T));
    sy += std::log(p.median);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (const RatePoint& p : points) {
    const double dx = std::log(static_cast<double>(p.T)) - mx;
    sxy += dx * (std::log(p.median) - my);
    sxx += dx * dx;
  }

  RateReport report;
  report.slope = sxy / sxx;
  for (const RatePoint& p : points)
    report.ratio_to_benchmark.push_back(p.benchmark > 0.0 ? p.median / p.benchmark
                                                          : std::numeric_limits<double>::quiet_NaN());
  report.points = std::move(points);
  return report;
}

RatePoint read_aggregate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open aggregate file: " + path);
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row))
    throw ConfigError("aggregate file truncated: " + path);
  if (header != "algorithm,T,seeds,median,q10,q90,benchmark,max_queries,failures")
    throw ConfigError("unrecognized aggregate header in " + path);

  std::vector<std::string> fields;
  std::stringstream ss(row);
  std::string item;
  while (std::getline(ss, item, ',')) fields.push_back(item);
  if (fields.size() != 9) throw ConfigError("malformed aggregate row in " + path);

  const auto parse_num = [&](const std::string& s, auto& out) {
    const auto [q, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || q != s.data() + s.size())
      throw ConfigError("malformed number '" + s + "' in " + path);
  };
  RatePoint p;
  p.algorithm = fields[0];
  parse_num(fields[1], p.T);
  parse_num(fields[3], p.median);
  parse_num(fields[6], p.benchmark);
  return p;
}

std::string format_rate_report(const RateReport& report) {
  std::string out = "log-log slope: " + format_double(report.slope) + "\n";
  out += "T,median,benchmark,ratio\n";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const RatePoint& p = report.points[i];
    out += std::to_string(p.T) + "," + format_double(p.median) + "," +
           format_double(p.benchmark) + "," + format_double(report.ratio_to_benchmark[i]) + "\n";
  }
  return out;
}

}  // namespace pfopt::bench
