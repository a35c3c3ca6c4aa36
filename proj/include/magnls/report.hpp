#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace magnls {

inline constexpr const char* code_version = "magnls 1.0.0";

struct Verdict {
  std::string name;
  bool passed = false;
  double measured = 0;
  std::string tolerance;  // human-readable bound, e.g. "<= 1e-12" or "in [1.7, 2.3]"
  std::string detail;
};

struct RunManifest {
  std::string experiment;
  std::string config_hash;
  std::string version = code_version;
  std::string start_time;
  std::string end_time;
  std::vector<std::string> outputs;
  std::vector<Verdict> verdicts;

  bool all_passed() const;
  std::string to_json() const;
};

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);
std::string utc_timestamp();

/// Shortest round-trip decimal rendering (deterministic, '.' separator).
std::string format_number(double v);

/// RFC-4180 style CSV; fields are quoted when they contain ',', '"' or newlines.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Minimal CSV reader used to check that written files re-parse.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Native SVG line plot with axes and tick labels. Log axes drop
/// non-positive points.
void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series,
                    bool log_x = false, bool log_y = false);

}  // namespace magnls
