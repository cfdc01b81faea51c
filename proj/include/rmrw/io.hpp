#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace rmrw {

/// 64-bit FNV-1a digest rendered as 16 hex characters.
std::string fnv1a_hex(std::string_view bytes);

/// Formats with 17 significant digits so doubles survive a text round trip.
std::string format_double(double v);

/// Comma separated output; an optional `# manifest: <hash>` line comes first.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& manifest_hash = {});

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::string path_;
};

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

struct BarSeries {
  std::vector<double> edges;   // size = counts.size() + 1
  std::vector<double> counts;
};

/// Standalone SVG bar chart of one histogram.
void write_svg_bars(const std::string& path, const BarSeries& series, const std::string& title,
                    const std::string& xlabel, const std::string& manifest_hash = {});

/// Standalone SVG line chart; every series shares the x grid.
void write_svg_lines(const std::string& path, const std::vector<double>& x,
                     const std::vector<std::vector<double>>& ys,
                     const std::vector<std::string>& labels, const std::string& title,
                     const std::string& manifest_hash = {});

}  // namespace rmrw
