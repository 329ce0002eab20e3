#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace milb {

struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Minimal SVG line chart with fixed axes [0,1] x [0,1] unless data exceeds.
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series);

}  // namespace milb
