#include "milboundary/svg.hpp"

#include <algorithm>
#include <fstream>

namespace milb {

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series) {
  const int W = 640, H = 480, M = 56;  // canvas and margin
  double xmax = 1.0, ymax = 1.0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  auto px = [&](double x) { return M + x / xmax * (W - 2 * M); };
  auto py = [&](double y) { return H - M - y / ymax * (H - 2 * M); };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg: " + path.string());
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n";
  // axes
  out << "<line x1='" << M << "' y1='" << H - M << "' x2='" << W - M << "' y2='" << H - M
      << "' stroke='black'/>\n";
  out << "<line x1='" << M << "' y1='" << H - M << "' x2='" << M << "' y2='" << M
      << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmax * i / 5.0, fy = ymax * i / 5.0;
    out << "<text x='" << px(fx) << "' y='" << H - M + 18 << "' text-anchor='middle' font-size='10'>"
        << fx << "</text>\n";
    out << "<text x='" << M - 8 << "' y='" << py(fy) + 4 << "' text-anchor='end' font-size='10'>"
        << fy << "</text>\n";
  }
  out << "<text x='" << W / 2 << "' y='" << H - 12 << "' text-anchor='middle' font-size='12'>"
      << x_label << "</text>\n";
  out << "<text x='16' y='" << H / 2 << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
      << H / 2 << ")'>" << y_label << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const char* color = kColors[si % 6];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (const auto& [x, y] : series[si].points) out << px(x) << "," << py(y) << " ";
    out << "'/>\n";
    out << "<text x='" << W - M - 4 << "' y='" << M + 16 * static_cast<int>(si)
        << "' text-anchor='end' font-size='11' fill='" << color << "'>" << series[si].name
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace milb
