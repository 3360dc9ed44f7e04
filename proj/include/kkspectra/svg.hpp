/// Minimal self-contained SVG line/scatter plots; no external renderer.
#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace kks {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

inline std::string svg_plot(const std::string& title, const std::vector<SvgSeries>& series,
                            int width = 640, int height = 420) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmin > xmax) xmin = 0, xmax = 1;
  if (ymin > ymax) ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ml = 60, mr = 20, mt = 40, mb = 40;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + t * (xmax - xmin) / 4;
    const double yv = ymin + t * (ymax - ymin) / 4;
    out << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << xv << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 3
        << "\" text-anchor=\"end\" font-size=\"10\">" << yv << "</text>\n";
  }
  int legend_y = static_cast<int>(mt);
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    out << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
          << "\" r=\"2.4\" fill=\"" << s.color << "\"/>\n";
    if (!s.label.empty()) {
      out << "<text x=\"" << width - mr - 4 << "\" y=\"" << legend_y
          << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << s.color << "\">" << s.label
          << "</text>\n";
      legend_y += 14;
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace kks
