#include "straintomo/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace straintomo {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_plot_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_y || y > 0.0);
  };
  auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!usable(s.x[k], s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, ty(s.y[k]));
      y1 = std::max(y1, ty(s.y[k]));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  std::ostringstream svg;
  svg << std::setprecision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(spec.title) << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double label_y = spec.log_y ? std::pow(10.0, fy) : fy;
    const double sx = px(fx);
    const double sy = kTop + (1.0 - k / 4.0) * ph;
    svg << "<text x=\"" << sx << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
        << std::setprecision(4) << fx << "</text>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
        << label_y << "</text>\n"
        << std::setprecision(6);
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n"
      << "<text transform=\"translate(16," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kColours[s % std::size(kColours)];
    std::ostringstream path;
    path << std::setprecision(6);
    bool first = true;
    for (std::size_t k = 0; k < std::min(series[s].x.size(), series[s].y.size()); ++k) {
      const double x = series[s].x[k], y = series[s].y[k];
      if (!usable(x, y)) continue;
      path << (first ? "M" : " L") << px(x) << ' ' << py(y);
      first = false;
      svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"" << colour
          << "\"/>\n";
    }
    if (!spec.markers_only && !first) {
      svg << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << colour
          << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(s);
    svg << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << ly - 9 << "\" width=\"12\" "
        << "height=\"3\" fill=\"" << colour << "\"/>\n"
        << "<text x=\"" << kWidth - kRight + 30 << "\" y=\"" << ly << "\">"
        << escape(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace straintomo
