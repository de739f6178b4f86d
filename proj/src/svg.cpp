#include "mvn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mvn/errors.hpp"

namespace mvn {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_chart_svg(const std::string& title, std::vector<ChartSeries> series,
                             int width, int height) {
  if (series.empty()) throw InputError("chart: no series");
  for (auto& s : series) {
    if (s.points.empty()) throw InputError("chart: series '" + s.name + "' has no points");
    std::sort(s.points.begin(), s.points.end(),
              [](const ChartPoint& a, const ChartPoint& b) { return a.x < b.x; });
  }

  double x_min = series[0].points.front().x, x_max = x_min;
  double y_min = 1.0, y_max = 0.0;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      x_min = std::min(x_min, p.x);
      x_max = std::max(x_max, p.x);
      y_min = std::min(y_min, p.mean - p.band);
      y_max = std::max(y_max, p.mean + p.band);
    }
  if (x_max == x_min) x_max = x_min + 1.0;
  y_min = std::max(0.0, std::floor((y_min - 0.02) * 10.0) / 10.0);
  y_max = std::min(1.0, std::ceil((y_max + 0.02) * 10.0) / 10.0);
  if (y_max <= y_min) y_max = y_min + 0.1;

  const double ml = 56, mr = 16, mt = 34, mb = 44;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return mt + (y_max - y) / (y_max - y_min) * ph; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
    << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"14\">" << esc(title) << "</text>\n";

  // axes
  s << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(ml + pw)
    << "\" y2=\"" << num(mt + ph) << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt) << "\" x2=\"" << num(ml)
    << "\" y2=\"" << num(mt + ph) << "\" stroke=\"black\"/>\n";

  // y ticks every 0.1
  for (double y = y_min; y <= y_max + 1e-9; y += 0.1) {
    s << "<line x1=\"" << num(ml - 4) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(ml)
      << "\" y2=\"" << num(py(y)) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(py(y) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(y)
      << "</text>\n";
    s << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(ml + pw)
      << "\" y2=\"" << num(py(y)) << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
  }
  // x ticks on the union of sample positions
  std::vector<double> xs;
  for (const auto& sr : series)
    for (const auto& p : sr.points) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    s << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(mt + ph) << "\" x2=\""
      << num(px(x)) << "\" y2=\"" << num(mt + ph + 4) << "\" stroke=\"black\"/>\n";
    char lbl[24];
    std::snprintf(lbl, sizeof(lbl), "%g", x);
    s << "<text x=\"" << num(px(x)) << "\" y=\"" << num(mt + ph + 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << lbl
      << "</text>\n";
  }
  s << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(mt + ph + 32)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">channels"
    << "</text>\n";
  s << "<text x=\"14\" y=\"" << num(mt + ph / 2)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
    << "transform=\"rotate(-90 14 " << num(mt + ph / 2) << ")\">accuracy</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const auto& sr = series[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    // +-1 std band
    std::ostringstream band;
    for (const auto& p : sr.points) band << num(px(p.x)) << "," << num(py(p.mean + p.band)) << " ";
    for (auto it = sr.points.rbegin(); it != sr.points.rend(); ++it)
      band << num(px(it->x)) << "," << num(py(it->mean - it->band)) << " ";
    s << "<polygon points=\"" << band.str() << "\" fill=\"" << color
      << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    // dotted mean curve
    std::ostringstream line;
    for (const auto& p : sr.points) line << num(px(p.x)) << "," << num(py(p.mean)) << " ";
    s << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" stroke-dasharray=\"4 3\"/>\n";
    // legend entry
    double ly = mt + 14.0 * i + 6;
    s << "<line x1=\"" << num(ml + pw - 110) << "\" y1=\"" << num(ly) << "\" x2=\""
      << num(ml + pw - 90) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\" stroke-dasharray=\"4 3\"/>\n";
    s << "<text x=\"" << num(ml + pw - 84) << "\" y=\"" << num(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(sr.name) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace mvn
