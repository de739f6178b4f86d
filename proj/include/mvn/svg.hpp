#pragma once

#include <string>
#include <vector>

namespace mvn {

struct ChartPoint {
  double x = 0.0;     // channel count
  double mean = 0.0;  // mean accuracy
  double band = 0.0;  // one standard deviation
};

struct ChartSeries {
  std::string name;
  std::vector<ChartPoint> points;  // sorted by x before rendering
};

// Static line chart: one dashed polyline per series with a +-1 std band,
// plain text-emitted SVG with no plotting dependency.
std::string render_chart_svg(const std::string& title, std::vector<ChartSeries> series,
                             int width = 640, int height = 420);

}  // namespace mvn
