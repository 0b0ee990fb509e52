#pragma once

#include <string>
#include <vector>

namespace gcenter::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool sticks = false;  ///< vertical lines from zero instead of a polyline
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 640;
  int height = 400;
};

/// Standalone SVG document with axes, ticks and a legend.
std::string render(const Plot& plot);

}  // namespace gcenter::svg
