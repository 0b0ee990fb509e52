#include "gcenter/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcenter/io.hpp"

namespace gcenter::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return io::format_fixed(v, 2); }

// About five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi)
{
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
  return out;
}

std::string tick_label(double v, double span)
{
  const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(span / 5.0))) + 1, 0, 6);
  return io::format_fixed(std::abs(v) < 1e-12 * span ? 0.0 : v, digits);
}

}  // namespace

std::string render(const Plot& plot)
{
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = 0.0, yhi = -xlo;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  if (!(xhi > xlo)) {
    xlo = std::isfinite(xlo) ? xlo - 1 : 0;
    xhi = xlo + 2;
  }
  if (!(yhi > ylo)) yhi = ylo + 1;
  const double pad = 0.05 * (xhi - xlo);
  xlo -= pad;
  xhi += pad;
  yhi += 0.05 * (yhi - ylo);

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double w = plot.width - left - right, h = plot.height - top - bottom;
  const auto px = [&](double x) { return left + (x - xlo) / (xhi - xlo) * w; };
  const auto py = [&](double y) { return top + h - (y - ylo) / (yhi - ylo) * h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(plot.width) + "\" height=\"" +
         std::to_string(plot.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(left + w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(plot.title) + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(xlo, xhi)) {
    out += "<line x1=\"" + num(px(t)) + "\" y1=\"" + num(top + h) + "\" x2=\"" + num(px(t)) + "\" y2=\"" +
           num(top + h + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(px(t)) + "\" y=\"" + num(top + h + 18) + "\" text-anchor=\"middle\">" +
           tick_label(t, xhi - xlo) + "</text>\n";
  }
  for (double t : ticks(ylo, yhi)) {
    out += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(py(t)) + "\" x2=\"" + num(left) + "\" y2=\"" +
           num(py(t)) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py(t) + 4) + "\" text-anchor=\"end\">" +
           tick_label(t, yhi - ylo) + "</text>\n";
  }
  out += "<text x=\"" + num(left + w / 2) + "\" y=\"" + num(plot.height - 10.0) + "\" text-anchor=\"middle\">" +
         escape(plot.x_label) + "</text>\n";
  out += "<text transform=\"translate(16," + num(top + h / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(plot.y_label) + "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const std::string color = kPalette[k % std::size(kPalette)];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.sticks) {
      for (std::size_t i = 0; i < n; ++i)
        out += "<line x1=\"" + num(px(s.x[i])) + "\" y1=\"" + num(py(0)) + "\" x2=\"" + num(px(s.x[i])) +
               "\" y2=\"" + num(py(s.y[i])) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    } else if (n > 0) {
      out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += num(px(s.x[i])) + "," + num(py(s.y[i]));
      }
      out += "\"/>\n";
    }
    if (!s.label.empty()) {
      const double ly = top + 16 + 16.0 * static_cast<double>(k);
      out += "<line x1=\"" + num(left + w - 120) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(left + w - 100) +
             "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
      out += "<text x=\"" + num(left + w - 95) + "\" y=\"" + num(ly) + "\">" + escape(s.label) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gcenter::svg
