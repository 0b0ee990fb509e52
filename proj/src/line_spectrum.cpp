#include "gcenter/line_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcenter/error.hpp"
#include "gcenter/units.hpp"

namespace gcenter {

double Line::weight() const
{
  return std::accumulate(site_weight.begin(), site_weight.end(), 0.0);
}

SiteSet Line::sites() const
{
  SiteSet out;
  for (int n = 0; n < kSiteCount; ++n)
    if (site_weight[n] > 0) out.insert(n);
  return out;
}

double LineSpectrum::total_weight() const
{
  double total = 0;
  for (const auto& line : lines) total += line.weight();
  return total;
}

LineSpectrum merge_lines(const LineSpectrum& spectrum, double tolerance)
{
  if (!(tolerance >= 0)) fail(ErrorKind::invalid_argument, "grouping tolerance must be non-negative");

  std::vector<Line> sorted = spectrum.lines;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Line& a, const Line& b) { return a.offset < b.offset; });

  LineSpectrum out;
  out.center = spectrum.center;
  out.resolution = spectrum.resolution;
  out.axis = spectrum.axis;

  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j].offset - sorted[j - 1].offset <= tolerance) ++j;

    Line merged;
    double weighted_offset = 0;
    double total = 0;
    for (std::size_t k = i; k < j; ++k) {
      const double w = sorted[k].weight();
      weighted_offset += w * sorted[k].offset;
      total += w;
      for (int n = 0; n < kSiteCount; ++n) merged.site_weight[n] += sorted[k].site_weight[n];
    }
    merged.offset = total > 0 ? weighted_offset / total : sorted[i].offset;
    out.lines.push_back(merged);
    i = j;
  }
  return out;
}

double IntensityCurve::peak() const
{
  return intensity.empty() ? 0.0 : *std::max_element(intensity.begin(), intensity.end());
}

double IntensityCurve::integral() const
{
  double sum = 0;
  for (std::size_t i = 1; i < energy.size(); ++i)
    sum += 0.5 * (intensity[i] + intensity[i - 1]) * (energy[i] - energy[i - 1]);
  return sum;
}

double IntensityCurve::at(double e) const
{
  if (energy.empty() || e < energy.front() || e > energy.back()) return 0.0;
  auto it = std::lower_bound(energy.begin(), energy.end(), e);
  std::size_t hi = static_cast<std::size_t>(it - energy.begin());
  if (hi == 0) return intensity.front();
  std::size_t lo = hi - 1;
  const double t = (e - energy[lo]) / (energy[hi] - energy[lo]);
  return intensity[lo] + t * (intensity[hi] - intensity[lo]);
}

double gaussian(double x, double center, double fwhm)
{
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double z = (x - center) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * units::kPi));
}

}  // namespace gcenter
