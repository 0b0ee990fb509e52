#include "gcenter/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "gcenter/error.hpp"
#include "gcenter/units.hpp"

namespace gcenter::spectra {

SiteValues SiteEnergies::line_offsets() const
{
  SiteValues out{};
  for (int n = 0; n < kSiteCount; ++n) out[n] = es[n] - gs[n];
  return out;
}

SiteEnergies SiteEnergies::from_offsets(const SiteValues& offsets, double zpl_center)
{
  SiteEnergies e;
  e.es = offsets;
  e.zpl_center = zpl_center;
  return e;
}

LineSpectrum zpl_lines(const SiteEnergies& site_energies, double grouping_tolerance, const Miller& axis,
                       const SiteValues& occupation)
{
  if (!(grouping_tolerance > 0)) fail(ErrorKind::invalid_argument, "grouping tolerance must be positive");
  if (!is_111_family(axis)) fail(ErrorKind::invalid_orientation, "defect axis must be a <111> direction");

  LineSpectrum raw;
  raw.center = site_energies.zpl_center;
  raw.axis = axis;
  const SiteValues offsets = site_energies.line_offsets();
  for (int n = 0; n < kSiteCount; ++n) {
    if (occupation[n] < 0) fail(ErrorKind::invalid_argument, "site occupation must be non-negative");
    if (occupation[n] == 0) continue;
    Line line;
    line.offset = offsets[n];
    line.site_weight[n] = occupation[n];
    raw.lines.push_back(line);
  }
  return merge_lines(raw, grouping_tolerance);
}

double line_intensity(const Line& line, const dipole::DipoleGeometry& geometry,
                      std::optional<double> polarizer_deg, const dipole::CollectionModel& collection)
{
  double total = 0;
  for (int n = 0; n < kSiteCount; ++n) {
    if (line.site_weight[n] == 0) continue;
    double factor = collection.gain(geometry.site_in_plane(n));
    if (polarizer_deg) {
      const double c = std::cos(units::deg_to_rad(*polarizer_deg - geometry.site_angle_deg(n)));
      factor *= c * c;
    }
    total += line.site_weight[n] * factor;
  }
  return total;
}

std::vector<double> default_energy_grid(const LineSpectrum& lines)
{
  if (lines.lines.empty()) fail(ErrorKind::invalid_argument, "no lines to grid");
  if (!(lines.resolution > 0)) fail(ErrorKind::invalid_argument, "resolution must be positive");
  double lo = lines.lines.front().offset;
  double hi = lo;
  for (const auto& l : lines.lines) {
    lo = std::min(lo, l.offset);
    hi = std::max(hi, l.offset);
  }
  const double margin = 5.0 * lines.resolution;
  const double step = lines.resolution / 20.0;
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo + 2 * margin) / step)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lines.center + lo - margin + step * static_cast<double>(i);
  return grid;
}

IntensityCurve polarized_spectrum(const LineSpectrum& lines, std::optional<double> polarizer_deg,
                                  const dipole::CollectionModel& collection,
                                  std::span<const double> energy_grid)
{
  if (lines.lines.empty()) fail(ErrorKind::invalid_argument, "polarized spectrum needs at least one line");
  const auto geometry = dipole::dipoles_for_axis(lines.axis);

  IntensityCurve curve;
  if (energy_grid.empty())
    curve.energy = default_energy_grid(lines);
  else
    curve.energy.assign(energy_grid.begin(), energy_grid.end());
  curve.intensity.assign(curve.energy.size(), 0.0);

  for (const auto& line : lines.lines) {
    const double weight = line_intensity(line, geometry, polarizer_deg, collection);
    if (weight == 0) continue;
    for (std::size_t i = 0; i < curve.energy.size(); ++i)
      curve.intensity[i] += weight * gaussian(curve.energy[i] - lines.center, line.offset, lines.resolution);
  }
  return curve;
}

double wavelength_energy(double value, ConversionDirection direction)
{
  if (!(value > 0) || !std::isfinite(value))
    fail(ErrorKind::invalid_argument, "wavelength/energy conversion needs a positive value");
  // The map is its own inverse.
  (void)direction;
  return units::kHcMevNm / value;
}

}  // namespace gcenter::spectra
