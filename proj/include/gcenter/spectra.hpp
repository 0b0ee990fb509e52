#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gcenter/dipole.hpp"
#include "gcenter/line_spectrum.hpp"

// Zero-phonon-line fine structure for a defect whose center of mass is
// localized: each site emits at its own excited-minus-ground energy.
namespace gcenter::spectra {

struct SiteEnergies {
  SiteValues gs{};  ///< meV
  SiteValues es{};  ///< meV
  double zpl_center = 0.0;  ///< meV

  /// es[n] - gs[n]
  SiteValues line_offsets() const;
  /// Site energies whose ZPL offsets are `offsets` (gs = 0).
  static SiteEnergies from_offsets(const SiteValues& offsets, double zpl_center);
};

/// One line per site at zpl_center + es[n] - gs[n], weighted by `occupation`
/// (one per site by default), then merged within `grouping_tolerance`.
LineSpectrum zpl_lines(const SiteEnergies& site_energies,
                       double grouping_tolerance = kDefaultGroupingTolerance,
                       const Miller& axis = {1, 1, 1},
                       const SiteValues& occupation = uniform_site_values(1.0));

/// Collected intensity of one line behind a polarizer at `polarizer_deg`
/// (sum over sites of weight * gain * cos^2), or without polarizer.
double line_intensity(const Line& line, const dipole::DipoleGeometry& geometry,
                      std::optional<double> polarizer_deg, const dipole::CollectionModel& collection);

/// Uniform grid covering every line with 5 FWHM of margin, step FWHM/20.
std::vector<double> default_energy_grid(const LineSpectrum& lines);

/// Gaussian-broadened (FWHM = lines.resolution) spectrum behind a polarizer.
/// An empty polarizer means no polarization filtering.
IntensityCurve polarized_spectrum(const LineSpectrum& lines, std::optional<double> polarizer_deg,
                                  const dipole::CollectionModel& collection,
                                  std::span<const double> energy_grid = {});

enum class ConversionDirection { wavelength_to_energy, energy_to_wavelength };

/// E[meV] = 1e3 * 1239.841984 / lambda[nm], and its inverse.
double wavelength_energy(double value, ConversionDirection direction);

inline double nm_to_meV(double nm) { return wavelength_energy(nm, ConversionDirection::wavelength_to_energy); }
inline double meV_to_nm(double meV) { return wavelength_energy(meV, ConversionDirection::energy_to_wavelength); }

}  // namespace gcenter::spectra
