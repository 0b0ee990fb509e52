#pragma once

#include <vector>

#include "gcenter/crystal.hpp"

namespace gcenter {

/// Default instrument resolution (Gaussian FWHM, meV).
inline constexpr double kDefaultResolution = 0.15;
/// Default tolerance for merging lines that the spectrometer cannot resolve (meV).
inline constexpr double kDefaultGroupingTolerance = 0.05;

/// One emission line. The emitting sites and their weights determine which
/// dipoles radiate it, hence its polarization.
struct Line {
  double offset = 0.0;  ///< meV, relative to the owning spectrum's centre
  SiteValues site_weight{};

  double weight() const;
  SiteSet sites() const;
};

/// Emission lines sorted by ascending energy, plus the instrument resolution
/// used when they are broadened. Line positions are stored as offsets from
/// `center` so that ueV splittings survive next to ~1 eV absolute energies.
struct LineSpectrum {
  double center = 0.0;  ///< meV
  std::vector<Line> lines;
  double resolution = kDefaultResolution;
  Miller axis{1, 1, 1};

  double energy(const Line& line) const { return center + line.offset; }
  double total_weight() const;
};

/// Merges lines whose energies chain together within `tolerance` (single
/// linkage on the sorted energies). Merged offset is the weight-averaged one.
LineSpectrum merge_lines(const LineSpectrum& spectrum, double tolerance);

/// Sampled intensity versus energy (meV), energy ascending.
struct IntensityCurve {
  std::vector<double> energy;
  std::vector<double> intensity;

  std::size_t size() const { return energy.size(); }
  double peak() const;
  /// Trapezoidal integral over energy.
  double integral() const;
  /// Linear interpolation; zero outside the sampled range.
  double at(double e) const;
};

/// Unit-area Gaussian parametrized by its FWHM.
double gaussian(double x, double center, double fwhm);

}  // namespace gcenter
