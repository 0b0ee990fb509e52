#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gcenter/crystal.hpp"

// Center-of-mass rotation on a periodic coordinate:
// H = -B d^2/dtheta^2 + V(theta), solved by periodic finite differences.
namespace gcenter::ring {

inline constexpr int kDefaultGrid = 600;

/// Sampled potential. Well w is centred at theta = w pi/3.
struct RingPotential {
  double barrier = 0.0;  ///< meV
  SiteValues site_offsets{};
  int n_grid = kDefaultGrid;
  std::vector<double> theta;  ///< rad, theta_i = i * step()
  std::vector<double> value;  ///< meV

  double step() const;
};

/// V = (barrier/2)(1 - cos 6 theta) + sum_w offset_w cos^2(3 (theta - w pi/3) / 2)
/// on |theta - w pi/3| <= pi/3. The windows sum to one everywhere.
RingPotential build_potential(double barrier, const SiteValues& site_offsets, int n_grid = kDefaultGrid);

struct RotationalLevel {
  double energy = 0.0;  ///< meV
  /// Real amplitudes on the grid, sum psi^2 * step = 1.
  std::vector<double> wavefunction;
};

struct RotationalSpectrum {
  RingPotential potential;
  double kinetic_scale = 0.0;  ///< B, meV
  std::vector<RotationalLevel> levels;  ///< ascending
  std::vector<double> ipr;  ///< sum_w p_w^2 per level, in [1/6, 1]
};

/// Lowest `count` levels. Throws invalid_argument for B <= 0 and
/// numerical_failure if the eigensolver does not converge.
RotationalSpectrum solve_ring(const RingPotential& potential, double kinetic_scale, int count = kSiteCount);

/// Eigenvalues only.
std::vector<double> ring_energies(const RingPotential& potential, double kinetic_scale, int count = kSiteCount);

/// Probability in each well domain |theta - w pi/3| < pi/6. Boundary samples
/// are shared equally between the neighbouring wells.
SiteValues well_masses(const RingPotential& potential, std::span<const double> wavefunction);

/// (E0, delta0) of the six-site tight-binding ring closest to six ascending
/// levels. delta0 is reported as the tunneling magnitude.
struct TightBindingFit {
  double e0 = 0.0;
  double delta0 = 0.0;
  /// Largest |fitted - actual| consecutive splitting, relative to delta0.
  double splitting_error = 0.0;
};

TightBindingFit fit_tight_binding(std::span<const double> levels);

/// delta0 of the symmetric potential (offsets zero) for a given B.
double symmetric_delta0(double barrier, double kinetic_scale, int n_grid = kDefaultGrid);

/// B for which the symmetric potential has tunneling energy `target_delta0`.
/// Throws calibration_failure if no bracket is found.
double calibrate_kinetic_scale(double barrier, double target_delta0, int n_grid = kDefaultGrid);

enum class Localization { localized, intermediate, delocalized };

const char* to_string(Localization flag);

struct LevelOccupation {
  double energy = 0.0;
  int subset = 0;
  /// Well masses of the eigenvector returned by the solver.
  SiteValues raw_mass{};
  /// Well masses after localizing within the level's subset.
  SiteValues mass{};
  double ipr = 0.0;
  Localization flag = Localization::intermediate;
};

struct LocalizationReport {
  double grouping_threshold = 0.0;  ///< meV
  std::vector<std::vector<int>> subsets;  ///< level indices, ascending energy
  std::vector<LevelOccupation> levels;
};

/// Groups quasi-degenerate levels (consecutive gaps below the threshold,
/// default 10x the symmetric-case delta0) and assigns well occupations.
/// A single subset is one tunneling band: masses are averaged over exactly
/// degenerate levels. Several subsets mean the perturbation beats tunneling:
/// within each subset the well-position operator is diagonalized, giving the
/// maximally localized states.
LocalizationReport localization_report(const RotationalSpectrum& spectrum,
                                       std::optional<double> grouping_threshold = {});

}  // namespace gcenter::ring
