#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gcenter/fitting.hpp"
#include "gcenter/roulette.hpp"
#include "gcenter/spectra.hpp"

// Site-energy models of the reference defects and synthetic measurements
// generated from them.
namespace gcenter::presets {

/// ZPL at 1278.6 nm, in meV.
double reference_zpl_meV();

struct DefectPreset {
  std::string name;
  SiteValues offsets{};  ///< es - gs per site, meV
  Miller axis{1, 1, 1};
};

/// Unperturbed: all sites degenerate.
DefectPreset unperturbed();
/// Doublet: sites {0,3} 0.70 meV above {1,2,4,5}.
DefectPreset g0();
/// Triplet: {0,3}, {1,2}, {4,5} at 1.86, 0.86 and 0 meV.
DefectPreset g1();

/// "unperturbed", "g0" or "g1" (case-insensitive).
DefectPreset by_name(const std::string& name);

spectra::SiteEnergies site_energies(const DefectPreset& preset, double zpl_center = reference_zpl_meV());

/// 0, 10, ..., 170 degrees.
std::vector<double> polarizer_angles();

struct SimulationSettings {
  std::size_t photons = 1'000'000;
  std::uint64_t seed = 1;
  double resolution = kDefaultResolution;
  dipole::CollectionModel collection = dipole::CollectionModel::with_ratio(2.1);
  std::vector<double> angles = polarizer_angles();
};

/// Roulette photon stream of one emitter accumulated into an unpolarized
/// spectrum, one spectrum per polarizer angle, and the whole-ZPL diagram
/// (accepted photon counts per angle).
fitting::DefectMeasurement simulate_measurement(const DefectPreset& preset, const SimulationSettings& settings);

}  // namespace gcenter::presets
