#include "gcenter/presets.hpp"

#include <algorithm>
#include <cctype>

#include "gcenter/error.hpp"

namespace gcenter::presets {

double reference_zpl_meV() { return spectra::nm_to_meV(1278.6); }

DefectPreset unperturbed() { return {"unperturbed", uniform_site_values(0.0), {1, 1, 1}}; }

DefectPreset g0() { return {"g0", {0.70, 0.0, 0.0, 0.70, 0.0, 0.0}, {-1, 1, 1}}; }

DefectPreset g1() { return {"g1", {1.86, 0.86, 0.86, 1.86, 0.0, 0.0}, {1, 1, 1}}; }

DefectPreset by_name(const std::string& name)
{
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  if (key == "unperturbed") return unperturbed();
  if (key == "g0" || key == "g-0") return g0();
  if (key == "g1" || key == "g-1") return g1();
  fail(ErrorKind::invalid_argument, "unknown preset '" + name + "' (expected unperturbed, g0 or g1)");
}

spectra::SiteEnergies site_energies(const DefectPreset& preset, double zpl_center)
{
  return spectra::SiteEnergies::from_offsets(preset.offsets, zpl_center);
}

std::vector<double> polarizer_angles()
{
  std::vector<double> out;
  for (int a = 0; a < 180; a += 10) out.push_back(a);
  return out;
}

fitting::DefectMeasurement simulate_measurement(const DefectPreset& preset, const SimulationSettings& settings)
{
  roulette::EmitterConfig config;
  config.site_energies = site_energies(preset);
  config.axis = preset.axis;
  config.seed = settings.seed;
  const auto stream = roulette::simulate_photons(config, settings.photons);
  const auto geometry = dipole::dipoles_for_axis(preset.axis);
  const auto grid = roulette::stream_energy_grid(stream, settings.resolution);

  fitting::DefectMeasurement m;
  m.spectrum = roulette::accumulate_spectrum(stream, std::nullopt, settings.collection, geometry,
                                             settings.resolution, settings.seed + 1, grid)
                   .curve;
  for (std::size_t i = 0; i < settings.angles.size(); ++i) {
    const double angle = settings.angles[i];
    auto acc = roulette::accumulate_spectrum(stream, angle, settings.collection, geometry, settings.resolution,
                                             settings.seed + 2 + i, grid);
    m.diagram.angle_deg.push_back(angle);
    m.diagram.intensity.push_back(static_cast<double>(acc.accepted));
    m.polarized.push_back({angle, std::move(acc.curve)});
  }
  return m;
}

}  // namespace gcenter::presets
