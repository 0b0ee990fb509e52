#pragma once

#include <array>
#include <complex>

#include "gcenter/line_spectrum.hpp"

// Tight-binding model of the interstitial silicon hopping between six coupled
// sites on a ring. Closed-form Bloch eigenstates, quartet levels and the
// m-conserving optical selection rule.
namespace gcenter::rotor {

enum class ElectronicLevel { ground, excited };

struct RotorModel {
  double e0 = 0.0;      ///< uncoupled site energy (meV)
  double delta0 = 0.0;  ///< nearest-neighbour tunneling energy (meV)
  double period = 1.0;  ///< well spacing a; only k*a enters any observable
  ElectronicLevel level = ElectronicLevel::ground;

  static RotorModel ground_state(double delta0 = 0.0, double e0 = 0.0);
  static RotorModel excited_state(double delta0, double e0 = 0.0);
};

struct BlochState {
  int m = 0;
  double wavevector = 0.0;  ///< k_m = m*pi/(3a)
  double period = 1.0;
  std::array<std::complex<double>, kSiteCount> amplitudes{};
};

/// Four quartet levels ordered m = 0, {1,5}, {2,4}, 3.
struct QuartetLevels {
  static constexpr std::array<int, 4> degeneracies{1, 2, 2, 1};
  std::array<double, 4> energies{};
};

/// States for m = 0..5 with amplitudes exp(i k_m n a)/sqrt(6).
std::array<BlochState, kSiteCount> bloch_states(const RotorModel& model);

/// E(m) = E0 + 2 delta0 cos(m pi / 3)
double eigen_energy(const RotorModel& model, int m);
QuartetLevels eigen_energies(const RotorModel& model);

/// <gs|es>. Throws incompatible_basis when the periods differ.
std::complex<double> transition_overlap(const BlochState& gs_state, const BlochState& es_state);

/// Quartet emission lines: the m-conserving transitions between the excited
/// and ground rotor levels, centred on `zpl_center` (meV). Weights are the
/// level degeneracies normalized to unit total. Coincident lines (equal
/// tunneling energies) collapse to one.
LineSpectrum quartet_spectrum(const RotorModel& gs, const RotorModel& es, double zpl_center);

}  // namespace gcenter::rotor
