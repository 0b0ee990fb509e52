#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gcenter/dipole.hpp"
#include "gcenter/line_spectrum.hpp"
#include "gcenter/spectra.hpp"

// Stochastic "roulette wheel" emitter: at every optical excitation the
// interstitial silicon lands on a random site, and the photon emitted at the
// end of the cycle carries that site's line energy and dipole.
namespace gcenter::roulette {

/// Times are in ns, rates in 1/ns.
struct EmitterConfig {
  double excitation_rate = 0.1;
  double radiative_rate = 0.2;
  spectra::SiteEnergies site_energies{};
  SiteValues hop_distribution = uniform_site_values(1.0 / kSiteCount);
  Miller axis{1, 1, 1};
  std::uint64_t seed = 1;
  int n_emitters = 1;

  /// Throws invalid_argument on bad rates, probabilities or emitter count.
  void validate() const;
  /// excitation * radiative / (excitation + radiative), per emitter.
  double photon_rate() const;
};

struct PhotonRecord {
  double time = 0.0;    ///< ns
  int site = 0;
  double energy = 0.0;  ///< meV
  double angle_deg = 0.0;  ///< projected dipole orientation
  int emitter = 0;
};

using PhotonStream = std::vector<PhotonRecord>;

/// All photons emitted in [0, duration], sorted by (time, emitter). Each
/// emitter has its own generator seeded from (seed, emitter), so the result
/// does not depend on how emitters are scheduled.
PhotonStream simulate_stream(const EmitterConfig& config, double duration);

/// The first `count` photons, shared as evenly as possible between emitters.
PhotonStream simulate_photons(const EmitterConfig& config, std::size_t count);

/// Photon counts per site.
std::array<std::size_t, kSiteCount> site_counts(const PhotonStream& stream);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
  bool passes(double significance) const { return p_value >= significance; }
};

/// Pearson test of the site counts against `expected` probabilities.
ChiSquareResult chi_square_occupation(const std::array<std::size_t, kSiteCount>& counts,
                                      const SiteValues& expected);

struct G2Curve {
  std::vector<double> delay;  ///< bin centres, ns
  std::vector<double> g2;
  std::vector<std::size_t> coincidences;
  double bin_width = 0.0;

  /// Value of the bin centred on zero delay.
  double at_zero() const;
};

/// Start-stop-free coincidence histogram over all photon pairs, normalized
/// by the expectation N^2 w (T - |tau|) / T^2 for uncorrelated arrivals.
/// Throws empty_stream for fewer than two photons.
G2Curve g2_histogram(const PhotonStream& stream, double bin_width, double max_delay);

/// Same photons with independent uniform arrival times over the same span.
PhotonStream poisson_surrogate(const PhotonStream& stream, std::uint64_t seed);

struct AccumulatedSpectrum {
  IntensityCurve curve;  ///< counts per meV
  std::size_t accepted = 0;
};

/// Polarizer modelled as Bernoulli thinning with acceptance
/// g cos^2(polarizer - angle) / max(g). Accepted photons are binned by line
/// energy and broadened with a unit-area Gaussian of FWHM `resolution`.
AccumulatedSpectrum accumulate_spectrum(const PhotonStream& stream, std::optional<double> polarizer_deg,
                                        const dipole::CollectionModel& collection,
                                        const dipole::DipoleGeometry& geometry, double resolution,
                                        std::uint64_t seed, std::span<const double> energy_grid = {});

/// Energy grid spanning the stream's line energies (5 FWHM margins, FWHM/20 step).
std::vector<double> stream_energy_grid(const PhotonStream& stream, double resolution);

enum class HoppingRegime { thermally_frozen, thermally_activated };

const char* to_string(HoppingRegime regime);

struct RegimeReport {
  HoppingRegime regime = HoppingRegime::thermally_frozen;
  double thermal_energy = 0.0;  ///< k_B T, meV
  double threshold = 0.0;       ///< 0.1 min(barriers), meV
};

/// Frozen when k_B T < 0.1 min(barrier_gs, barrier_es).
RegimeReport hopping_regime_check(double temperature_k, double barrier_gs, double barrier_es);

}  // namespace gcenter::roulette
