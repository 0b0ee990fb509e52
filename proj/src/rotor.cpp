#include "gcenter/rotor.hpp"

#include <cmath>

#include "gcenter/error.hpp"
#include "gcenter/units.hpp"

namespace gcenter::rotor {

namespace {

void check_model(const RotorModel& model)
{
  if (!(model.period > 0)) fail(ErrorKind::invalid_model, "rotor period must be positive");
  if (!std::isfinite(model.e0) || !std::isfinite(model.delta0))
    fail(ErrorKind::invalid_model, "rotor energies must be finite");
}

// Representative m for each quartet level.
constexpr std::array<int, 4> kQuartetM{0, 1, 2, 3};

}  // namespace

RotorModel RotorModel::ground_state(double delta0, double e0)
{
  return RotorModel{e0, delta0, 1.0, ElectronicLevel::ground};
}

RotorModel RotorModel::excited_state(double delta0, double e0)
{
  return RotorModel{e0, delta0, 1.0, ElectronicLevel::excited};
}

std::array<BlochState, kSiteCount> bloch_states(const RotorModel& model)
{
  check_model(model);
  const double norm = 1.0 / std::sqrt(static_cast<double>(kSiteCount));
  std::array<BlochState, kSiteCount> states;
  for (int m = 0; m < kSiteCount; ++m) {
    BlochState& s = states[m];
    s.m = m;
    s.period = model.period;
    s.wavevector = m * units::kPi / (3.0 * model.period);
    for (int n = 0; n < kSiteCount; ++n) {
      // Phase k_m n a reduced to m n pi / 3 so that it stays exact for any period.
      const double phase = units::kPi * ((m * n) % kSiteCount) / 3.0;
      s.amplitudes[n] = std::polar(norm, phase);
    }
  }
  return states;
}

double eigen_energy(const RotorModel& model, int m)
{
  static constexpr std::array<double, kSiteCount> kCos{1.0, 0.5, -0.5, -1.0, -0.5, 0.5};
  return model.e0 + 2.0 * model.delta0 * kCos[((m % kSiteCount) + kSiteCount) % kSiteCount];
}

QuartetLevels eigen_energies(const RotorModel& model)
{
  check_model(model);
  QuartetLevels levels;
  for (std::size_t i = 0; i < kQuartetM.size(); ++i) levels.energies[i] = eigen_energy(model, kQuartetM[i]);
  return levels;
}

std::complex<double> transition_overlap(const BlochState& gs_state, const BlochState& es_state)
{
  if (std::abs(gs_state.period - es_state.period) > 1e-12 * std::max(gs_state.period, es_state.period))
    fail(ErrorKind::incompatible_basis, "Bloch states built over different periods");
  std::complex<double> sum = 0;
  for (int n = 0; n < kSiteCount; ++n) sum += std::conj(gs_state.amplitudes[n]) * es_state.amplitudes[n];
  return sum;
}

LineSpectrum quartet_spectrum(const RotorModel& gs, const RotorModel& es, double zpl_center)
{
  check_model(gs);
  check_model(es);
  if (gs.level != ElectronicLevel::ground) fail(ErrorKind::invalid_model, "gs model must be the ground state");
  if (es.level != ElectronicLevel::excited) fail(ErrorKind::invalid_model, "es model must be the excited state");

  LineSpectrum spectrum;
  spectrum.center = zpl_center;
  for (std::size_t i = 0; i < kQuartetM.size(); ++i) {
    const int m = kQuartetM[i];
    Line line;
    // E0 difference is absorbed into the ZPL centre.
    line.offset = (eigen_energy(es, m) - es.e0) - (eigen_energy(gs, m) - gs.e0);
    const double weight = QuartetLevels::degeneracies[i] / static_cast<double>(kSiteCount);
    // Delocalized state: every site (hence every dipole) carries the line equally.
    line.site_weight = uniform_site_values(weight / kSiteCount);
    spectrum.lines.push_back(line);
  }
  // Exact coincidences only; a genuine splitting of any size is kept.
  const double scale = std::max(std::abs(es.delta0), std::abs(gs.delta0));
  return merge_lines(spectrum, 1e-12 * scale);
}

}  // namespace gcenter::rotor
