#include "gcenter/roulette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "gcenter/error.hpp"
#include "gcenter/units.hpp"

namespace gcenter::roulette {

namespace {

std::mt19937_64 emitter_engine(std::uint64_t seed, int emitter)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(emitter), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

// Runs one emitter until `stop` says so.
template <typename Stop>
PhotonStream run_emitter(const EmitterConfig& config, int emitter, Stop stop)
{
  auto rng = emitter_engine(config.seed, emitter);
  std::exponential_distribution<double> excite(config.excitation_rate);
  std::exponential_distribution<double> radiate(config.radiative_rate);
  std::discrete_distribution<int> hop(config.hop_distribution.begin(), config.hop_distribution.end());
  const auto geometry = dipole::dipoles_for_axis(config.axis);
  const SiteValues offsets = config.site_energies.line_offsets();

  PhotonStream out;
  double t = 0;
  for (;;) {
    t += excite(rng);
    const int site = hop(rng);
    t += radiate(rng);
    if (stop(t, out.size())) break;
    out.push_back({t, site, config.site_energies.zpl_center + offsets[site], geometry.site_angle_deg(site), emitter});
  }
  return out;
}

template <typename StopFactory>
PhotonStream run_all(const EmitterConfig& config, StopFactory make_stop)
{
  config.validate();
  std::vector<PhotonStream> per(config.n_emitters);
  {
    std::vector<std::jthread> workers;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int threads = std::min<int>(config.n_emitters, static_cast<int>(hw));
    for (int w = 0; w < threads; ++w)
      workers.emplace_back([&, w] {
        for (int e = w; e < config.n_emitters; e += threads) per[e] = run_emitter(config, e, make_stop(e));
      });
  }
  if (per.size() == 1) return std::move(per.front());
  PhotonStream merged;
  for (auto& p : per) merged.insert(merged.end(), p.begin(), p.end());
  std::sort(merged.begin(), merged.end(), [](const PhotonRecord& a, const PhotonRecord& b) {
    return a.time != b.time ? a.time < b.time : a.emitter < b.emitter;
  });
  return merged;
}

}  // namespace

void EmitterConfig::validate() const
{
  if (!(excitation_rate > 0) || !(radiative_rate > 0) || !std::isfinite(excitation_rate) ||
      !std::isfinite(radiative_rate))
    fail(ErrorKind::invalid_argument, "rates must be positive");
  if (n_emitters < 1) fail(ErrorKind::invalid_argument, "need at least one emitter");
  double total = 0;
  for (double p : hop_distribution) {
    if (!(p >= 0)) fail(ErrorKind::invalid_argument, "hop probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorKind::invalid_argument, "hop probabilities must sum to 1");
  if (!is_111_family(axis)) fail(ErrorKind::invalid_orientation, "defect axis must be a <111> direction");
}

double EmitterConfig::photon_rate() const
{
  return excitation_rate * radiative_rate / (excitation_rate + radiative_rate);
}

PhotonStream simulate_stream(const EmitterConfig& config, double duration)
{
  if (!(duration > 0)) fail(ErrorKind::invalid_argument, "duration must be positive");
  return run_all(config, [duration](int) { return [duration](double t, std::size_t) { return t > duration; }; });
}

PhotonStream simulate_photons(const EmitterConfig& config, std::size_t count)
{
  const auto n = static_cast<std::size_t>(std::max(config.n_emitters, 1));
  return run_all(config, [count, n](int e) {
    const std::size_t quota = count / n + (static_cast<std::size_t>(e) < count % n ? 1 : 0);
    return [quota](double, std::size_t emitted) { return emitted >= quota; };
  });
}

std::array<std::size_t, kSiteCount> site_counts(const PhotonStream& stream)
{
  std::array<std::size_t, kSiteCount> counts{};
  for (const auto& p : stream) ++counts[p.site];
  return counts;
}

ChiSquareResult chi_square_occupation(const std::array<std::size_t, kSiteCount>& counts, const SiteValues& expected)
{
  double n = 0;
  for (auto c : counts) n += static_cast<double>(c);
  if (n == 0) fail(ErrorKind::empty_stream, "no photons to test");
  ChiSquareResult r;
  int cells = 0;
  for (int s = 0; s < kSiteCount; ++s) {
    const double e = expected[s] * n;
    if (e <= 0) {
      if (counts[s] != 0) r.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    r.statistic += std::pow(static_cast<double>(counts[s]) - e, 2) / e;
    ++cells;
  }
  r.dof = cells - 1;
  if (r.dof < 1) {
    r.p_value = std::isinf(r.statistic) ? 0.0 : 1.0;
    return r;
  }
  if (std::isinf(r.statistic)) return r;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

double G2Curve::at_zero() const
{
  if (delay.empty()) fail(ErrorKind::empty_stream, "empty g2 curve");
  return g2[delay.size() / 2];
}

G2Curve g2_histogram(const PhotonStream& stream, double bin_width, double max_delay)
{
  if (stream.size() < 2) fail(ErrorKind::empty_stream, "g2 needs at least two photons");
  if (!(bin_width > 0) || !(max_delay >= bin_width))
    fail(ErrorKind::invalid_argument, "need 0 < bin width <= max delay");

  std::vector<double> t(stream.size());
  std::transform(stream.begin(), stream.end(), t.begin(), [](const PhotonRecord& p) { return p.time; });
  std::sort(t.begin(), t.end());
  const double span = t.back() - t.front();
  if (!(span > max_delay)) fail(ErrorKind::invalid_argument, "stream shorter than the maximum delay");

  const int half = static_cast<int>(std::round(max_delay / bin_width));
  const int bins = 2 * half + 1;
  const double reach = (half + 0.5) * bin_width;
  G2Curve curve;
  curve.bin_width = bin_width;
  curve.coincidences.assign(bins, 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size() && t[j] - t[i] < reach; ++j) {
      const int k = static_cast<int>(std::floor((t[j] - t[i]) / bin_width + 0.5));
      if (k > half) continue;
      ++curve.coincidences[half + k];
      ++curve.coincidences[half - k];
    }
  }

  const double n = static_cast<double>(t.size());
  curve.delay.resize(bins);
  curve.g2.resize(bins);
  for (int b = 0; b < bins; ++b) {
    const double tau = (b - half) * bin_width;
    curve.delay[b] = tau;
    const double expected = n * (n - 1) * bin_width * (span - std::abs(tau)) / (span * span);
    curve.g2[b] = static_cast<double>(curve.coincidences[b]) / expected;
  }
  return curve;
}

PhotonStream poisson_surrogate(const PhotonStream& stream, std::uint64_t seed)
{
  if (stream.empty()) fail(ErrorKind::empty_stream, "no photons");
  double lo = stream.front().time, hi = lo;
  for (const auto& p : stream) {
    lo = std::min(lo, p.time);
    hi = std::max(hi, p.time);
  }
  auto rng = emitter_engine(seed, -1);
  std::uniform_real_distribution<double> when(lo, hi);
  PhotonStream out = stream;
  for (auto& p : out) p.time = when(rng);
  std::sort(out.begin(), out.end(), [](const PhotonRecord& a, const PhotonRecord& b) { return a.time < b.time; });
  return out;
}

std::vector<double> stream_energy_grid(const PhotonStream& stream, double resolution)
{
  if (stream.empty()) fail(ErrorKind::empty_stream, "no photons");
  if (!(resolution > 0)) fail(ErrorKind::invalid_argument, "resolution must be positive");
  double lo = stream.front().energy, hi = lo;
  for (const auto& p : stream) {
    lo = std::min(lo, p.energy);
    hi = std::max(hi, p.energy);
  }
  const double margin = 5.0 * resolution;
  const double step = resolution / 20.0;
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo + 2 * margin) / step)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo - margin + step * static_cast<double>(i);
  return grid;
}

AccumulatedSpectrum accumulate_spectrum(const PhotonStream& stream, std::optional<double> polarizer_deg,
                                        const dipole::CollectionModel& collection,
                                        const dipole::DipoleGeometry& geometry, double resolution,
                                        std::uint64_t seed, std::span<const double> energy_grid)
{
  if (stream.empty()) fail(ErrorKind::empty_stream, "no photons to accumulate");
  if (!(resolution > 0)) fail(ErrorKind::invalid_argument, "resolution must be positive");

  const double g_max = std::max(collection.ratio(), 1.0);
  auto rng = emitter_engine(seed, -2);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  std::map<double, std::size_t> histogram;
  AccumulatedSpectrum out;
  for (const auto& p : stream) {
    double accept = collection.gain(geometry.site_in_plane(p.site)) / g_max;
    if (polarizer_deg) {
      const double c = std::cos(units::deg_to_rad(*polarizer_deg - p.angle_deg));
      accept *= c * c;
    }
    if (u(rng) < accept) {
      ++histogram[p.energy];
      ++out.accepted;
    }
  }

  if (energy_grid.empty())
    out.curve.energy = stream_energy_grid(stream, resolution);
  else
    out.curve.energy.assign(energy_grid.begin(), energy_grid.end());
  out.curve.intensity.assign(out.curve.energy.size(), 0.0);
  for (const auto& [energy, count] : histogram)
    for (std::size_t i = 0; i < out.curve.energy.size(); ++i)
      out.curve.intensity[i] += static_cast<double>(count) * gaussian(out.curve.energy[i], energy, resolution);
  return out;
}

const char* to_string(HoppingRegime regime)
{
  return regime == HoppingRegime::thermally_frozen ? "THERMALLY_FROZEN" : "THERMALLY_ACTIVATED";
}

RegimeReport hopping_regime_check(double temperature_k, double barrier_gs, double barrier_es)
{
  if (!(temperature_k > 0)) fail(ErrorKind::invalid_argument, "temperature must be positive");
  if (!(barrier_gs >= 0) || !(barrier_es >= 0)) fail(ErrorKind::invalid_argument, "barriers must be non-negative");
  RegimeReport r;
  r.thermal_energy = units::kBoltzmannMevPerK * temperature_k;
  r.threshold = 0.1 * std::min(barrier_gs, barrier_es);
  r.regime = r.thermal_energy < r.threshold ? HoppingRegime::thermally_frozen : HoppingRegime::thermally_activated;
  return r;
}

}  // namespace gcenter::roulette
