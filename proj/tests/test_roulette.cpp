#include <doctest.h>

#include <cmath>

#include "gcenter/error.hpp"
#include "gcenter/presets.hpp"
#include "gcenter/roulette.hpp"

using namespace gcenter;
using namespace gcenter::roulette;

namespace {

EmitterConfig g0_config()
{
  EmitterConfig c;
  c.site_energies = presets::site_energies(presets::g0());
  c.axis = presets::g0().axis;
  return c;
}

}  // namespace

TEST_CASE("determinism")
{
  auto c = g0_config();
  c.n_emitters = 3;
  const auto a = simulate_stream(c, 1e4);
  const auto b = simulate_stream(c, 1e4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].time == b[i].time);
    CHECK(a[i].site == b[i].site);
    CHECK(a[i].emitter == b[i].emitter);
  }
  c.seed = 2;
  CHECK(simulate_stream(c, 1e4).front().time != a.front().time);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].time <= a[i].time);
}

TEST_CASE("site occupation")
{
  const auto stream = simulate_photons(g0_config(), 600'000);
  const auto counts = site_counts(stream);
  const double n = static_cast<double>(stream.size());
  const double sigma = std::sqrt((1.0 / 6) * (5.0 / 6) / n);
  for (auto c : counts) CHECK(std::abs(c / n - 1.0 / 6) < 3 * sigma);
}

TEST_CASE("frozen site")
{
  auto c = g0_config();
  c.hop_distribution = {1, 0, 0, 0, 0, 0};
  const auto stream = simulate_photons(c, 1000);
  for (const auto& p : stream) CHECK(p.site == 0);
  const auto chi = chi_square_occupation(site_counts(stream), uniform_site_values(1.0 / 6));
  CHECK_FALSE(chi.passes(0.01));
}

TEST_CASE("photon rate")
{
  const auto c = g0_config();
  const auto stream = simulate_stream(c, 1e6);
  const double rate = static_cast<double>(stream.size()) / 1e6;
  CHECK(c.photon_rate() == doctest::Approx(0.1 * 0.2 / 0.3));
  CHECK(rate == doctest::Approx(c.photon_rate()).epsilon(0.02));
}

TEST_CASE("validation")
{
  auto c = g0_config();
  c.excitation_rate = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = g0_config();
  c.hop_distribution = {0.5, 0.5, 0.5, 0, 0, 0};
  CHECK_THROWS_AS(c.validate(), Error);
  c = g0_config();
  c.n_emitters = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("g2")
{
  auto c = g0_config();
  SUBCASE("single emitter antibunches")
  {
    const auto g = g2_histogram(simulate_photons(c, 200'000), 0.25, 40.0);
    CHECK(g.at_zero() < 0.5);
    // Long delays are uncorrelated.
    CHECK(g.g2.back() == doctest::Approx(1.0).epsilon(0.1));
  }
  SUBCASE("two emitters")
  {
    c.n_emitters = 2;
    CHECK(g2_histogram(simulate_photons(c, 400'000), 0.25, 40.0).at_zero() == doctest::Approx(0.5).epsilon(0.1));
  }
  SUBCASE("poissonian surrogate")
  {
    const auto g = g2_histogram(poisson_surrogate(simulate_photons(c, 400'000), 5), 1.0, 20.0);
    for (double v : g.g2) CHECK(v == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("empty stream")
  {
    try {
      g2_histogram({}, 0.25, 10.0);
      FAIL("expected empty stream");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::empty_stream);
    }
  }
}

TEST_CASE("accumulated spectrum")
{
  const auto c = g0_config();
  const auto stream = simulate_photons(c, 200'000);
  const auto geometry = dipole::dipoles_for_axis(c.axis);
  const auto r = dipole::CollectionModel::with_ratio(2.1);
  const auto grid = stream_energy_grid(stream, kDefaultResolution);

  const auto none = accumulate_spectrum(stream, std::nullopt, r, geometry, kDefaultResolution, 1, grid);
  CHECK(none.curve.integral() == doctest::Approx(static_cast<double>(none.accepted)).epsilon(0.01));

  // Averaging over polarizer angles recovers the unpolarized shape.
  std::vector<double> mean(grid.size(), 0.0);
  for (int a = 0; a < 180; a += 20) {
    const auto s = accumulate_spectrum(stream, a, r, geometry, kDefaultResolution, 100 + a, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) mean[i] += s.curve.intensity[i] / 9.0;
  }
  const double scale = none.curve.peak() / *std::max_element(mean.begin(), mean.end());
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(mean[i] * scale - none.curve.intensity[i]) < 0.03 * none.curve.peak());
}

TEST_CASE("hopping regime")
{
  const auto cold = hopping_regime_check(30.0, 89.0, 33.0);
  CHECK(cold.regime == HoppingRegime::thermally_frozen);
  CHECK(cold.thermal_energy == doctest::Approx(2.585).epsilon(1e-3));
  CHECK(hopping_regime_check(3000.0, 89.0, 33.0).regime == HoppingRegime::thermally_activated);
}
