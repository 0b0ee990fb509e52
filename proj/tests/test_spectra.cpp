#include <doctest.h>

#include <cmath>

#include "gcenter/error.hpp"
#include "gcenter/presets.hpp"
#include "gcenter/spectra.hpp"

using namespace gcenter;
using namespace gcenter::spectra;

namespace {

double peak_near(const IntensityCurve& c, double e)
{
  double best = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(c.energy[i] - e) < 0.05) best = std::max(best, c.intensity[i]);
  return best;
}

}  // namespace

TEST_CASE("wavelength conversion")
{
  CHECK(nm_to_meV(1239.841984) == doctest::Approx(1000.0).epsilon(1e-14));
  CHECK(nm_to_meV(1278.6) == doctest::Approx(969.69).epsilon(1e-5));
  for (double nm : {900.0, 1278.6, 1600.0}) CHECK(std::abs(meV_to_nm(nm_to_meV(nm)) - nm) < 1e-10);
  CHECK_THROWS_AS(nm_to_meV(0.0), Error);
  CHECK_THROWS_AS(meV_to_nm(-1.0), Error);
}

TEST_CASE("zpl lines")
{
  SUBCASE("unperturbed")
  {
    const auto s = zpl_lines(SiteEnergies::from_offsets(uniform_site_values(0.0), 969.69));
    REQUIRE(s.lines.size() == 1);
    CHECK(s.lines[0].weight() == doctest::Approx(6.0));
  }
  SUBCASE("doublet")
  {
    const auto s = zpl_lines(presets::site_energies(presets::g0()));
    REQUIRE(s.lines.size() == 2);
    CHECK(s.lines[1].offset - s.lines[0].offset == doctest::Approx(0.70));
    CHECK(s.lines[0].weight() == doctest::Approx(4.0));
    CHECK(s.lines[1].weight() == doctest::Approx(2.0));
    CHECK(s.lines[1].sites() == SiteSet{0, 3});
  }
  SUBCASE("triplet")
  {
    const auto s = zpl_lines(presets::site_energies(presets::g1()));
    REQUIRE(s.lines.size() == 3);
    CHECK(s.lines[2].offset - s.lines[1].offset == doctest::Approx(1.00));
    CHECK(s.lines[1].offset - s.lines[0].offset == doctest::Approx(0.86));
  }
}

TEST_CASE("polarized spectra")
{
  const auto preset = presets::g0();
  const auto lines = zpl_lines(presets::site_energies(preset), kDefaultGroupingTolerance, preset.axis);
  const auto geometry = dipole::dipoles_for_axis(preset.axis);
  const auto r = dipole::CollectionModel::with_ratio(2.1);
  const double l0 = lines.energy(lines.lines[1]);
  const double l1 = lines.energy(lines.lines[0]);

  const auto none = polarized_spectrum(lines, std::nullopt, r);
  const auto par = polarized_spectrum(lines, geometry.main_axis_deg(), r);
  const auto perp = polarized_spectrum(lines, geometry.main_axis_deg() + 90.0, r);

  CHECK(peak_near(perp, l0) < 1e-6 * peak_near(par, l0));
  CHECK(peak_near(perp, l1) == doctest::Approx(0.5 * peak_near(none, l1)).epsilon(1e-6));
  CHECK(peak_near(par, l0) / peak_near(par, l1) == doctest::Approx(2.1).epsilon(1e-3));

  const auto g1 = presets::g1();
  const auto tl = zpl_lines(presets::site_energies(g1), kDefaultGroupingTolerance, g1.axis);
  const auto tg = dipole::dipoles_for_axis(g1.axis);
  std::vector<double> i;
  for (const auto& l : tl.lines) i.push_back(line_intensity(l, tg, tg.main_axis_deg(), r));
  CHECK(i[2] / i[0] == doctest::Approx(4.2));
  CHECK(i[2] / i[1] == doctest::Approx(4.2));
}

TEST_CASE("polarizer average equals unpolarized")
{
  const auto lines = zpl_lines(presets::site_energies(presets::g1()));
  const auto geometry = dipole::dipoles_for_axis(lines.axis);
  const auto r = dipole::CollectionModel::with_ratio(2.1);
  for (const auto& l : lines.lines) {
    double mean = 0;
    for (int a = 0; a < 180; a += 10) mean += line_intensity(l, geometry, a, r) / 18.0;
    CHECK(2 * mean == doctest::Approx(line_intensity(l, geometry, std::nullopt, r)).epsilon(1e-12));
  }
}
