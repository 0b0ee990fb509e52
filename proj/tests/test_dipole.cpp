#include <doctest.h>

#include <cmath>
#include <random>

#include "gcenter/dipole.hpp"
#include "gcenter/error.hpp"
#include "gcenter/units.hpp"

using namespace gcenter;
using namespace gcenter::dipole;

namespace {

std::vector<double> sorted_angles(const DipoleGeometry& g)
{
  std::vector<double> a(g.projected_angle_deg.begin(), g.projected_angle_deg.end());
  std::sort(a.begin(), a.end());
  return a;
}

PolarizationDiagram malus(double v, double phi, std::vector<double> angles)
{
  PolarizationDiagram d;
  d.angle_deg = angles;
  for (double a : angles) {
    const double c = std::cos(units::deg_to_rad(a - phi));
    d.intensity.push_back(v * c * c + 1 - v);
  }
  return d;
}

}  // namespace

TEST_CASE("dipole geometry")
{
  const auto g = dipoles_for_axis(Miller{1, 1, 1});
  CHECK(sorted_angles(g) == std::vector<double>{45.0, 90.0, 135.0});
  CHECK(g.main_axis_deg() == doctest::Approx(90.0));
  CHECK(g.site_angle_deg(0) == g.site_angle_deg(3));
  CHECK(g.site_in_plane(0));
  for (const auto& d : g.dipoles) CHECK(std::abs(d.dot(Miller{1, 1, 1}.unit())) < 1e-12);

  const auto inverted = dipoles_for_axis(Miller{-1, -1, 1});
  CHECK(sorted_angles(inverted) == sorted_angles(g));
  CHECK(inverted.main_axis_deg() == doctest::Approx(90.0));

  const auto turned = dipoles_for_axis(Miller{-1, 1, 1});
  CHECK(std::abs(units::angle_difference_deg(turned.main_axis_deg(), g.main_axis_deg())) == doctest::Approx(90.0));

  try {
    dipoles_for_axis(Miller{1, 1, 0});
    FAIL("expected invalid orientation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_orientation);
  }
}

TEST_CASE("site diagrams")
{
  const auto g = dipoles_for_axis(Miller{1, 1, 1});
  const auto r21 = CollectionModel::with_ratio(2.1);

  SUBCASE("all sites")
  {
    const auto d = diagram_from_sites(g, SiteSet::all(), uniform_site_values(1.0), r21);
    // Inclined pairs sum to a constant, so I = r cos^2(theta - 90) + 1.
    for (std::size_t i = 0; i < d.angle_deg.size(); ++i) {
      const double c = std::cos(units::deg_to_rad(d.angle_deg[i] - 90.0));
      CHECK(d.intensity[i] == doctest::Approx((2.1 * c * c + 1) / 3.1));
    }
    const auto fit = fit_diagram(d);
    CHECK(fit.visibility == doctest::Approx(2.1 / 3.1).epsilon(1e-9));
    CHECK(fit.orientation_deg == doctest::Approx(90.0));
  }
  SUBCASE("single pairs")
  {
    const auto d03 = fit_diagram(diagram_from_sites(g, SiteSet{0, 3}, SiteValues{1, 0, 0, 1, 0, 0}, r21));
    CHECK(d03.visibility == doctest::Approx(1.0));
    CHECK(d03.orientation_deg == doctest::Approx(90.0));
    const auto d14 = fit_diagram(diagram_from_sites(g, SiteSet{1, 4}, SiteValues{0, 1, 0, 0, 1, 0}, r21));
    CHECK(d14.visibility == doctest::Approx(1.0));
    CHECK(d14.orientation_deg == doctest::Approx(45.0));
  }
  SUBCASE("inclined pairs alone are unpolarized")
  {
    const auto c = site_curve(g, SiteValues{0, 1, 1, 0, 1, 1}, r21);
    for (int a = 0; a < 180; a += 7) CHECK(c(a) == doctest::Approx(c(0)).epsilon(1e-10));
  }
  SUBCASE("empty set")
  {
    try {
      diagram_from_sites(g, SiteSet{}, uniform_site_values(0.0), r21);
      FAIL("expected empty diagram");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::empty_diagram);
    }
  }
}

TEST_CASE("diagram fit")
{
  std::vector<double> angles;
  for (int a = 0; a <= 360; a += 20) angles.push_back(a);

  SUBCASE("noiseless single dipole at 0")
  {
    const auto fit = fit_diagram(malus(1.0, 0.0, angles));
    CHECK(fit.visibility == doctest::Approx(1.0));
    CHECK(std::abs(units::angle_difference_deg(fit.orientation_deg, 0.0)) < 1e-9);
  }
  SUBCASE("constant data")
  {
    PolarizationDiagram d;
    d.angle_deg = angles;
    d.intensity.assign(angles.size(), 3.0);
    const auto fit = fit_diagram(d);
    CHECK(fit.visibility == 0.0);
    CHECK_FALSE(fit.orientation_defined);
  }
  SUBCASE("noisy recovery")
  {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 0.05);
    auto d = malus(0.58, 90.0, angles);
    for (double& v : d.intensity) v *= 1 + n(rng);
    const auto fit = fit_diagram(d);
    CHECK(fit.visibility == doctest::Approx(0.58).epsilon(0.1));
    CHECK(std::abs(units::angle_difference_deg(fit.orientation_deg, 90.0)) < 5.0);
    CHECK(fit.covariance(0, 0) > 0);
  }
  SUBCASE("background subtraction")
  {
    auto d = malus(1.0, 30.0, angles);
    for (double& v : d.intensity) v += 0.5;
    CHECK(fit_diagram(d, {0.5}).visibility == doctest::Approx(1.0));
  }
  SUBCASE("too few samples")
  {
    CHECK_THROWS_AS(fit_diagram(malus(1.0, 0.0, {0, 20, 40})), Error);
    CHECK_THROWS_AS(fit_diagram(malus(1.0, 0.0, {0, 10, 20, 30, 40, 50, 60, 70, 80})), Error);
  }
}

TEST_CASE("collection ratio")
{
  const auto& table = CollectionTable::defaults();
  for (double depth = table.min_depth(); depth <= table.max_depth(); depth += 1.0) {
    const double r = collection_ratio(depth).ratio();
    CHECK(r >= 2.0);
    CHECK(r <= 2.2);
  }
  try {
    collection_ratio(table.max_depth() + 1.0);
    FAIL("expected out of range");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::out_of_range);
  }
  CHECK(CollectionModel::with_ratio(2.1).ratio() == doctest::Approx(2.1));
  CHECK(CollectionModel::with_ratio(2.1).gain(false) == 1.0);
}
