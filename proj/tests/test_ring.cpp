#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gcenter/error.hpp"
#include "gcenter/ring.hpp"
#include "gcenter/rotor.hpp"
#include "gcenter/strain.hpp"

using namespace gcenter;
using namespace gcenter::ring;

namespace {

double well_minimum(const RingPotential& p, int well)
{
  const int per = p.n_grid / 6;
  double lo = 1e300;
  for (int i = well * per - per / 2; i < well * per + per / 2; ++i) lo = std::min(lo, p.value[(i + p.n_grid) % p.n_grid]);
  return lo;
}

}  // namespace

TEST_CASE("potential")
{
  SUBCASE("symmetric")
  {
    const auto p = build_potential(33.0, uniform_site_values(0.0), 120);
    for (int i = 0; i < 120; ++i) CHECK(p.value[i] == doctest::Approx(p.value[(i + 20) % 120]).epsilon(1e-12));
  }
  SUBCASE("offset wells")
  {
    const auto flat = build_potential(89.0, uniform_site_values(0.0), 600);
    const auto p = build_potential(89.0, {1.9, 0, 0, 1.9, 0, 0}, 600);
    CHECK(well_minimum(p, 0) - well_minimum(flat, 0) == doctest::Approx(1.9));
    CHECK(well_minimum(p, 3) - well_minimum(flat, 3) == doctest::Approx(1.9));
    CHECK(well_minimum(p, 1) == doctest::Approx(well_minimum(flat, 1)));
  }
  SUBCASE("constant offset is a gauge shift")
  {
    const auto flat = build_potential(33.0, uniform_site_values(0.0), 60);
    const auto p = build_potential(33.0, uniform_site_values(0.7), 60);
    for (int i = 0; i < 60; ++i) CHECK(p.value[i] - flat.value[i] == doctest::Approx(0.7));
  }
  SUBCASE("grid must divide by six")
  {
    try {
      build_potential(33.0, uniform_site_values(0.0), 100);
      FAIL("expected invalid grid");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_grid);
    }
  }
}

TEST_CASE("free rotor")
{
  const double b = 0.2;
  const auto levels = ring_energies(build_potential(0.0, uniform_site_values(0.0), 600), b, 6);
  const double expected[] = {0, 1, 1, 4, 4, 9};
  for (int i = 0; i < 6; ++i) CHECK(levels[i] == doctest::Approx(expected[i] * b).epsilon(2e-3));
}

TEST_CASE("deep wells follow the tight-binding ladder")
{
  const double b = calibrate_kinetic_scale(33.0, 2.5e-3);
  const auto levels = ring_energies(build_potential(33.0, uniform_site_values(0.0)), b, 6);
  const auto fit = fit_tight_binding(levels);
  CHECK(fit.splitting_error < 0.05);
  std::vector<double> model;
  for (int m = 0; m < 6; ++m) model.push_back(rotor::eigen_energy(rotor::RotorModel{fit.e0, fit.delta0}, m));
  std::sort(model.begin(), model.end());
  for (int i = 0; i < 6; ++i) CHECK(std::abs(model[i] - levels[i]) < 0.05 * fit.delta0);
}

TEST_CASE("calibration")
{
  SUBCASE("round trip")
  {
    const double b = calibrate_kinetic_scale(33.0, 2.5e-3);
    const auto levels = solve_ring(build_potential(33.0, uniform_site_values(0.0)), b);
    std::vector<double> e;
    for (const auto& l : levels.levels) e.push_back(l.energy);
    CHECK(fit_tight_binding(e).delta0 == doctest::Approx(2.5e-3).epsilon(0.01));
  }
  SUBCASE("monotone in B")
  {
    const double d1 = symmetric_delta0(33.0, 0.10);
    const double d2 = symmetric_delta0(33.0, 0.15);
    const double d3 = symmetric_delta0(33.0, 0.20);
    CHECK(d1 < d2);
    CHECK(d2 < d3);
  }
  SUBCASE("free rotor limit")
  {
    CHECK(calibrate_kinetic_scale(0.0, 0.01) == doctest::Approx(0.005).epsilon(5e-3));
  }
  SUBCASE("unreachable target")
  {
    try {
      calibrate_kinetic_scale(33.0, -1.0);
      FAIL("expected failure");
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::calibration_failure || e.kind() == ErrorKind::invalid_argument));
    }
  }
}

TEST_CASE("wavefunctions")
{
  const auto s = solve_ring(build_potential(33.0, uniform_site_values(0.0), 120), 0.2);
  const double h = s.potential.step();
  for (const auto& l : s.levels) {
    double norm = 0;
    for (double v : l.wavefunction) norm += v * v * h;
    CHECK(norm == doctest::Approx(1.0));
    const auto m = well_masses(s.potential, l.wavefunction);
    double total = 0;
    for (double x : m) total += x;
    CHECK(total == doctest::Approx(1.0));
  }
  for (double p : s.ipr) {
    CHECK(p >= 1.0 / 6 - 1e-9);
    CHECK(p <= 1.0 + 1e-9);
  }
}

TEST_CASE("localization report")
{
  const double b = calibrate_kinetic_scale(33.0, 2.5e-3);

  SUBCASE("symmetric ring is delocalized")
  {
    const auto r = localization_report(solve_ring(build_potential(33.0, uniform_site_values(0.0)), b));
    REQUIRE(r.subsets.size() == 1);
    for (const auto& l : r.levels) CHECK(l.flag == Localization::delocalized);
  }
  SUBCASE("strained ring splits into localized subsets")
  {
    const auto offsets = strain::site_offsets_for_strain(strain::StrainSpec::along(Miller{-1, 1, 0}, 0.001),
                                                         Miller{1, 1, 1});
    const auto r = localization_report(solve_ring(build_potential(33.0, offsets), b));
    REQUIRE(r.subsets.size() == 2);
    CHECK(r.subsets[0].size() == 4);
    for (const auto& l : r.levels) CHECK(l.flag == Localization::localized);
    for (int i : r.subsets[1]) CHECK(r.levels[i].mass[0] + r.levels[i].mass[3] > 0.99);
  }
  SUBCASE("one deep well traps the ground state")
  {
    const auto r = localization_report(solve_ring(build_potential(33.0, {0, 0, -10, 0, 0, 0}), b));
    CHECK(r.levels[0].mass[2] > 0.99);
    CHECK(r.levels[0].raw_mass[2] > 0.99);
  }
  CHECK(std::string(to_string(Localization::localized)) == "LOCALIZED");
}
