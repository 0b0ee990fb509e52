#include <doctest.h>

#include <cmath>
#include <random>

#include "gcenter/error.hpp"
#include "gcenter/fitting.hpp"
#include "gcenter/presets.hpp"
#include "gcenter/units.hpp"

using namespace gcenter;
using namespace gcenter::fitting;

namespace {

// Gaussian lines with unit peak height plus Gaussian noise of 1/snr.
IntensityCurve synthetic(const std::vector<std::pair<double, double>>& lines, double snr, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0 / snr);
  IntensityCurve c;
  for (double e = -1.5; e <= 3.0; e += 0.01) {
    double y = 0;
    for (auto [center, height] : lines) y += height * std::exp(-4 * std::log(2.0) * std::pow((e - center) / 0.15, 2));
    c.energy.push_back(969.0 + e);
    c.intensity.push_back(y + n(rng));
  }
  return c;
}

std::vector<SiteSet> p(std::initializer_list<SiteSet> classes) { return classes; }

}  // namespace

TEST_CASE("peak fitting")
{
  SUBCASE("singlet")
  {
    const auto fit = fit_peaks(synthetic({{0.0, 1.0}}, 20, 1));
    REQUIRE(fit.peaks.size() == 1);
    CHECK(fit.peaks[0].fwhm == doctest::Approx(0.15).epsilon(0.05));
  }
  SUBCASE("doublet")
  {
    const auto fit = fit_peaks(synthetic({{0.0, 0.5}, {0.70, 1.0}}, 20, 2));
    REQUIRE(fit.peaks.size() == 2);
    CHECK(std::abs(fit.peaks[1].center - fit.peaks[0].center - 0.70) <= 0.02);
  }
  SUBCASE("triplet")
  {
    const auto fit = fit_peaks(synthetic({{0.0, 0.25}, {0.86, 0.25}, {1.86, 1.0}}, 20, 3));
    REQUIRE(fit.peaks.size() == 3);
    CHECK(std::abs(fit.peaks[1].center - fit.peaks[0].center - 0.86) <= 0.02);
    CHECK(std::abs(fit.peaks[2].center - fit.peaks[1].center - 1.00) <= 0.02);
  }
  SUBCASE("bic prefers the true order")
  {
    const auto fit = fit_peaks(synthetic({{0.0, 0.5}, {0.70, 1.0}}, 20, 4));
    REQUIRE(fit.bic_by_order.size() == 4);
    CHECK(fit.bic_by_order[1] < fit.bic_by_order[0]);
  }
  SUBCASE("preconditions")
  {
    IntensityCurve tiny{{1, 2, 3}, {1, 2, 1}};
    CHECK_THROWS_AS(fit_peaks(tiny), Error);
    CHECK_THROWS_AS(fit_peaks(synthetic({{0.0, 1.0}}, 20, 1), 5), Error);
  }
}

TEST_CASE("assignments")
{
  SUBCASE("doublet")
  {
    std::vector<LineObservation> lines(2);
    lines[0].visibility = 1.0;
    lines[0].angle_deg = 0.0;
    lines[0].ratio = 1.0;
    lines[1].visibility = 0.0;
    lines[1].ratio = 1.0 / 2.1;
    const auto r = enumerate_assignments(lines, 2.1);
    REQUIRE(r.hypotheses.size() == 1);
    CHECK(canonical_partition(r.hypotheses[0].partition) == canonical_partition(p({{0, 3}, {1, 2, 4, 5}})));
  }
  SUBCASE("triplet")
  {
    std::vector<LineObservation> lines(3);
    lines[0].polarized = true;
    lines[0].angle_deg = 0.0;
    lines[0].ratio = 1.0;
    for (int i = 1; i < 3; ++i) {
      lines[i].polarized = false;
      lines[i].ratio = 0.25;
    }
    const auto r = enumerate_assignments(lines, 2.1);
    REQUIRE(r.hypotheses.size() == 2);
    std::vector<std::vector<SiteSet>> found, expected{canonical_partition(p({{0, 3}, {1, 2}, {4, 5}})),
                                                      canonical_partition(p({{0, 3}, {1, 5}, {2, 4}}))};
    for (const auto& h : r.hypotheses) found.push_back(canonical_partition(h.partition));
    std::sort(found.begin(), found.end());
    std::sort(expected.begin(), expected.end());
    CHECK(found == expected);
    CHECK(r.hypotheses[0].score == doctest::Approx(r.hypotheses[1].score));
  }
  SUBCASE("singlet")
  {
    std::vector<LineObservation> lines(1);
    lines[0].visibility = 0.68;
    lines[0].angle_deg = 0.0;
    lines[0].ratio = 1.0;
    const auto r = enumerate_assignments(lines, 2.1);
    REQUIRE(r.hypotheses.size() == 1);
    CHECK(r.hypotheses[0].partition.front() == SiteSet::all());
    CHECK(r.hypotheses[0].interpretation == "delocalized-or-uniform-hopping");
  }
  SUBCASE("inconsistent observations")
  {
    std::vector<LineObservation> lines(2);
    lines[0].visibility = 1.0;
    lines[0].angle_deg = 45.0;
    lines[0].ratio = 1.0;
    lines[1].visibility = 1.0;
    lines[1].angle_deg = 45.0;
    lines[1].ratio = 1.0;
    const auto r = enumerate_assignments(lines, 2.1);
    CHECK(r.hypotheses.empty());
    CHECK_FALSE(r.explanation.empty());
  }
  SUBCASE("pair splitting enlarges the search")
  {
    std::vector<LineObservation> lines(2);
    lines[0].polarized = false;
    lines[1].polarized = false;
    AssignmentOptions wide;
    wide.allow_pair_splitting = true;
    CHECK(enumerate_assignments(lines, 2.1, wide).enumerated > enumerate_assignments(lines, 2.1).enumerated);
  }
}

TEST_CASE("classify simulated defects")
{
  presets::SimulationSettings s;
  s.photons = 300'000;
  SUBCASE("unperturbed")
  {
    const auto r = classify_defect(presets::simulate_measurement(presets::unperturbed(), s));
    CHECK(r.pattern == PatternClass::singlet);
    CHECK(r.diagram.visibility == doctest::Approx(0.68).epsilon(0.05));
    const double phi = r.diagram.orientation_deg;
    CHECK((std::abs(units::angle_difference_deg(phi, 0.0)) < 5 || std::abs(units::angle_difference_deg(phi, 90.0)) < 5));
  }
  SUBCASE("doublet")
  {
    const auto r = classify_defect(presets::simulate_measurement(presets::g0(), s));
    CHECK(r.pattern == PatternClass::doublet);
    REQUIRE(r.splittings.size() == 1);
    CHECK(std::abs(r.splittings[0] - 0.70) <= 0.02);
  }
}
