#include <doctest.h>

#include <cmath>
#include <random>

#include "gcenter/error.hpp"
#include "gcenter/strain.hpp"

using namespace gcenter;
using namespace gcenter::strain;

TEST_CASE("strain tensor")
{
  const auto s = StrainSpec::along(Miller{1, 1, 0}, 0.002);
  const Eigen::Matrix3d e = s.tensor();
  CHECK(e.trace() == doctest::Approx(0.002));
  CHECK(e(0, 1) == doctest::Approx(0.001));
  CHECK((e - e.transpose()).norm() < 1e-15);
}

TEST_CASE("site offsets")
{
  const Miller axis{1, 1, 1};
  SUBCASE("[-110] strain on a [111] defect")
  {
    const auto o = site_offsets_for_strain(StrainSpec::along(Miller{-1, 1, 0}, 0.001), axis);
    const double low = o[1];
    CHECK(o[2] == doctest::Approx(low));
    CHECK(o[4] == doctest::Approx(low));
    CHECK(o[5] == doctest::Approx(low));
    CHECK(o[0] - low == doctest::Approx(1.9));
    CHECK(o[3] - low == doctest::Approx(1.9));
  }
  SUBCASE("[111] strain along the axis")
  {
    const auto o = site_offsets_for_strain(StrainSpec::along(Miller{1, 1, 1}, 0.003), axis);
    for (double v : o) CHECK(v == doctest::Approx(o[0]));
  }
  SUBCASE("zero strain")
  {
    for (const auto& dir : {Miller{1, 1, 0}, Miller{0, 0, 1}, Miller{1, 2, 3}})
      for (double v : site_offsets_for_strain(StrainSpec::along(dir, 0.0), axis)) CHECK(v == 0.0);
  }
  SUBCASE("beyond the linear regime")
  {
    try {
      site_offsets_for_strain(StrainSpec::along(Miller{1, 1, 0}, 0.01), axis);
      FAIL("expected nonlinear regime");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::nonlinear_regime);
    }
    CHECK_NOTHROW(site_offsets_for_strain(StrainSpec::along(Miller{1, 1, 0}, 0.01), axis, StrainResponse::defaults(),
                                          {true}));
  }
}

TEST_CASE("inversion pairs share offsets")
{
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> idx(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    Miller dir{idx(rng), idx(rng), idx(rng)};
    if (dir.is_zero()) continue;
    for (const auto& axis : defect_orientations()) {
      const auto o = site_offsets_for_strain(StrainSpec::along(dir, 0.001), axis);
      for (int n = 0; n < 3; ++n) CHECK(o[n] == doctest::Approx(o[n + 3]));
    }
  }
}

TEST_CASE("frame classes")
{
  CHECK(frame_transform(StrainSpec::along(Miller{1, 1, 0}, 0.001), Miller{-1, 1, 1}).strain_class ==
        StrainClass::c_110);
  CHECK(frame_transform(StrainSpec::along(Miller{1, 1, 0}, 0.001), Miller{1, 1, 1}).strain_class ==
        StrainClass::c110);
  CHECK(frame_transform(StrainSpec::along(Miller{0, 0, 1}, 0.001), Miller{1, -1, 1}).strain_class ==
        StrainClass::c001);
  CHECK(frame_transform(StrainSpec::along(Miller{1, 1, 1}, 0.001), Miller{-1, -1, 1}).strain_class ==
        StrainClass::c_1_11);
  for (auto c : kStrainClasses) CHECK(parse_strain_class(to_string(c)) == c);
}

TEST_CASE("ensemble line counts")
{
  CHECK(ensemble_lines(StrainSpec::along(Miller{0, 0, 1}, 0.001)).lines.size() == 2);
  CHECK(ensemble_lines(StrainSpec::along(Miller{1, 1, 1}, 0.001)).lines.size() == 3);
  CHECK(ensemble_lines(StrainSpec::along(Miller{1, 1, 0}, 0.001)).lines.size() == 4);
  CHECK(ensemble_lines(StrainSpec::along(Miller{1, 1, 0}, 0.001)).orientations.size() == 4);
}

TEST_CASE("sign convention")
{
  auto response = StrainResponse::defaults();
  const auto spec = StrainSpec::along(Miller{-1, 1, 0}, -0.001);
  const auto linear = site_offsets_for_strain(spec, Miller{1, 1, 1}, response);
  response.sign = SplitSign::magnitude;
  const auto magnitude = site_offsets_for_strain(spec, Miller{1, 1, 1}, response);
  CHECK(linear[0] - linear[1] == doctest::Approx(-1.9));
  CHECK(magnitude[0] - magnitude[1] == doctest::Approx(1.9));
}
