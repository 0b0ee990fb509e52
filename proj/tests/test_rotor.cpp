#include <doctest.h>

#include <algorithm>
#include <complex>

#include <Eigen/Dense>

#include "gcenter/error.hpp"
#include "gcenter/rotor.hpp"
#include "gcenter/units.hpp"

using namespace gcenter;
using namespace gcenter::rotor;

namespace {

// Brute-force spectrum of the 6x6 ring hopping matrix.
std::vector<double> circulant_levels(double e0, double delta0)
{
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  for (int n = 0; n < 6; ++n) {
    h(n, n) = e0;
    h(n, (n + 1) % 6) = h((n + 1) % 6, n) = delta0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> s(h);
  return {s.eigenvalues().data(), s.eigenvalues().data() + 6};
}

}  // namespace

TEST_CASE("bloch states")
{
  const auto states = bloch_states(RotorModel::ground_state(1e-3));
  for (const auto& a : states[0].amplitudes) CHECK(a.real() == doctest::Approx(1 / std::sqrt(6.0)));
  CHECK(states[0].wavevector == 0.0);
  for (int n = 0; n < 6; ++n) CHECK(states[3].amplitudes[n].real() == doctest::Approx((n % 2 ? -1 : 1) / std::sqrt(6.0)));
  CHECK(states[3].wavevector == doctest::Approx(units::kPi));

  for (int m = 0; m < 6; ++m)
    for (int mp = 0; mp < 6; ++mp) {
      std::complex<double> dot{};
      for (int n = 0; n < 6; ++n) dot += std::conj(states[m].amplitudes[n]) * states[mp].amplitudes[n];
      CHECK(std::abs(dot - (m == mp ? 1.0 : 0.0)) < 1e-12);
      CHECK(std::abs(transition_overlap(states[m], states[mp]) - (m == mp ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("bloch state phases are eigenvectors of the ring")
{
  const RotorModel model{0.3, 0.01};
  const auto states = bloch_states(model);
  for (int m = 0; m < 6; ++m)
    for (int n = 0; n < 6; ++n) {
      const auto& a = states[m].amplitudes;
      const auto h_psi = model.e0 * a[n] + model.delta0 * (a[(n + 1) % 6] + a[(n + 5) % 6]);
      CHECK(std::abs(h_psi - eigen_energy(model, m) * a[n]) < 1e-14);
    }
}

TEST_CASE("eigen energies")
{
  SUBCASE("unit hopping")
  {
    const auto l = eigen_energies(RotorModel{0.0, 1.0});
    CHECK(l.energies[0] == doctest::Approx(2.0));
    CHECK(l.energies[1] == doctest::Approx(1.0));
    CHECK(l.energies[2] == doctest::Approx(-1.0));
    CHECK(l.energies[3] == doctest::Approx(-2.0));
    CHECK(QuartetLevels::degeneracies == std::array<int, 4>{1, 2, 2, 1});
  }
  SUBCASE("uncoupled")
  {
    for (double e : eigen_energies(RotorModel{0.0, 0.0}).energies) CHECK(e == 0.0);
  }
  SUBCASE("matches circulant diagonalization")
  {
    auto brute = circulant_levels(5.0, 0.00125);
    std::vector<double> ours;
    for (int m = 0; m < 6; ++m) ours.push_back(eigen_energy(RotorModel{5.0, 0.00125}, m));
    std::sort(ours.begin(), ours.end());
    for (int i = 0; i < 6; ++i) CHECK(ours[i] == doctest::Approx(brute[i]).epsilon(1e-12));
    CHECK(brute[1] - brute[0] == doctest::Approx(0.00125).epsilon(1e-6));
    CHECK(brute[3] - brute[2] == doctest::Approx(0.0025).epsilon(1e-6));
    CHECK(brute[5] - brute[4] == doctest::Approx(0.00125).epsilon(1e-6));
  }
}

TEST_CASE("model validation")
{
  RotorModel bad{0.0, 1.0, -1.0};
  CHECK_THROWS_AS(eigen_energies(bad), Error);
  const auto a = bloch_states(RotorModel{0.0, 1.0, 1.0});
  const auto b = bloch_states(RotorModel{0.0, 1.0, 2.0});
  try {
    transition_overlap(a[0], b[0]);
    FAIL("expected incompatible basis");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::incompatible_basis);
  }
}

TEST_CASE("quartet spectrum")
{
  SUBCASE("delocalized quartet")
  {
    const auto s = quartet_spectrum(RotorModel::ground_state(0.0), RotorModel::excited_state(2.5e-3), 969.69);
    REQUIRE(s.lines.size() == 4);
    CHECK(units::meV_to_ueV(s.lines[3].offset - s.lines[0].offset) == doctest::Approx(10.0));
    CHECK(s.lines[1].weight() / s.lines[0].weight() == doctest::Approx(2.0));
    CHECK(s.lines[2].weight() / s.lines[3].weight() == doctest::Approx(2.0));
    double total = 0;
    for (const auto& l : s.lines) total += l.weight();
    CHECK(total == doctest::Approx(1.0));
  }
  SUBCASE("equal tunneling collapses to one line")
  {
    const auto s = quartet_spectrum(RotorModel::ground_state(1e-3), RotorModel::excited_state(1e-3), 969.69);
    REQUIRE(s.lines.size() == 1);
    CHECK(s.energy(s.lines[0]) == doctest::Approx(969.69));
  }
  SUBCASE("both levels tunneling")
  {
    const auto s = quartet_spectrum(RotorModel::ground_state(0.1e-3), RotorModel::excited_state(0.6e-3), 969.69);
    REQUIRE(s.lines.size() == 4);
    // Line-by-line difference at fixed m of the two level ladders.
    const double d = 0.5e-3;
    CHECK(s.lines[1].offset - s.lines[0].offset == doctest::Approx(d).epsilon(1e-9));
    CHECK(s.lines[2].offset - s.lines[1].offset == doctest::Approx(2 * d).epsilon(1e-9));
    CHECK(s.lines[3].offset - s.lines[2].offset == doctest::Approx(d).epsilon(1e-9));
  }
}
