#include "gcenter/ring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "gcenter/error.hpp"
#include "gcenter/units.hpp"

namespace gcenter::ring {

namespace {

constexpr double kWellSpacing = units::kPi / 3.0;

Eigen::MatrixXd hamiltonian(const RingPotential& potential, double kinetic_scale)
{
  const int n = potential.n_grid;
  const double h = potential.step();
  const double t = kinetic_scale / (h * h);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = 2.0 * t + potential.value[i];
    const int j = (i + 1) % n;
    H(i, j) = -t;
    H(j, i) = -t;
  }
  return H;
}

void check_solve_inputs(const RingPotential& potential, double kinetic_scale, int count)
{
  if (!(kinetic_scale > 0) || !std::isfinite(kinetic_scale))
    fail(ErrorKind::invalid_argument, "kinetic scale must be positive");
  if (static_cast<int>(potential.value.size()) != potential.n_grid || potential.n_grid < 3)
    fail(ErrorKind::invalid_grid, "potential samples do not match the grid size");
  if (count < 1 || count > potential.n_grid)
    fail(ErrorKind::invalid_argument, "requested level count out of range");
  for (double v : potential.value)
    if (!std::isfinite(v)) fail(ErrorKind::numerical_failure, "potential contains non-finite samples");
}

// Each grid point belongs to one well, or half to each of two at a boundary.
struct WellShare {
  int first = 0;
  int second = 0;
  double first_share = 1.0;
};

WellShare well_share(double theta)
{
  const double u = theta / kWellSpacing;
  const double fl = std::floor(u);
  const double frac = u - fl;
  const int lower = static_cast<int>(fl);
  const auto wrap = [](int w) { return ((w % kSiteCount) + kSiteCount) % kSiteCount; };
  if (std::abs(frac - 0.5) < 1e-9) return {wrap(lower), wrap(lower + 1), 0.5};
  const int w = frac < 0.5 ? lower : lower + 1;
  return {wrap(w), wrap(w), 1.0};
}

double ipr_of(const SiteValues& mass)
{
  double s = 0;
  for (double p : mass) s += p * p;
  return s;
}

Localization classify(const SiteValues& mass)
{
  if (*std::max_element(mass.begin(), mass.end()) > 0.9) return Localization::localized;
  const bool uniform = std::all_of(mass.begin(), mass.end(),
                                   [](double p) { return std::abs(p - 1.0 / kSiteCount) <= 0.05; });
  return uniform ? Localization::delocalized : Localization::intermediate;
}

}  // namespace

double RingPotential::step() const { return 2.0 * units::kPi / n_grid; }

RingPotential build_potential(double barrier, const SiteValues& site_offsets, int n_grid)
{
  if (n_grid < 48 || n_grid % kSiteCount != 0)
    fail(ErrorKind::invalid_grid, "grid size must be at least 48 and divisible by 6");
  if (!(barrier >= 0) || !std::isfinite(barrier)) fail(ErrorKind::invalid_argument, "barrier must be non-negative");
  for (double o : site_offsets)
    if (!std::isfinite(o)) fail(ErrorKind::invalid_argument, "site offsets must be finite");

  RingPotential p;
  p.barrier = barrier;
  p.site_offsets = site_offsets;
  p.n_grid = n_grid;
  p.theta.resize(n_grid);
  p.value.resize(n_grid);
  const double h = p.step();
  const int per_well = n_grid / kSiteCount;
  for (int i = 0; i < n_grid; ++i) {
    const double theta = h * i;
    p.theta[i] = theta;
    double v = 0.5 * barrier * (1.0 - std::cos(6.0 * theta));
    // Only the two wells bracketing theta have overlapping windows.
    const int left = i / per_well;
    for (int w : {left, left + 1}) {
      const double t = theta - w * kWellSpacing;
      if (std::abs(t) > kWellSpacing) continue;
      const double c = std::cos(1.5 * t);
      v += site_offsets[w % kSiteCount] * c * c;
    }
    p.value[i] = v;
  }
  return p;
}

std::vector<double> ring_energies(const RingPotential& potential, double kinetic_scale, int count)
{
  check_solve_inputs(potential, kinetic_scale, count);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian(potential, kinetic_scale),
                                                       Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::numerical_failure, "ring eigensolver did not converge (n_grid=" +
                                           std::to_string(potential.n_grid) + ")");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + count};
}

RotationalSpectrum solve_ring(const RingPotential& potential, double kinetic_scale, int count)
{
  check_solve_inputs(potential, kinetic_scale, count);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian(potential, kinetic_scale));
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::numerical_failure, "ring eigensolver did not converge (n_grid=" +
                                           std::to_string(potential.n_grid) + ")");

  RotationalSpectrum out;
  out.potential = potential;
  out.kinetic_scale = kinetic_scale;
  const double norm = 1.0 / std::sqrt(potential.step());
  for (int k = 0; k < count; ++k) {
    RotationalLevel level;
    level.energy = solver.eigenvalues()(k);
    Eigen::VectorXd psi = solver.eigenvectors().col(k) * norm;
    // Fix the arbitrary sign for reproducible output.
    Eigen::Index imax = 0;
    psi.cwiseAbs().maxCoeff(&imax);
    if (psi(imax) < 0) psi = -psi;
    level.wavefunction.assign(psi.data(), psi.data() + psi.size());
    out.ipr.push_back(ipr_of(well_masses(potential, level.wavefunction)));
    out.levels.push_back(std::move(level));
  }
  return out;
}

SiteValues well_masses(const RingPotential& potential, std::span<const double> wavefunction)
{
  if (static_cast<int>(wavefunction.size()) != potential.n_grid)
    fail(ErrorKind::invalid_argument, "wavefunction does not match the grid");
  SiteValues mass{};
  const double h = potential.step();
  for (int i = 0; i < potential.n_grid; ++i) {
    const double p = wavefunction[i] * wavefunction[i] * h;
    const WellShare s = well_share(potential.theta[i]);
    mass[s.first] += s.first_share * p;
    mass[s.second] += (1.0 - s.first_share) * p;
  }
  return mass;
}

TightBindingFit fit_tight_binding(std::span<const double> levels)
{
  if (levels.size() != kSiteCount) fail(ErrorKind::invalid_argument, "tight-binding fit needs six levels");
  std::array<double, kSiteCount> e;
  std::copy(levels.begin(), levels.end(), e.begin());
  std::sort(e.begin(), e.end());

  // Ascending tight-binding levels are E0 + delta0 * (-2, -1, -1, 1, 1, 2).
  constexpr std::array<double, kSiteCount> pattern{-2, -1, -1, 1, 1, 2};
  TightBindingFit fit;
  fit.e0 = std::accumulate(e.begin(), e.end(), 0.0) / kSiteCount;
  double proj = 0;
  for (int i = 0; i < kSiteCount; ++i) proj += pattern[i] * (e[i] - fit.e0);
  fit.delta0 = proj / 12.0;
  if (fit.delta0 > 0) {
    double worst = 0;
    for (int i = 0; i + 1 < kSiteCount; ++i) {
      const double actual = e[i + 1] - e[i];
      const double model = fit.delta0 * (pattern[i + 1] - pattern[i]);
      worst = std::max(worst, std::abs(actual - model));
    }
    fit.splitting_error = worst / fit.delta0;
  }
  return fit;
}

double symmetric_delta0(double barrier, double kinetic_scale, int n_grid)
{
  const auto potential = build_potential(barrier, uniform_site_values(0.0), n_grid);
  return fit_tight_binding(ring_energies(potential, kinetic_scale)).delta0;
}

double calibrate_kinetic_scale(double barrier, double target_delta0, int n_grid)
{
  if (!(barrier >= 0)) fail(ErrorKind::invalid_argument, "barrier must be non-negative");
  if (!(target_delta0 > 0)) fail(ErrorKind::invalid_argument, "target delta0 must be positive");

  const auto potential = build_potential(barrier, uniform_site_values(0.0), n_grid);
  const auto residual = [&](double b) {
    return fit_tight_binding(ring_energies(potential, b)).delta0 / target_delta0 - 1.0;
  };

  // Free rotor: delta0 = 2B. A barrier only suppresses tunneling.
  double lo = 0.5 * target_delta0;
  double f_lo = residual(lo);
  for (int i = 0; f_lo > 0 && i < 60; ++i) f_lo = residual(lo *= 0.5);
  double hi = lo;
  double f_hi = f_lo;
  for (int i = 0; f_hi < 0 && i < 80; ++i) {
    lo = hi;
    f_lo = f_hi;
    f_hi = residual(hi *= 2.0);
  }
  if (f_lo > 0 || f_hi < 0)
    fail(ErrorKind::calibration_failure, "no kinetic scale brackets delta0 = " + std::to_string(target_delta0) +
                                             " meV at barrier " + std::to_string(barrier) + " meV");
  if (f_lo == 0) return lo;
  if (f_hi == 0) return hi;

  std::uintmax_t max_iter = 100;
  const auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi, f_lo, f_hi,
                                                        boost::math::tools::eps_tolerance<double>(40), max_iter);
  return 0.5 * (a + b);
}

const char* to_string(Localization flag)
{
  switch (flag) {
    case Localization::localized: return "LOCALIZED";
    case Localization::delocalized: return "DELOCALIZED";
    case Localization::intermediate: return "INTERMEDIATE";
  }
  return "?";
}

LocalizationReport localization_report(const RotationalSpectrum& spectrum, std::optional<double> grouping_threshold)
{
  const auto& levels = spectrum.levels;
  const auto& potential = spectrum.potential;
  LocalizationReport report;
  if (levels.empty()) return report;

  if (grouping_threshold) {
    report.grouping_threshold = *grouping_threshold;
  } else {
    report.grouping_threshold =
        10.0 * symmetric_delta0(potential.barrier, spectrum.kinetic_scale, potential.n_grid);
  }

  report.subsets.push_back({0});
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (levels[k].energy - levels[k - 1].energy > report.grouping_threshold) report.subsets.emplace_back();
    report.subsets.back().push_back(static_cast<int>(k));
  }

  report.levels.resize(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    report.levels[k].energy = levels[k].energy;
    report.levels[k].raw_mass = well_masses(potential, levels[k].wavefunction);
  }

  const int n = potential.n_grid;
  const double h = potential.step();
  for (std::size_t s = 0; s < report.subsets.size(); ++s) {
    const auto& subset = report.subsets[s];
    for (int k : subset) report.levels[k].subset = static_cast<int>(s);

    if (report.subsets.size() == 1) {
      // One band: average over exactly degenerate levels (basis independent).
      std::size_t i = 0;
      while (i < subset.size()) {
        std::size_t j = i + 1;
        const double e = levels[subset[i]].energy;
        const double tol = 1e-9 * std::max(1.0, std::abs(e));
        while (j < subset.size() && levels[subset[j]].energy - e <= tol) ++j;
        SiteValues avg{};
        for (std::size_t q = i; q < j; ++q)
          for (int w = 0; w < kSiteCount; ++w) avg[w] += report.levels[subset[q]].raw_mass[w] / double(j - i);
        for (std::size_t q = i; q < j; ++q) report.levels[subset[q]].mass = avg;
        i = j;
      }
      continue;
    }

    // Diagonalize X = sum_w w P_w within the subset.
    const int g = static_cast<int>(subset.size());
    Eigen::MatrixXd basis(n, g);
    for (int c = 0; c < g; ++c)
      basis.col(c) = Eigen::Map<const Eigen::VectorXd>(levels[subset[c]].wavefunction.data(), n);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      const WellShare ws = well_share(potential.theta[i]);
      x(i) = ws.first_share * ws.first + (1.0 - ws.first_share) * ws.second;
    }
    const Eigen::MatrixXd X = basis.transpose() * x.asDiagonal() * basis * h;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(X);
    const Eigen::MatrixXd localized = basis * solver.eigenvectors();
    for (int c = 0; c < g; ++c) {
      const Eigen::VectorXd col = localized.col(c);
      report.levels[subset[c]].mass = well_masses(potential, {col.data(), static_cast<std::size_t>(n)});
    }
  }

  for (auto& level : report.levels) {
    level.ipr = ipr_of(level.mass);
    level.flag = classify(level.mass);
  }
  return report;
}

}  // namespace gcenter::ring
