#include "gcenter/dipole.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "gcenter/error.hpp"
#include "gcenter/units.hpp"

namespace gcenter::dipole {

namespace {

constexpr double kInPlaneTolerance = 1e-12;

}  // namespace

int DipoleGeometry::in_plane_pair() const
{
  for (int p = 0; p < 3; ++p)
    if (in_plane[p]) return p;
  return 0;
}

DipoleGeometry dipoles_for_axis(const Miller& axis)
{
  if (!is_111_family(axis))
    fail(ErrorKind::invalid_orientation, "defect axis " + axis.to_string() + " is not a <111> direction");

  const std::array<int, 3> a{axis.h, axis.k, axis.l};
  DipoleGeometry g;
  g.axis = axis;
  // Pair p radiates along a_i e_i - a_j e_j with (i, j) = (p, p+1 mod 3); each
  // such <110> vector is perpendicular to the axis.
  for (int p = 0; p < 3; ++p) {
    const int i = p;
    const int j = (p + 1) % 3;
    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    d[i] = a[i];
    d[j] = -a[j];
    g.dipoles[p] = d.normalized();

    const Eigen::Vector2d projected = g.dipoles[p].head<2>();
    g.in_plane[p] = std::abs(g.dipoles[p].z()) < kInPlaneTolerance;
    const double absolute = units::rad_to_deg(std::atan2(projected.y(), projected.x()));
    g.projected_angle_deg[p] = units::wrap_half_turn_deg(absolute - 45.0);
  }
  return g;
}

DipoleGeometry dipoles_for_axis(const Eigen::Vector3d& axis)
{
  const double norm = axis.norm();
  if (!(norm > 0)) fail(ErrorKind::invalid_orientation, "zero defect axis");
  const Eigen::Vector3d u = axis / norm;
  const double c = 1.0 / std::sqrt(3.0);
  Miller m;
  std::array<int*, 3> idx{&m.h, &m.k, &m.l};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(std::abs(u[i]) - c) > 1e-9)
      fail(ErrorKind::invalid_orientation, "defect axis is not a <111> direction");
    *idx[i] = u[i] > 0 ? 1 : -1;
  }
  return dipoles_for_axis(m);
}

double CollectionModel::ratio() const
{
  return (purcell_in_plane * ceff_in_plane) / (purcell_out_of_plane * ceff_out_of_plane);
}

CollectionModel CollectionModel::with_ratio(double r)
{
  if (!(r > 0)) fail(ErrorKind::invalid_argument, "collection ratio must be positive");
  CollectionModel m;
  m.purcell_in_plane = r;
  return m;
}

CollectionTable::CollectionTable(std::vector<CollectionRow> rows) : rows_(std::move(rows))
{
  if (rows_.size() < 2) fail(ErrorKind::invalid_argument, "collection table needs at least two rows");
  for (std::size_t i = 1; i < rows_.size(); ++i)
    if (!(rows_[i].depth > rows_[i - 1].depth))
      fail(ErrorKind::invalid_argument, "collection table depths must increase");
  for (const auto& r : rows_)
    if (!(r.purcell_in_plane > 0 && r.purcell_out_of_plane > 0 && r.ceff_in_plane > 0 &&
          r.ceff_out_of_plane > 0))
      fail(ErrorKind::invalid_argument, "collection table entries must be positive");
}

const CollectionTable& CollectionTable::defaults()
{
  // Mirrors data/collection_table.json.
  static const CollectionTable kTable({
      {0.0, 1.000, 0.492, 0.02497, 0.02500},
      {10.0, 0.985, 0.489, 0.02901, 0.02845},
      {20.0, 0.972, 0.486, 0.03314, 0.03190},
      {30.0, 0.965, 0.484, 0.03727, 0.03534},
      {40.0, 0.968, 0.485, 0.04133, 0.03879},
      {50.0, 0.980, 0.488, 0.04524, 0.04224},
      {58.0, 0.995, 0.491, 0.048185, 0.04500},
  });
  return kTable;
}

CollectionModel CollectionTable::at(double depth_nm) const
{
  if (!(depth_nm >= min_depth() && depth_nm <= max_depth()))
    fail(ErrorKind::out_of_range, "depth " + std::to_string(depth_nm) + " nm outside the silicon layer [" +
                                      std::to_string(min_depth()) + ", " + std::to_string(max_depth()) + "]");
  auto hi = std::lower_bound(rows_.begin(), rows_.end(), depth_nm,
                             [](const CollectionRow& r, double d) { return r.depth < d; });
  if (hi == rows_.begin()) ++hi;
  auto lo = hi - 1;
  const double t = (depth_nm - lo->depth) / (hi->depth - lo->depth);
  auto lerp = [t](double a, double b) { return a + t * (b - a); };

  CollectionModel m;
  m.depth_nm = depth_nm;
  m.purcell_in_plane = lerp(lo->purcell_in_plane, hi->purcell_in_plane);
  m.purcell_out_of_plane = lerp(lo->purcell_out_of_plane, hi->purcell_out_of_plane);
  m.ceff_in_plane = lerp(lo->ceff_in_plane, hi->ceff_in_plane);
  m.ceff_out_of_plane = lerp(lo->ceff_out_of_plane, hi->ceff_out_of_plane);
  return m;
}

CollectionModel collection_ratio(double depth_nm)
{
  return CollectionTable::defaults().at(depth_nm);
}

CollectionModel collection_ratio(const CollectionTable& table, double depth_nm)
{
  return table.at(depth_nm);
}

double MalusCurve::operator()(double theta_deg) const
{
  const double t = 2.0 * units::deg_to_rad(theta_deg);
  return mean + c2 * std::cos(t) + s2 * std::sin(t);
}

double MalusCurve::amplitude() const { return std::hypot(c2, s2); }

double MalusCurve::visibility() const
{
  const double hi = max();
  if (!(hi > 0)) return 0.0;
  return std::clamp((hi - std::max(min(), 0.0)) / hi, 0.0, 1.0);
}

double MalusCurve::orientation_deg() const
{
  return units::wrap_half_turn_deg(0.5 * units::rad_to_deg(std::atan2(s2, c2)));
}

void MalusCurve::add_lobe(double weight, double angle_deg)
{
  // cos^2(x) = (1 + cos 2x) / 2
  const double t = 2.0 * units::deg_to_rad(angle_deg);
  mean += 0.5 * weight;
  c2 += 0.5 * weight * std::cos(t);
  s2 += 0.5 * weight * std::sin(t);
}

MalusCurve site_curve(const DipoleGeometry& geometry, const SiteValues& site_weight,
                      const CollectionModel& collection)
{
  // Sites of one pair share a dipole, so lobes are accumulated per pair.
  std::array<double, 3> pair_weight{};
  for (int n = 0; n < kSiteCount; ++n) pair_weight[dipole_pair(n)] += site_weight[n];

  MalusCurve curve;
  for (int p = 0; p < 3; ++p) {
    if (pair_weight[p] == 0) continue;
    curve.add_lobe(pair_weight[p] * collection.gain(geometry.in_plane[p]), geometry.projected_angle_deg[p]);
  }
  return curve;
}

std::vector<double> default_diagram_angles()
{
  std::vector<double> angles;
  for (int a = 0; a < 360; a += 10) angles.push_back(a);
  return angles;
}

PolarizationDiagram diagram_from_sites(const DipoleGeometry& geometry, SiteSet active_sites,
                                       const SiteValues& occupation,
                                       const CollectionModel& collection,
                                       std::span<const double> angles_deg)
{
  if (active_sites.empty()) fail(ErrorKind::empty_diagram, "no active sites");

  SiteValues weight{};
  for (int n = 0; n < kSiteCount; ++n) {
    if (occupation[n] < 0) fail(ErrorKind::invalid_argument, "site occupation must be non-negative");
    if (!active_sites.contains(n)) {
      if (occupation[n] > 0)
        fail(ErrorKind::invalid_argument, "occupation of site " + std::to_string(n) + " outside the active set");
      continue;
    }
    weight[n] = occupation[n];
  }

  const MalusCurve curve = site_curve(geometry, weight, collection);
  if (!(curve.max() > 0)) fail(ErrorKind::empty_diagram, "active sites carry no occupation");

  std::vector<double> angles;
  if (angles_deg.empty())
    angles = default_diagram_angles();
  else
    angles.assign(angles_deg.begin(), angles_deg.end());

  PolarizationDiagram diagram;
  diagram.angle_deg = angles;
  diagram.intensity.reserve(angles.size());
  const double norm = curve.max();
  for (double a : angles) diagram.intensity.push_back(std::max(curve(a) / norm, 0.0));
  return diagram;
}

DiagramFit fit_diagram(const PolarizationDiagram& diagram, const DiagramFitOptions& options)
{
  const std::size_t n = diagram.angle_deg.size();
  if (n != diagram.intensity.size()) fail(ErrorKind::invalid_argument, "diagram angle/intensity size mismatch");
  if (n < 8) fail(ErrorKind::invalid_argument, "diagram fit needs at least 8 samples");
  const auto [lo, hi] = std::minmax_element(diagram.angle_deg.begin(), diagram.angle_deg.end());
  if (*hi - *lo < 150.0) fail(ErrorKind::invalid_argument, "diagram samples must span at least 150 degrees");

  // A [V cos^2(theta - phi) + 1 - V] = a + b cos 2theta + c sin 2theta with
  // a = A (1 - V/2) and hypot(b, c) = A V / 2, so the fit is linear.
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * units::deg_to_rad(diagram.angle_deg[i]);
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(t);
    design(i, 2) = std::sin(t);
    y(i) = diagram.intensity[i] - options.background;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) fail(ErrorKind::invalid_argument, "diagram angles do not resolve the cos(2 theta) terms");
  const Eigen::Vector3d coef = qr.solve(y);
  const Eigen::VectorXd residual = y - design * coef;

  const double a = coef(0);
  const double b = coef(1);
  const double c = coef(2);
  const double amp = std::hypot(b, c);
  if (!(a > 0)) fail(ErrorKind::fit_failure, "diagram has no positive mean intensity");

  DiagramFit fit;
  fit.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(n));

  if (amp <= 1e-12 * a) {
    fit.visibility = 0.0;
    fit.orientation_defined = false;
    fit.amplitude = a;
    return fit;
  }

  const double peak = a + amp;
  fit.visibility = std::min(2.0 * amp / peak, 1.0);
  fit.orientation_deg = units::wrap_half_turn_deg(0.5 * units::rad_to_deg(std::atan2(c, b)));
  fit.amplitude = peak;

  if (n > 3) {
    const double sigma2 = residual.squaredNorm() / static_cast<double>(n - 3);
    const Eigen::Matrix3d cov_abc = sigma2 * (design.transpose() * design).inverse();
    Eigen::Matrix<double, 2, 3> jac;
    const double denom = peak * peak;
    jac(0, 0) = -2.0 * amp / denom;
    jac(0, 1) = 2.0 * a / denom * b / amp;
    jac(0, 2) = 2.0 * a / denom * c / amp;
    const double to_deg = units::rad_to_deg(1.0);
    jac(1, 0) = 0.0;
    jac(1, 1) = -c / (2.0 * amp * amp) * to_deg;
    jac(1, 2) = b / (2.0 * amp * amp) * to_deg;
    fit.covariance = jac * cov_abc * jac.transpose();
  }
  return fit;
}

}  // namespace gcenter::dipole
