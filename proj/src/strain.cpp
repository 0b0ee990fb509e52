#include "gcenter/strain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcenter/error.hpp"

namespace gcenter::strain {

namespace {

// Invariants of a direction d in the defect frame: (d.a)^2 with a = [111]/sqrt3,
// then the three (d.d_p)^2 sorted ascending.
using Signature = std::array<double, 4>;

Signature signature(const Eigen::Vector3d& d, std::array<double, 3>* per_pair = nullptr)
{
  static const Eigen::Vector3d axis = Eigen::Vector3d(1, 1, 1).normalized();
  static const std::array<Eigen::Vector3d, 3> dipoles{Eigen::Vector3d(1, -1, 0).normalized(),
                                                      Eigen::Vector3d(0, 1, -1).normalized(),
                                                      Eigen::Vector3d(-1, 0, 1).normalized()};
  std::array<double, 3> q;
  for (int p = 0; p < 3; ++p) q[p] = std::pow(d.dot(dipoles[p]), 2);
  if (per_pair) *per_pair = q;
  std::array<double, 3> sorted = q;
  std::sort(sorted.begin(), sorted.end());
  return {std::pow(d.dot(axis), 2), sorted[0], sorted[1], sorted[2]};
}

const std::array<Signature, 5>& canonical_signatures()
{
  static const std::array<Signature, 5> table = [] {
    std::array<Signature, 5> t;
    t[static_cast<int>(StrainClass::c111)] = signature(Eigen::Vector3d(1, 1, 1).normalized());
    t[static_cast<int>(StrainClass::c_1_11)] = signature(Eigen::Vector3d(-1, -1, 1).normalized());
    t[static_cast<int>(StrainClass::c110)] = signature(Eigen::Vector3d(1, 1, 0).normalized());
    t[static_cast<int>(StrainClass::c_110)] = signature(Eigen::Vector3d(-1, 1, 0).normalized());
    t[static_cast<int>(StrainClass::c001)] = signature(Eigen::Vector3d(0, 0, 1));
    return t;
  }();
  return table;
}

void check_strain(const StrainSpec& strain, const StrainOptions& options)
{
  if (!std::isfinite(strain.magnitude)) fail(ErrorKind::invalid_argument, "strain magnitude must be finite");
  if (!(strain.direction.norm() > 0)) fail(ErrorKind::invalid_argument, "strain direction must be nonzero");
  if (!options.allow_nonlinear && std::abs(strain.magnitude) > kLinearRegimeLimit)
    fail(ErrorKind::nonlinear_regime, "strain magnitude " + std::to_string(strain.magnitude) +
                                          " exceeds the linear-regime limit " + std::to_string(kLinearRegimeLimit));
}

std::vector<double> distinct(std::vector<double> values, double tolerance)
{
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values)
    if (out.empty() || v - out.back() > tolerance) out.push_back(v);
  return out;
}

}  // namespace

StrainSpec StrainSpec::along(const Miller& direction, double magnitude)
{
  if (direction.is_zero()) fail(ErrorKind::invalid_argument, "strain direction must be nonzero");
  return StrainSpec{direction.unit(), magnitude};
}

Eigen::Matrix3d StrainSpec::tensor() const
{
  const Eigen::Vector3d d = direction.normalized();
  return magnitude * d * d.transpose();
}

std::string to_string(StrainClass c)
{
  switch (c) {
    case StrainClass::c111: return "[111]";
    case StrainClass::c_1_11: return "[-1-11]";
    case StrainClass::c110: return "[110]";
    case StrainClass::c_110: return "[-110]";
    case StrainClass::c001: return "[001]";
  }
  return "?";
}

StrainClass parse_strain_class(const std::string& text)
{
  for (StrainClass c : kStrainClasses)
    if (to_string(c) == text) return c;
  fail(ErrorKind::invalid_argument, "unknown strain class '" + text + "'");
}

const StrainResponse& StrainResponse::defaults()
{
  static const StrainResponse response = [] {
    StrainResponse r;
    const auto set = [&r](StrainClass c, double split, double shift) {
      r.split[static_cast<int>(c)] = split;
      r.shift[static_cast<int>(c)] = shift;
    };
    set(StrainClass::c111, 0.0, -300.0);
    set(StrainClass::c_1_11, 2280.0, 400.0);
    set(StrainClass::c110, 2850.0, -1200.0);
    set(StrainClass::c_110, 1900.0, -500.0);
    set(StrainClass::c001, 1520.0, 800.0);
    return r;
  }();
  return response;
}

DefectFrameStrain frame_transform(const StrainSpec& strain, const Miller& defect_axis)
{
  if (!is_111_family(defect_axis))
    fail(ErrorKind::invalid_orientation, "defect axis " + defect_axis.to_string() + " is not a <111> direction");
  if (!(strain.direction.norm() > 0)) fail(ErrorKind::invalid_argument, "strain direction must be nonzero");

  DefectFrameStrain out;
  out.defect_axis = defect_axis;
  // Sign flips map the axis onto [111] and its dipoles onto the canonical ones.
  out.rotation = Eigen::Vector3d(defect_axis.h, defect_axis.k, defect_axis.l).asDiagonal();
  out.direction = out.rotation * strain.direction.normalized();
  out.tensor = out.rotation * strain.tensor() * out.rotation.transpose();

  std::array<double, 3> q;
  const Signature sig = signature(out.direction, &q);
  out.class_distance = std::numeric_limits<double>::infinity();
  for (StrainClass c : kStrainClasses) {
    const Signature& ref = canonical_signatures()[static_cast<int>(c)];
    double d2 = 0;
    for (int i = 0; i < 4; ++i) d2 += std::pow(sig[i] - ref[i], 2);
    if (std::sqrt(d2) < out.class_distance) {
      out.class_distance = std::sqrt(d2);
      out.strain_class = c;
    }
  }

  const double mean = (q[0] + q[1] + q[2]) / 3.0;
  double spread = 0;
  for (int p = 0; p < 3; ++p) {
    const double dev = std::abs(q[p] - mean);
    if (dev > spread + 1e-12) {
      spread = dev;
      out.distinct_pair = p;
    }
  }
  return out;
}

SiteValues site_offsets_for_strain(const StrainSpec& strain, const Miller& defect_axis,
                                   const StrainResponse& response, const StrainOptions& options)
{
  check_strain(strain, options);
  const DefectFrameStrain frame = frame_transform(strain, defect_axis);
  const double m = strain.magnitude;
  const double split_m = response.sign == SplitSign::linear ? m : std::abs(m);

  SiteValues offsets = uniform_site_values(response.shift_of(frame.strain_class) * m);
  if (frame.distinct_pair >= 0) {
    const double split = response.split_of(frame.strain_class) * split_m;
    offsets[frame.distinct_pair] += split;
    offsets[frame.distinct_pair + 3] += split;
  }
  return offsets;
}

EnsembleReport ensemble_lines(const StrainSpec& strain, const StrainResponse& response, double tolerance,
                              const StrainOptions& options)
{
  if (!(tolerance > 0)) fail(ErrorKind::invalid_argument, "line tolerance must be positive");
  EnsembleReport report;
  std::vector<double> all;
  for (const Miller& axis : defect_orientations()) {
    OrientationLines o;
    o.defect_axis = axis;
    o.strain_class = frame_transform(strain, axis).strain_class;
    o.offsets = site_offsets_for_strain(strain, axis, response, options);
    o.lines = distinct({o.offsets.begin(), o.offsets.end()}, tolerance);
    all.insert(all.end(), o.lines.begin(), o.lines.end());
    report.orientations.push_back(std::move(o));
  }
  report.lines = distinct(std::move(all), tolerance);
  return report;
}

}  // namespace gcenter::strain
