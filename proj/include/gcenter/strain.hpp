#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gcenter/crystal.hpp"

// Uniaxial strain -> per-site energy offsets for the four <111> defect
// orientations, through a small table of per-class response coefficients.
namespace gcenter::strain {

/// |magnitude| above this is outside the linear regime.
inline constexpr double kLinearRegimeLimit = 0.005;

struct StrainSpec {
  Eigen::Vector3d direction{0, 0, 1};  ///< unit vector, lab frame
  double magnitude = 0.0;  ///< signed, 0.001 = 0.1 %

  static StrainSpec along(const Miller& direction, double magnitude);
  /// epsilon = magnitude * d (x) d
  Eigen::Matrix3d tensor() const;
};

/// Direction classes in the frame of a [111] defect. The [-1-11] class
/// collects the three <111> directions other than the defect axis.
enum class StrainClass { c111, c_1_11, c110, c_110, c001 };

inline constexpr std::array<StrainClass, 5> kStrainClasses{StrainClass::c111, StrainClass::c_1_11, StrainClass::c110,
                                                          StrainClass::c_110, StrainClass::c001};

/// "[111]", "[-1-11]", "[110]", "[-110]", "[001]"
std::string to_string(StrainClass c);
StrainClass parse_strain_class(const std::string& text);

enum class SplitSign {
  linear,    ///< splitting flips with the sign of the strain
  magnitude  ///< splitting follows |strain|
};

/// meV per unit strain, indexed by StrainClass.
struct StrainResponse {
  std::array<double, 5> split{};
  std::array<double, 5> shift{};
  SplitSign sign = SplitSign::linear;

  double split_of(StrainClass c) const { return split[static_cast<int>(c)]; }
  double shift_of(StrainClass c) const { return shift[static_cast<int>(c)]; }

  /// Shipped calibration (data/strain_calibration.json): 1.9 meV at 0.1 %
  /// [-110] strain; other classes are placeholders ordered as
  /// [110] > [-1-11] > [-110] > [001] > [111] = 0.
  static const StrainResponse& defaults();
};

struct DefectFrameStrain {
  Miller defect_axis{1, 1, 1};
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  ///< lab -> defect frame
  Eigen::Matrix3d tensor = Eigen::Matrix3d::Zero();         ///< epsilon in defect frame
  Eigen::Vector3d direction{0, 0, 1};                       ///< strain direction in defect frame
  StrainClass strain_class = StrainClass::c111;
  /// Distance of the direction's invariants to the class's canonical ones.
  double class_distance = 0.0;
  /// Dipole pair singled out by the strain, -1 if all three are equivalent.
  int distinct_pair = -1;
};

/// Rotates the strain into the frame where the defect axis is [111] and its
/// dipoles are [1-10], [01-1], [-101], then classifies it.
DefectFrameStrain frame_transform(const StrainSpec& strain, const Miller& defect_axis);

struct StrainOptions {
  bool allow_nonlinear = false;
};

/// Offsets: shift * m on all sites plus split * m on the distinct pair.
/// Throws nonlinear_regime beyond the guard unless allowed.
SiteValues site_offsets_for_strain(const StrainSpec& strain, const Miller& defect_axis,
                                   const StrainResponse& response = StrainResponse::defaults(),
                                   const StrainOptions& options = {});

struct OrientationLines {
  Miller defect_axis{1, 1, 1};
  StrainClass strain_class = StrainClass::c111;
  SiteValues offsets{};
  std::vector<double> lines;  ///< distinct offsets (meV), ascending
};

struct EnsembleReport {
  std::vector<OrientationLines> orientations;
  std::vector<double> lines;  ///< distinct offsets over all orientations (meV), ascending
};

/// Lines of the four orientations; offsets closer than `tolerance` count as one.
EnsembleReport ensemble_lines(const StrainSpec& strain, const StrainResponse& response = StrainResponse::defaults(),
                              double tolerance = 0.05, const StrainOptions& options = {});

}  // namespace gcenter::strain
