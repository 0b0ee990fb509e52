#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gcenter/crystal.hpp"

// Emission-dipole geometry of the three site pairs, collection through the
// (001) top surface, and polarization diagrams.
namespace gcenter::dipole {

/// Dipoles of a <111>-oriented defect. Pair p covers sites {p, p+3}; for a
/// [111] axis the pairs radiate along [1-10], [01-1] and [-101].
struct DipoleGeometry {
  Miller axis{1, 1, 1};
  std::array<Eigen::Vector3d, 3> dipoles;
  /// Direction of each dipole projected on (001), measured from [110], in [0,180).
  std::array<double, 3> projected_angle_deg{};
  std::array<bool, 3> in_plane{};

  int in_plane_pair() const;
  double site_angle_deg(int site) const { return projected_angle_deg[dipole_pair(site)]; }
  bool site_in_plane(int site) const { return in_plane[dipole_pair(site)]; }
  /// Orientation of the in-plane dipole, i.e. the main axis of the total diagram.
  double main_axis_deg() const { return projected_angle_deg[in_plane_pair()]; }
};

/// Throws invalid_orientation unless `axis` is a <111> direction.
DipoleGeometry dipoles_for_axis(const Miller& axis);
DipoleGeometry dipoles_for_axis(const Eigen::Vector3d& axis);

/// Radiometry of the two dipole classes at one emitter depth.
struct CollectionModel {
  double depth_nm = 0.0;
  double purcell_in_plane = 1.0;
  double purcell_out_of_plane = 1.0;
  double ceff_in_plane = 1.0;
  double ceff_out_of_plane = 1.0;

  /// r = (F C_eff)_in-plane / (F C_eff)_out-of-plane
  double ratio() const;
  /// Relative collected intensity: r for the in-plane dipole, 1 otherwise.
  double gain(bool in_plane) const { return in_plane ? ratio() : 1.0; }

  /// Model carrying only a collection ratio (out-of-plane terms set to 1).
  static CollectionModel with_ratio(double r);
};

struct CollectionRow {
  double depth = 0.0;
  double purcell_in_plane = 0.0;
  double purcell_out_of_plane = 0.0;
  double ceff_in_plane = 0.0;
  double ceff_out_of_plane = 0.0;
};

/// Depth table interpolated linearly per column.
class CollectionTable {
 public:
  explicit CollectionTable(std::vector<CollectionRow> rows);

  /// Table shipped in data/collection_table.json, compiled in.
  static const CollectionTable& defaults();

  const std::vector<CollectionRow>& rows() const { return rows_; }
  double min_depth() const { return rows_.front().depth; }
  double max_depth() const { return rows_.back().depth; }

  /// Throws out_of_range outside the tabulated layer.
  CollectionModel at(double depth_nm) const;

 private:
  std::vector<CollectionRow> rows_;
};

CollectionModel collection_ratio(double depth_nm);
CollectionModel collection_ratio(const CollectionTable& table, double depth_nm);

/// I(theta) = mean + c2 cos(2 theta) + s2 sin(2 theta), theta in degrees.
/// Any incoherent sum of cos^2 lobes has this form.
struct MalusCurve {
  double mean = 0.0;
  double c2 = 0.0;
  double s2 = 0.0;

  double operator()(double theta_deg) const;
  double amplitude() const;
  double max() const { return mean + amplitude(); }
  double min() const { return mean - amplitude(); }
  /// (Imax - Imin) / Imax
  double visibility() const;
  /// Angle of the maximum in [0,180).
  double orientation_deg() const;

  /// Adds weight * cos^2(theta - angle).
  void add_lobe(double weight, double angle_deg);
};

/// Collected-intensity curve for sites weighted by `site_weight`.
MalusCurve site_curve(const DipoleGeometry& geometry, const SiteValues& site_weight,
                      const CollectionModel& collection);

struct DiagramFit {
  double visibility = 0.0;
  double orientation_deg = 0.0;  ///< [0,180); meaningless if !orientation_defined
  double amplitude = 0.0;        ///< A in A [V cos^2(theta - phi) + 1 - V]
  bool orientation_defined = true;
  /// Covariance of (V, phi[deg]).
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double residual_rms = 0.0;
};

struct PolarizationDiagram {
  std::vector<double> angle_deg;
  std::vector<double> intensity;
  std::optional<DiagramFit> fit;
};

/// 0, 10, ..., 350 degrees.
std::vector<double> default_diagram_angles();

/// Polarizer-resolved intensity of the sites in `active_sites`, weighted by
/// `occupation`, normalized so the continuous maximum is 1.
PolarizationDiagram diagram_from_sites(const DipoleGeometry& geometry, SiteSet active_sites,
                                       const SiteValues& occupation,
                                       const CollectionModel& collection,
                                       std::span<const double> angles_deg = {});

struct DiagramFitOptions {
  /// Known unpolarized background, subtracted before fitting.
  double background = 0.0;
};

/// Least-squares fit of A [V cos^2(theta - phi) + 1 - V]. Requires at least 8
/// samples spanning 150 degrees or more.
DiagramFit fit_diagram(const PolarizationDiagram& diagram, const DiagramFitOptions& options = {});

}  // namespace gcenter::dipole
