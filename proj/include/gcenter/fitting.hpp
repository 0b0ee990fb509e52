#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gcenter/dipole.hpp"
#include "gcenter/line_spectrum.hpp"

// Inverse analysis: Gaussian multi-peak fits, site-assignment inference from
// line polarizations and intensity ratios, and the combined defect report.
namespace gcenter::fitting {

enum class PeakShape { gaussian, lorentzian };

struct Peak {
  double center = 0.0;  ///< meV
  double fwhm = 0.0;    ///< meV
  double area = 0.0;    ///< intensity * meV

  double height(PeakShape shape = PeakShape::gaussian) const;
};

struct PeakFit {
  std::vector<Peak> peaks;  ///< ascending center
  double baseline = 0.0;
  double residual_rms = 0.0;
  double bic = 0.0;
  /// BIC of every order tried, index 0 = one peak. NaN where the fit failed.
  std::vector<double> bic_by_order;
  PeakShape shape = PeakShape::gaussian;

  double evaluate(double energy) const;
};

struct PeakFitOptions {
  PeakShape shape = PeakShape::gaussian;
  /// Initial FWHM; estimated from the tallest feature when absent.
  std::optional<double> fwhm_guess;
  int max_evaluations = 4000;
};

/// Fits 1..max_peaks peaks plus a constant baseline and keeps the order with
/// the lowest BIC. Needs max_peaks in [1,4] and at least 20 samples.
PeakFit fit_peaks(const IntensityCurve& spectrum, int max_peaks = 4, const PeakFitOptions& options = {});

/// Fit with exactly `order` peaks. Throws fit_failure if it does not converge.
PeakFit fit_peaks_fixed(const IntensityCurve& spectrum, int order, const PeakFitOptions& options = {});

/// Visibility above which a line counts as linearly polarized.
inline constexpr double kPolarizedVisibility = 0.8;

/// What is known about one line, L0 = highest energy.
struct LineObservation {
  std::optional<double> visibility;
  /// Used when no visibility is available.
  std::optional<bool> polarized;
  /// Orientation of a polarized line relative to the defect's main axis (deg).
  std::optional<double> angle_deg;
  /// Intensity relative to the strongest line.
  std::optional<double> ratio;

  bool is_polarized() const;
};

struct LinePrediction {
  double visibility = 0.0;
  double angle_deg = 0.0;  ///< relative to the main axis
  bool polarized = false;
  double relative_intensity = 0.0;
};

struct AssignmentHypothesis {
  std::vector<SiteSet> partition;  ///< class of each line
  std::vector<LinePrediction> predictions;
  std::vector<double> z;  ///< standardized deviation of every compared quantity
  double cost = 0.0;
  double score = 0.0;     ///< 1 / (1 + cost)
  std::string interpretation;

  std::string to_string() const;  ///< "{0,3}|{1,2,4,5}"
};

struct AssignmentOptions {
  bool allow_pair_splitting = false;
  /// Intensity ratios are taken behind a polarizer along the main axis;
  /// false means unpolarized detection.
  bool ratio_along_main_axis = true;
  double visibility_sigma = 0.1;
  double ratio_relative_sigma = 0.1;
  double angle_sigma_deg = 10.0;
  /// Hypotheses with every |z| below this are consistent.
  double consistency_z = 3.0;
  /// Keep consistent hypotheses scoring at least this fraction of the best.
  double keep_fraction = 0.95;
  Miller axis{1, 1, 1};
};

struct AssignmentResult {
  std::vector<AssignmentHypothesis> hypotheses;  ///< best first; ties kept
  std::size_t enumerated = 0;
  std::string explanation;
};

/// Enumerates labelled partitions of the six sites into one class per line,
/// by default only those mapped onto themselves by n -> n+3, identifies each
/// with its image under that relabeling, predicts each line's polarization
/// and relative intensity for collection ratio r, and ranks by agreement.
AssignmentResult enumerate_assignments(const std::vector<LineObservation>& lines, double r,
                                       const AssignmentOptions& options = {});

/// Canonical representative of a labelled partition modulo n -> n+3.
std::vector<SiteSet> canonical_partition(const std::vector<SiteSet>& partition);

/// Spectrum recorded behind a polarizer at `angle_deg`.
struct PolarizedSpectrum {
  double angle_deg = 0.0;
  IntensityCurve curve;
};

struct DefectMeasurement {
  IntensityCurve spectrum;  ///< without polarizer
  std::vector<PolarizedSpectrum> polarized;
  dipole::PolarizationDiagram diagram;  ///< whole-ZPL polarization diagram
};

enum class PatternClass { singlet, doublet, triplet, quadruplet };

const char* to_string(PatternClass pattern);

struct LineReport {
  double energy = 0.0;  ///< meV
  double fwhm = 0.0;
  double area = 0.0;
  std::optional<dipole::DiagramFit> diagram;
  LineObservation observation;
};

struct ClassifyOptions {
  int max_peaks = 4;
  double r = 2.1;
  PeakFitOptions peaks;
  AssignmentOptions assignments;
};

struct DefectReport {
  PatternClass pattern = PatternClass::singlet;
  dipole::DiagramFit diagram;
  std::vector<LineReport> lines;  ///< L0 (highest energy) first
  std::vector<double> splittings;  ///< E(L_i) - E(L_i+1), meV
  PeakFit peak_fit;
  AssignmentResult assignments;
};

/// Peak fit of the spectrum, per-line polarization from the polarizer series,
/// diagram fit, then assignment inference.
DefectReport classify_defect(const DefectMeasurement& measurement, const ClassifyOptions& options = {});

}  // namespace gcenter::fitting
