#include "gcenter/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "gcenter/error.hpp"
#include "gcenter/units.hpp"

namespace gcenter::fitting {

namespace {

const double kGaussNorm = 2.0 * std::sqrt(std::log(2.0) / units::kPi);
const double kFourLn2 = 4.0 * std::log(2.0);

// Unit-area profile and its log-derivatives with respect to centre and ln(fwhm).
struct ProfileTerms {
  double value;
  double d_center;
  double d_log_width;
};

ProfileTerms profile(PeakShape shape, double u, double w)
{
  if (shape == PeakShape::gaussian) {
    const double g = kGaussNorm / w * std::exp(-kFourLn2 * u * u / (w * w));
    return {g, g * 2.0 * kFourLn2 * u / (w * w), g * (2.0 * kFourLn2 * u * u / (w * w) - 1.0)};
  }
  const double d = u * u + 0.25 * w * w;
  const double l = w / (2.0 * units::kPi) / d;
  return {l, l * 2.0 * u / d, l * (1.0 - 0.5 * w * w / d)};
}

// Parameters: [baseline, (centre, ln fwhm, ln area) per peak], in scaled units.
struct PeakResidual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Eigen::VectorXd& x;
  const Eigen::VectorXd& y;
  int peaks;
  PeakShape shape;

  int inputs() const { return 1 + 3 * peaks; }
  int values() const { return static_cast<int>(x.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const
  {
    f = Eigen::VectorXd::Constant(x.size(), p(0)) - y;
    for (int k = 0; k < peaks; ++k) {
      const double c = p(1 + 3 * k), w = std::exp(p(2 + 3 * k)), a = std::exp(p(3 + 3 * k));
      for (Eigen::Index i = 0; i < x.size(); ++i) f(i) += a * profile(shape, x(i) - c, w).value;
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const
  {
    j.resize(x.size(), inputs());
    j.col(0).setOnes();
    for (int k = 0; k < peaks; ++k) {
      const double c = p(1 + 3 * k), w = std::exp(p(2 + 3 * k)), a = std::exp(p(3 + 3 * k));
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const ProfileTerms t = profile(shape, x(i) - c, w);
        j(i, 1 + 3 * k) = a * t.d_center;
        j(i, 2 + 3 * k) = a * t.d_log_width;
        j(i, 3 + 3 * k) = a * t.value;
      }
    }
    return 0;
  }
};

struct Scaled {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double x_ref = 0.0;
  double y_scale = 1.0;
  double step = 0.0;
  double span = 0.0;
};

Scaled scale(const IntensityCurve& curve)
{
  const auto n = static_cast<Eigen::Index>(curve.size());
  Scaled s;
  s.x_ref = 0.5 * (curve.energy.front() + curve.energy.back());
  s.x.resize(n);
  s.y.resize(n);
  double ymax = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s.x(i) = curve.energy[i] - s.x_ref;
    s.y(i) = curve.intensity[i];
    ymax = std::max(ymax, std::abs(s.y(i)));
  }
  if (!(ymax > 0)) fail(ErrorKind::fit_failure, "spectrum is identically zero");
  s.y_scale = ymax;
  s.y /= ymax;
  s.span = s.x(n - 1) - s.x(0);
  s.step = s.span / static_cast<double>(n - 1);
  return s;
}

double percentile(Eigen::VectorXd v, double q)
{
  std::sort(v.data(), v.data() + v.size());
  return v(static_cast<Eigen::Index>(q * static_cast<double>(v.size() - 1)));
}

// FWHM of the tallest feature from its half-maximum crossings.
double estimate_fwhm(const Scaled& s, double baseline)
{
  Eigen::Index top = 0;
  s.y.maxCoeff(&top);
  const double half = baseline + 0.5 * (s.y(top) - baseline);
  Eigen::Index lo = top, hi = top;
  while (lo > 0 && s.y(lo) > half) --lo;
  while (hi < s.y.size() - 1 && s.y(hi) > half) ++hi;
  return std::clamp(s.x(hi) - s.x(lo), 3.0 * s.step, 0.5 * s.span);
}

struct RawFit {
  Eigen::VectorXd params;
  double rss = std::numeric_limits<double>::infinity();
  bool ok = false;
};

RawFit run_lm(const Scaled& s, int order, Eigen::VectorXd start, const PeakFitOptions& options)
{
  PeakResidual functor{s.x, s.y, order, options.shape};
  Eigen::LevenbergMarquardt<PeakResidual> lm(functor);
  lm.parameters.maxfev = options.max_evaluations;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  const auto status = lm.minimize(start);

  RawFit fit;
  fit.params = start;
  Eigen::VectorXd f(s.x.size());
  functor(start, f);
  fit.rss = f.squaredNorm();
  const bool converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                         status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation;
  fit.ok = converged && std::isfinite(fit.rss);
  for (int k = 0; k < order && fit.ok; ++k) {
    const double c = start(1 + 3 * k), w = std::exp(start(2 + 3 * k));
    if (!(c >= s.x(0) && c <= s.x(s.x.size() - 1)) || !(w >= 0.25 * s.step && w <= 2.0 * s.span)) fit.ok = false;
  }
  return fit;
}

// Adds a peak at the largest positive residual of `params`.
Eigen::VectorXd add_peak(const Scaled& s, const Eigen::VectorXd& params, int order, double width, PeakShape shape)
{
  PeakResidual functor{s.x, s.y, order, shape};
  Eigen::VectorXd f(s.x.size());
  functor(params, f);
  Eigen::Index where = 0;
  const double height = std::max((-f).maxCoeff(&where), 1e-3);
  const double unit_peak = profile(shape, 0.0, width).value;

  Eigen::VectorXd next(params.size() + 3);
  next.head(params.size()) = params;
  next(params.size()) = s.x(where);
  next(params.size() + 1) = std::log(width);
  next(params.size() + 2) = std::log(height / unit_peak);
  return next;
}

PeakFit to_peak_fit(const Scaled& s, const RawFit& raw, int order, PeakShape shape)
{
  PeakFit out;
  out.shape = shape;
  out.baseline = raw.params(0) * s.y_scale;
  for (int k = 0; k < order; ++k)
    out.peaks.push_back({raw.params(1 + 3 * k) + s.x_ref, std::exp(raw.params(2 + 3 * k)),
                         std::exp(raw.params(3 + 3 * k)) * s.y_scale});
  std::sort(out.peaks.begin(), out.peaks.end(), [](const Peak& a, const Peak& b) { return a.center < b.center; });
  const auto n = static_cast<double>(s.x.size());
  out.residual_rms = std::sqrt(raw.rss / n) * s.y_scale;
  // Noiseless data would drive ln(RSS) to -inf; floor at 1e-6 relative rms.
  out.bic = n * std::log(std::max(raw.rss / n, 1e-12)) + (1.0 + 3.0 * order) * std::log(n);
  return out;
}

void check_curve(const IntensityCurve& spectrum)
{
  if (spectrum.energy.size() != spectrum.intensity.size())
    fail(ErrorKind::invalid_argument, "spectrum energy/intensity size mismatch");
  if (spectrum.size() < 20) fail(ErrorKind::invalid_argument, "peak fit needs at least 20 samples");
  for (std::size_t i = 1; i < spectrum.size(); ++i)
    if (!(spectrum.energy[i] > spectrum.energy[i - 1]))
      fail(ErrorKind::invalid_argument, "spectrum energies must increase");
}

// Best of two starts: greedy extension of the previous order, and a fresh
// greedy build from the data.
RawFit fit_order(const Scaled& s, int order, const RawFit* previous, double width, const PeakFitOptions& options)
{
  RawFit best;
  if (previous && previous->ok) {
    const RawFit f = run_lm(s, order, add_peak(s, previous->params, order - 1, width, options.shape), options);
    if (f.ok) best = f;
  }
  Eigen::VectorXd fresh(1);
  fresh(0) = percentile(s.y, 0.1);
  for (int k = 0; k < order; ++k) fresh = add_peak(s, fresh, k, width, options.shape);
  const RawFit f = run_lm(s, order, fresh, options);
  if (f.ok && f.rss < best.rss) best = f;
  return best;
}

}  // namespace

double Peak::height(PeakShape shape) const { return area * profile(shape, 0.0, fwhm).value; }

double PeakFit::evaluate(double energy) const
{
  double v = baseline;
  for (const auto& p : peaks) v += p.area * profile(shape, energy - p.center, p.fwhm).value;
  return v;
}

PeakFit fit_peaks_fixed(const IntensityCurve& spectrum, int order, const PeakFitOptions& options)
{
  check_curve(spectrum);
  if (order < 1 || order > 4) fail(ErrorKind::invalid_argument, "peak count must be in [1, 4]");
  const Scaled s = scale(spectrum);
  const double width = options.fwhm_guess ? *options.fwhm_guess : estimate_fwhm(s, percentile(s.y, 0.1));
  RawFit previous;
  for (int k = 1; k <= order; ++k) previous = fit_order(s, k, &previous, width, options);
  if (!previous.ok) fail(ErrorKind::fit_failure, std::to_string(order) + "-peak fit did not converge");
  PeakFit out = to_peak_fit(s, previous, order, options.shape);
  out.bic_by_order.assign(1, out.bic);
  return out;
}

PeakFit fit_peaks(const IntensityCurve& spectrum, int max_peaks, const PeakFitOptions& options)
{
  check_curve(spectrum);
  if (max_peaks < 1 || max_peaks > 4) fail(ErrorKind::invalid_argument, "max_peaks must be in [1, 4]");
  const Scaled s = scale(spectrum);
  const double width = options.fwhm_guess ? *options.fwhm_guess : estimate_fwhm(s, percentile(s.y, 0.1));

  std::optional<PeakFit> best;
  std::vector<double> bics;
  RawFit previous;
  std::string diagnostics;
  for (int order = 1; order <= max_peaks; ++order) {
    RawFit raw = fit_order(s, order, &previous, width, options);
    if (!raw.ok) {
      bics.push_back(std::numeric_limits<double>::quiet_NaN());
      diagnostics += " order " + std::to_string(order) + " failed;";
      continue;
    }
    PeakFit candidate = to_peak_fit(s, raw, order, options.shape);
    bics.push_back(candidate.bic);
    if (!best || candidate.bic < best->bic) best = candidate;
    previous = std::move(raw);
  }
  if (!best) fail(ErrorKind::fit_failure, "no peak model converged:" + diagnostics);
  best->bic_by_order = std::move(bics);
  return *best;
}

bool LineObservation::is_polarized() const
{
  if (visibility) return *visibility >= kPolarizedVisibility;
  return polarized.value_or(false);
}

std::string AssignmentHypothesis::to_string() const
{
  std::string out;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    if (i) out += '|';
    out += partition[i].to_string();
  }
  return out;
}

std::vector<SiteSet> canonical_partition(const std::vector<SiteSet>& partition)
{
  std::vector<SiteSet> image;
  image.reserve(partition.size());
  for (const auto& c : partition) image.push_back(c.inverted());
  return std::min(partition, image);
}

AssignmentResult enumerate_assignments(const std::vector<LineObservation>& lines, double r,
                                       const AssignmentOptions& options)
{
  const int k = static_cast<int>(lines.size());
  if (k < 1 || k > 4) fail(ErrorKind::invalid_argument, "line count must be in [1, 4]");
  if (!(r > 0)) fail(ErrorKind::invalid_argument, "collection ratio must be positive");

  const auto geometry = dipole::dipoles_for_axis(options.axis);
  const auto collection = dipole::CollectionModel::with_ratio(r);
  const double main_axis = geometry.main_axis_deg();

  std::set<std::vector<SiteSet>> seen;
  AssignmentResult result;
  std::vector<int> label(kSiteCount, 0);
  int total = 1;
  for (int i = 0; i < kSiteCount; ++i) total *= k;

  for (int code = 0; code < total; ++code) {
    int c = code;
    for (int i = 0; i < kSiteCount; ++i, c /= k) label[i] = c % k;
    std::vector<SiteSet> partition(k);
    for (int i = 0; i < kSiteCount; ++i) partition[label[i]].insert(i);
    if (std::any_of(partition.begin(), partition.end(), [](SiteSet s) { return s.empty(); })) continue;
    if (!options.allow_pair_splitting) {
      const std::set<SiteSet> classes(partition.begin(), partition.end());
      if (!std::all_of(partition.begin(), partition.end(),
                       [&](SiteSet s) { return classes.contains(s.inverted()); }))
        continue;
    }
    if (!seen.insert(canonical_partition(partition)).second) continue;

    AssignmentHypothesis h;
    h.partition = canonical_partition(partition);
    double strongest = 0;
    for (const auto& cls : h.partition) {
      SiteValues w{};
      for (int n : cls.sites()) w[n] = 1.0;
      const auto curve = dipole::site_curve(geometry, w, collection);
      LinePrediction p;
      p.visibility = curve.visibility();
      p.polarized = p.visibility >= kPolarizedVisibility;
      p.angle_deg = units::angle_difference_deg(curve.orientation_deg(), main_axis);
      p.relative_intensity = options.ratio_along_main_axis ? curve(main_axis) : 2.0 * curve.mean;
      strongest = std::max(strongest, p.relative_intensity);
      h.predictions.push_back(p);
    }
    for (auto& p : h.predictions) p.relative_intensity /= strongest;

    for (int i = 0; i < k; ++i) {
      const auto& obs = lines[i];
      const auto& pred = h.predictions[i];
      if (obs.visibility)
        h.z.push_back((*obs.visibility - pred.visibility) / options.visibility_sigma);
      else if (obs.polarized)
        h.z.push_back(*obs.polarized == pred.polarized ? 0.0 : 10.0 * options.consistency_z);
      if (obs.is_polarized() && pred.polarized && obs.angle_deg)
        h.z.push_back(units::angle_difference_deg(*obs.angle_deg, pred.angle_deg) / options.angle_sigma_deg);
      if (obs.ratio) {
        const double ref = std::max(pred.relative_intensity, 1e-3);
        h.z.push_back((*obs.ratio - pred.relative_intensity) / (options.ratio_relative_sigma * ref));
      }
    }
    for (double z : h.z) h.cost += z * z;
    h.score = 1.0 / (1.0 + h.cost);
    h.interpretation = k == 1 ? "delocalized-or-uniform-hopping" : "uniform-hopping-over-split-sites";
    result.hypotheses.push_back(std::move(h));
  }
  result.enumerated = result.hypotheses.size();

  const auto consistent = [&](const AssignmentHypothesis& h) {
    return std::all_of(h.z.begin(), h.z.end(), [&](double z) { return std::abs(z) <= options.consistency_z; });
  };
  std::erase_if(result.hypotheses, [&](const AssignmentHypothesis& h) { return !consistent(h); });
  if (result.hypotheses.empty()) {
    result.explanation = "none of " + std::to_string(result.enumerated) +
                         " site partitions reproduces the observed polarizations and intensity ratios within " +
                         std::to_string(options.consistency_z) + " sigma";
    return result;
  }
  std::stable_sort(result.hypotheses.begin(), result.hypotheses.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  const double cut = options.keep_fraction * result.hypotheses.front().score;
  std::erase_if(result.hypotheses, [cut](const AssignmentHypothesis& h) { return h.score < cut; });
  result.explanation = std::to_string(result.hypotheses.size()) + " of " + std::to_string(result.enumerated) +
                       " site partitions consistent";
  return result;
}

const char* to_string(PatternClass pattern)
{
  switch (pattern) {
    case PatternClass::singlet: return "singlet";
    case PatternClass::doublet: return "doublet";
    case PatternClass::triplet: return "triplet";
    case PatternClass::quadruplet: return "quadruplet";
  }
  return "?";
}

namespace {

// Line amplitudes at fixed centres and widths: linear least squares on
// [1, profile_1, ..., profile_k].
std::vector<double> line_amplitudes(const IntensityCurve& curve, const PeakFit& shape_fit)
{
  const auto n = static_cast<Eigen::Index>(curve.size());
  const auto k = static_cast<Eigen::Index>(shape_fit.peaks.size());
  Eigen::MatrixXd design(n, k + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto& p = shape_fit.peaks[j];
      design(i, j + 1) = profile(shape_fit.shape, curve.energy[i] - p.center, p.fwhm).value;
    }
    y(i) = curve.intensity[i];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
  std::vector<double> out(k);
  for (Eigen::Index j = 0; j < k; ++j) out[j] = std::max(coef(j + 1), 0.0);
  return out;
}

}  // namespace

DefectReport classify_defect(const DefectMeasurement& measurement, const ClassifyOptions& options)
{
  IntensityCurve spectrum = measurement.spectrum;
  if (spectrum.size() == 0) {
    if (measurement.polarized.empty()) fail(ErrorKind::invalid_argument, "no spectrum to classify");
    spectrum = measurement.polarized.front().curve;
    for (std::size_t s = 1; s < measurement.polarized.size(); ++s) {
      const auto& c = measurement.polarized[s].curve;
      if (c.energy != spectrum.energy) fail(ErrorKind::invalid_argument, "polarized spectra use different grids");
      for (std::size_t i = 0; i < c.size(); ++i) spectrum.intensity[i] += c.intensity[i];
    }
  }

  DefectReport report;
  report.peak_fit = fit_peaks(spectrum, options.max_peaks, options.peaks);
  const int k = static_cast<int>(report.peak_fit.peaks.size());
  report.pattern = static_cast<PatternClass>(k - 1);
  report.diagram = dipole::fit_diagram(measurement.diagram);

  // Lines from highest to lowest energy.
  for (int j = k - 1; j >= 0; --j) {
    const auto& p = report.peak_fit.peaks[j];
    LineReport line;
    line.energy = p.center;
    line.fwhm = p.fwhm;
    line.area = p.area;
    report.lines.push_back(line);
  }
  for (int j = 0; j + 1 < k; ++j) report.splittings.push_back(report.lines[j].energy - report.lines[j + 1].energy);

  std::vector<dipole::PolarizationDiagram> per_line(k);
  if (measurement.polarized.size() >= 8) {
    for (const auto& ps : measurement.polarized) {
      const auto amps = line_amplitudes(ps.curve, report.peak_fit);
      for (int j = 0; j < k; ++j) {
        per_line[k - 1 - j].angle_deg.push_back(ps.angle_deg);
        per_line[k - 1 - j].intensity.push_back(amps[j]);
      }
    }
    for (int j = 0; j < k; ++j) report.lines[j].diagram = dipole::fit_diagram(per_line[j]);
  } else if (k == 1) {
    report.lines[0].diagram = report.diagram;
  }

  // Main axis: the whole-ZPL diagram, else the most polarized line.
  std::optional<double> main_axis;
  if (report.diagram.orientation_defined && report.diagram.visibility > 0.05)
    main_axis = report.diagram.orientation_deg;
  double best_v = -1;
  for (const auto& line : report.lines)
    if (!main_axis && line.diagram && line.diagram->orientation_defined && line.diagram->visibility > best_v) {
      best_v = line.diagram->visibility;
      main_axis = line.diagram->orientation_deg;
    }

  AssignmentOptions assignment = options.assignments;
  const bool per_line_polarization = std::all_of(report.lines.begin(), report.lines.end(),
                                                 [](const LineReport& l) { return l.diagram.has_value(); });
  assignment.ratio_along_main_axis = per_line_polarization && main_axis.has_value();

  std::vector<double> intensity(k);
  for (int j = 0; j < k; ++j) {
    const auto& line = report.lines[j];
    if (assignment.ratio_along_main_axis) {
      const auto& d = *line.diagram;
      const double c = d.orientation_defined ? std::cos(units::deg_to_rad(*main_axis - d.orientation_deg)) : 0.0;
      intensity[j] = d.amplitude * (d.visibility * c * c + 1.0 - d.visibility);
    } else {
      intensity[j] = line.area;
    }
  }
  const double strongest = *std::max_element(intensity.begin(), intensity.end());

  std::vector<LineObservation> observations;
  for (int j = 0; j < k; ++j) {
    auto& line = report.lines[j];
    LineObservation obs;
    if (line.diagram) {
      obs.visibility = line.diagram->visibility;
      if (main_axis && line.diagram->orientation_defined)
        obs.angle_deg = units::angle_difference_deg(line.diagram->orientation_deg, *main_axis);
    }
    if (strongest > 0) obs.ratio = intensity[j] / strongest;
    line.observation = obs;
    observations.push_back(obs);
  }
  report.assignments = enumerate_assignments(observations, options.r, assignment);
  return report;
}

}  // namespace gcenter::fitting
