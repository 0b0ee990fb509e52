#include "cli.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "gcenter/dipole.hpp"
#include "gcenter/fitting.hpp"
#include "gcenter/io.hpp"
#include "gcenter/presets.hpp"
#include "gcenter/ring.hpp"
#include "gcenter/roulette.hpp"
#include "gcenter/rotor.hpp"
#include "gcenter/spectra.hpp"
#include "gcenter/strain.hpp"
#include "gcenter/svg.hpp"
#include "gcenter/units.hpp"
#include "gcenter/version.hpp"

namespace gcenter::cli {

using io::format_number;
using io::json;

int exit_code(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::malformed_input: return 3;
    case ErrorKind::schema: return 4;
    case ErrorKind::io: return 6;
    default: return 5;
  }
}

namespace {

std::string default_out_dir()
{
  const char* env = std::getenv("GCENTER_OUT_DIR");
  return env && *env ? env : "gcenter-out";
}

SiteValues parse_site_values(const std::string& text, const char* what)
{
  SiteValues v{};
  std::size_t start = 0;
  int n = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    const std::string cell = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double x = 0;
    if (n >= kSiteCount || !io::parse_number(cell, x))
      fail(ErrorKind::invalid_argument, std::string(what) + " must be six comma-separated numbers");
    v[n++] = x;
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (n != kSiteCount) fail(ErrorKind::invalid_argument, std::string(what) + " must be six comma-separated numbers");
  return v;
}

std::optional<double> parse_polarizer(const std::string& text, const dipole::DipoleGeometry& geometry)
{
  if (text == "none") return std::nullopt;
  if (text == "main") return geometry.main_axis_deg();
  if (text == "perp") return units::wrap_half_turn_deg(geometry.main_axis_deg() + 90.0);
  double v = 0;
  if (!io::parse_number(text, v)) fail(ErrorKind::invalid_argument, "polarizer must be none, main, perp or degrees");
  return v;
}

std::vector<std::string> row(std::initializer_list<double> values)
{
  std::vector<std::string> out;
  for (double v : values) out.push_back(format_number(v));
  return out;
}

struct Collection {
  double r = 0.0;
  double depth = 30.0;

  void add(CLI::App* app)
  {
    app->add_option("--r", r, "Collection ratio r; 0 takes it from --depth");
    app->add_option("--depth", depth, "Emitter depth in the silicon layer (nm)");
  }
  dipole::CollectionModel model() const
  {
    return r > 0 ? dipole::CollectionModel::with_ratio(r) : dipole::collection_ratio(depth);
  }
};

// Site energies from a preset, optionally overridden by explicit offsets.
struct SiteModel {
  std::string preset = "g0";
  std::string offsets;
  std::string axis;
  double zpl_nm = 1278.6;

  void add(CLI::App* app)
  {
    app->add_option("--preset", preset, "Site-energy preset: unperturbed, g0 or g1");
    app->add_option("--offsets", offsets, "Six es-gs site offsets in meV, overriding the preset");
    app->add_option("--axis", axis, "Defect <111> axis, overriding the preset");
    app->add_option("--zpl-nm", zpl_nm, "Zero-phonon line centre (nm)");
  }
  presets::DefectPreset resolve() const
  {
    auto p = presets::by_name(preset);
    if (!offsets.empty()) p.offsets = parse_site_values(offsets, "--offsets");
    if (!axis.empty()) p.axis = Miller::parse(axis);
    return p;
  }
  spectra::SiteEnergies energies() const
  {
    return presets::site_energies(resolve(), spectra::nm_to_meV(zpl_nm));
  }
};

struct Common {
  std::string out_dir = default_out_dir();
  bool no_svg = false;

  void add(CLI::App* app)
  {
    app->add_option("--out-dir", out_dir, "Output directory (default $GCENTER_OUT_DIR or gcenter-out)");
    app->add_flag("--no-svg", no_svg, "Skip SVG figures");
  }
};

class Command {
 public:
  virtual ~Command() = default;
  virtual void add(CLI::App* app) = 0;
  virtual void run(io::ArtifactWriter& writer, bool svg, std::ostream& out) = 0;
};

class QuartetCommand : public Command {
 public:
  void add(CLI::App* app) override
  {
    app->add_option("--delta-es-ueV", delta_es_, "Excited-state tunneling energy (ueV)");
    app->add_option("--delta-gs-ueV", delta_gs_, "Ground-state tunneling energy (ueV)");
    app->add_option("--zpl-nm", zpl_nm_, "Zero-phonon line centre (nm)");
  }

  void run(io::ArtifactWriter& writer, bool svg, std::ostream& out) override
  {
    const auto gs = rotor::RotorModel::ground_state(units::ueV_to_meV(delta_gs_));
    const auto es = rotor::RotorModel::excited_state(units::ueV_to_meV(delta_es_));
    const auto spectrum = rotor::quartet_spectrum(gs, es, spectra::nm_to_meV(zpl_nm_));

    double min_weight = spectrum.lines.front().weight();
    for (const auto& l : spectrum.lines) min_weight = std::min(min_weight, l.weight());
    const double split = es.delta0 - gs.delta0;

    std::vector<std::vector<std::string>> rows;
    double previous = spectrum.lines.front().offset;
    for (std::size_t i = 0; i < spectrum.lines.size(); ++i) {
      const auto& l = spectrum.lines[i];
      std::string m = "0-5";
      if (split != 0) {
        static const char* labels[] = {"0", "1|5", "2|4", "3"};
        int best = 0;
        for (int k = 1; k < 4; ++k)
          if (std::abs(rotor::eigen_energy(es, k) - rotor::eigen_energy(gs, k) - l.offset) <
              std::abs(rotor::eigen_energy(es, best) - rotor::eigen_energy(gs, best) - l.offset))
            best = k;
        m = labels[best];
      }
      auto r = row({spectrum.energy(l), spectra::meV_to_nm(spectrum.energy(l)), units::meV_to_ueV(l.offset),
                    units::meV_to_GHz(l.offset), units::meV_to_ueV(l.offset - previous), l.weight(),
                    l.weight() / min_weight});
      r.insert(r.begin(), std::to_string(i));
      r.push_back(m);
      rows.push_back(std::move(r));
      previous = l.offset;
    }
    writer.write("quartet.csv", io::to_csv({"line", "energy_meV", "wavelength_nm", "offset_ueV", "offset_GHz",
                                            "splitting_ueV", "weight", "relative_intensity", "m"},
                                           rows));
    json j = io::to_json(spectrum);
    j["delta0_gs_ueV"] = delta_gs_;
    j["delta0_es_ueV"] = delta_es_;
    j["Delta_ueV"] = std::abs(delta_es_ - delta_gs_);
    writer.write("quartet.json", j.dump(2) + "\n");

    if (svg) {
      svg::Series s{"lines", {}, {}, true};
      for (const auto& l : spectrum.lines) {
        s.x.push_back(units::meV_to_ueV(l.offset));
        s.y.push_back(l.weight() / min_weight);
      }
      writer.write("quartet.svg", svg::render({"Quartet fine structure", "offset from ZPL (ueV)",
                                                "relative intensity", {s}}));
    }
    out << "quartet: " << spectrum.lines.size() << " lines, Delta = " << format_number(std::abs(delta_es_ - delta_gs_))
        << " ueV\n";
  }

 private:
  double delta_es_ = 2.5;
  double delta_gs_ = 0.0;
  double zpl_nm_ = 1278.6;
};

class PesCommand : public Command {
 public:
  void add(CLI::App* app) override
  {
    app->add_option("--barrier", barrier_, "Sixfold barrier height (meV)");
    app->add_option("--delta0-ueV", delta0_, "Symmetric tunneling energy used to calibrate B (ueV)");
    app->add_option("--kinetic-scale", kinetic_, "Kinetic scale B (meV); 0 calibrates it");
    app->add_option("--offsets", offsets_, "Six site offsets (meV)");
    app->add_option("--strain-dir", strain_dir_, "Uniaxial strain direction; overrides --offsets");
    app->add_option("--strain", strain_, "Strain magnitude");
    app->add_option("--defect-axis", defect_axis_, "Defect <111> axis for --strain-dir");
    app->add_option("--n-grid", n_grid_, "Angular grid size");
    app->add_option("--levels", levels_, "Number of levels");
    app->add_option("--threshold-ueV", threshold_, "Quasi-degeneracy threshold (ueV); 0 uses 10 delta0");
  }

  void run(io::ArtifactWriter& writer, bool svg, std::ostream& out) override
  {
    SiteValues offsets = parse_site_values(offsets_, "--offsets");
    if (!strain_dir_.empty())
      offsets = strain::site_offsets_for_strain(strain::StrainSpec::along(Miller::parse(strain_dir_), strain_),
                                                Miller::parse(defect_axis_));
    const double b = kinetic_ > 0 ? kinetic_ : ring::calibrate_kinetic_scale(barrier_, units::ueV_to_meV(delta0_), n_grid_);
    const auto potential = ring::build_potential(barrier_, offsets, n_grid_);
    const auto spectrum = ring::solve_ring(potential, b, levels_);
    const auto report = threshold_ > 0 ? ring::localization_report(spectrum, units::ueV_to_meV(threshold_))
                                       : ring::localization_report(spectrum);

    std::vector<std::string> header{"theta_rad", "theta_deg", "potential_meV"};
    for (int k = 0; k < levels_; ++k) header.push_back("psi_" + std::to_string(k));
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < potential.n_grid; ++i) {
      auto r = row({potential.theta[i], units::rad_to_deg(potential.theta[i]), potential.value[i]});
      for (const auto& l : spectrum.levels) r.push_back(format_number(l.wavefunction[i]));
      rows.push_back(std::move(r));
    }
    writer.write("pes_potential.csv", io::to_csv(header, rows));

    rows.clear();
    for (std::size_t k = 0; k < report.levels.size(); ++k) {
      const auto& l = report.levels[k];
      std::vector<std::string> r{std::to_string(k), format_number(l.energy),
                                 format_number(l.energy - report.levels.front().energy), std::to_string(l.subset),
                                 ring::to_string(l.flag), format_number(l.ipr)};
      for (double m : l.mass) r.push_back(format_number(m));
      rows.push_back(std::move(r));
    }
    writer.write("pes_levels.csv", io::to_csv({"level", "energy_meV", "gap_meV", "subset", "flag", "ipr", "mass_0",
                                               "mass_1", "mass_2", "mass_3", "mass_4", "mass_5"},
                                              rows));

    json j = io::to_json(spectrum);
    j["localization"] = io::to_json(report);
    j["kinetic_scale_calibrated"] = kinetic_ <= 0;
    j["symmetric_delta0_ueV"] = units::meV_to_ueV(ring::symmetric_delta0(barrier_, b, n_grid_));
    writer.write("pes.json", j.dump(2) + "\n");

    if (svg) {
      svg::Series v{"V(theta)", {}, potential.value, false};
      for (double t : potential.theta) v.x.push_back(units::rad_to_deg(t));
      writer.write("pes.svg", svg::render({"Ring potential", "theta (deg)", "energy (meV)", {v}}));
    }
    out << "pes: B = " << format_number(b) << " meV, " << report.subsets.size() << " level subset(s)\n";
  }

 private:
  double barrier_ = 33.0;
  double delta0_ = 2.5;
  double kinetic_ = 0.0;
  std::string offsets_ = "0,0,0,0,0,0";
  std::string strain_dir_;
  double strain_ = 0.001;
  std::string defect_axis_ = "111";
  int n_grid_ = ring::kDefaultGrid;
  int levels_ = kSiteCount;
  double threshold_ = 0.0;
};

class DiagramCommand : public Command {
 public:
  void add(CLI::App* app) override
  {
    app->add_option("--sites", sites_, "Active sites: all or a list such as 0,3");
    app->add_option("--occupation", occupation_, "Six site weights (default 1 on active sites)");
    app->add_option("--axis", axis_, "Defect <111> axis");
    app->add_option("--angle-step", step_, "Polarizer step (deg)");
    app->add_option("--noise", noise_, "Relative Gaussian noise on each sample");
    app->add_option("--seed", seed_, "Noise seed");
    collection_.add(app);
  }

  void run(io::ArtifactWriter& writer, bool svg, std::ostream& out) override
  {
    const SiteSet active = SiteSet::parse(sites_);
    SiteValues occ{};
    if (occupation_.empty()) {
      for (int n : active.sites()) occ[n] = 1.0;
    } else {
      occ = parse_site_values(occupation_, "--occupation");
    }
    if (!(step_ > 0)) fail(ErrorKind::invalid_argument, "--angle-step must be positive");
    std::vector<double> angles;
    for (double a = 0; a < 360.0 - 1e-9; a += step_) angles.push_back(a);

    const auto geometry = dipole::dipoles_for_axis(Miller::parse(axis_));
    const auto collection = collection_.model();
    auto diagram = dipole::diagram_from_sites(geometry, active, occ, collection, angles);
    if (noise_ > 0) {
      std::mt19937_64 rng(seed_);
      std::normal_distribution<double> n01;
      for (double& v : diagram.intensity) v = std::max(0.0, v * (1.0 + noise_ * n01(rng)));
    }
    diagram.fit = dipole::fit_diagram(diagram);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < angles.size(); ++i) rows.push_back(row({diagram.angle_deg[i], diagram.intensity[i]}));
    writer.write("diagram.csv", io::to_csv({"angle_deg", "intensity"}, rows));
    json j = io::to_json(diagram);
    j["collection"] = io::to_json(collection);
    j["axis"] = geometry.axis.to_string();
    j["sites"] = active.to_string();
    j["dipole_angles_deg"] = geometry.projected_angle_deg;
    j["analytic_visibility"] = dipole::site_curve(geometry, occ, collection).visibility();
    writer.write("diagram.json", j.dump(2) + "\n");

    if (svg) {
      svg::Series s{"intensity", diagram.angle_deg, diagram.intensity, false};
      writer.write("diagram.svg", svg::render({"Polarization diagram", "polarizer angle (deg)", "intensity", {s}}));
    }
    out << "diagram: V = " << io::format_fixed(diagram.fit->visibility, 4) << ", phi = "
        << io::format_fixed(diagram.fit->orientation_deg, 2) << " deg\n";
  }

 private:
  std::string sites_ = "all";
  std::string occupation_;
  std::string axis_ = "111";
  double step_ = 10.0;
  double noise_ = 0.0;
  std::uint64_t seed_ = 1;
  Collection collection_;
};

class SpectrumCommand : public Command {
 public:
  void add(CLI::App* app) override
  {
    app->add_option("--mode", mode_, "localized (site-resolved lines) or delocalized (quartet)")
        ->check(CLI::IsMember({"localized", "delocalized"}));
    sites_.add(app);
    app->add_option("--delta-es-ueV", delta_es_, "Excited-state tunneling energy, delocalized mode (ueV)");
    app->add_option("--delta-gs-ueV", delta_gs_, "Ground-state tunneling energy, delocalized mode (ueV)");
    app->add_option("--polarizer", polarizer_, "none, main, perp or an angle in degrees");
    app->add_option("--resolution", resolution_, "Gaussian FWHM (meV)");
    app->add_option("--tolerance", tolerance_, "Line grouping tolerance (meV)");
    collection_.add(app);
  }

  void run(io::ArtifactWriter& writer, bool svg, std::ostream& out) override
  {
    LineSpectrum lines;
    const auto model = sites_.resolve();
    if (mode_ == "delocalized") {
      lines = rotor::quartet_spectrum(rotor::RotorModel::ground_state(units::ueV_to_meV(delta_gs_)),
                                      rotor::RotorModel::excited_state(units::ueV_to_meV(delta_es_)),
                                      spectra::nm_to_meV(sites_.zpl_nm));
      lines.axis = model.axis;
    } else {
      lines = spectra::zpl_lines(sites_.energies(), tolerance_, model.axis);
    }
    lines.resolution = resolution_;
    const auto geometry = dipole::dipoles_for_axis(model.axis);
    const auto polarizer = parse_polarizer(polarizer_, geometry);
    const auto curve = spectra::polarized_spectrum(lines, polarizer, collection_.model());

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < curve.size(); ++i)
      rows.push_back(row({curve.energy[i], spectra::meV_to_nm(curve.energy[i]), curve.intensity[i]}));
    writer.write("spectrum.csv", io::to_csv({"energy_meV", "wavelength_nm", "intensity"}, rows));

    json j = io::to_json(lines);
    j["mode"] = mode_;
    j["polarizer_deg"] = polarizer ? json(*polarizer) : json("none");
    j["collection"] = io::to_json(collection_.model());
    for (std::size_t i = 0; i < lines.lines.size(); ++i)
      j["lines"][i]["polarized_intensity"] = spectra::line_intensity(lines.lines[i], geometry, polarizer,
                                                                     collection_.model());
    writer.write("lines.json", j.dump(2) + "\n");

    if (svg) {
      svg::Series s{"intensity", curve.energy, curve.intensity, false};
      writer.write("spectrum.svg", svg::render({"ZPL spectrum", "energy (meV)", "intensity", {s}}));
    }
    out << "spectrum: " << lines.lines.size() << " line(s), " << curve.size() << " samples\n";
  }

 private:
  std::string mode_ = "localized";
  SiteModel sites_;
  double delta_es_ = 2.5;
  double delta_gs_ = 0.0;
  std::string polarizer_ = "none";
  double resolution_ = kDefaultResolution;
  double tolerance_ = kDefaultGroupingTolerance;
  Collection collection_;
};

class EnsembleCommand : public Command {
 public:
  void add(CLI::App* app) override
  {
    app->add_option("--strain-dir", direction_, "Uniaxial strain direction (Miller indices)");
    app->add_option("--strain", magnitude_, "Signed strain magnitude (0.001 = 0.1 %)");
    app->add_option("--tolerance", tolerance_, "Lines closer than this merge (meV)");
    app->add_option("--zpl-nm", zpl_nm_, "Unstrained zero-phonon line (nm)");
    app->add_option("--calibration", calibration_, "Strain response JSON");
    app->add_flag("--allow-nonlinear", allow_nonlinear_, "Permit strains beyond the linear-regime guard");
  }

  void run(io::ArtifactWriter& writer, bool svg, std::ostream& out) override
  {
    const auto response = calibration_.empty()
                              ? strain::StrainResponse::defaults()
                              : io::strain_response_from_json(parse_json(io::read_file(calibration_)));
    const auto spec = strain::StrainSpec::along(Miller::parse(direction_), magnitude_);
    const auto report = strain::ensemble_lines(spec, response, tolerance_, {allow_nonlinear_});
    const double zpl = spectra::nm_to_meV(zpl_nm_);

    std::vector<std::vector<std::string>> rows;
    for (const auto& o : report.orientations)
      for (double line : o.lines)
        rows.push_back({o.defect_axis.to_string(), strain::to_string(o.strain_class), format_number(zpl + line),
                        format_number(line)});
    writer.write("ensemble.csv", io::to_csv({"orientation", "strain_class", "line_energy_meV", "offset_meV"}, rows));
    json j = io::to_json(report);
    j["strain_direction"] = Miller::parse(direction_).to_string();
    j["strain"] = magnitude_;
    j["zpl_meV"] = zpl;
    j["response"] = io::to_json(response);
    writer.write("ensemble.json", j.dump(2) + "\n");

    if (svg) {
      svg::Series s{"distinct lines", report.lines, std::vector<double>(report.lines.size(), 1.0), true};
      writer.write("ensemble.svg", svg::render({"Ensemble lines under strain", "offset (meV)", "line", {s}}));
    }
    out << "ensemble: " << report.lines.size() << " distinct line(s)\n";
  }

 private:
  static json parse_json(const std::string& text)
  {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      fail(ErrorKind::malformed_input, std::string("calibration file: ") + e.what());
    }
  }

  std::string direction_ = "110";
  double magnitude_ = 0.001;
  double tolerance_ = 0.05;
  double zpl_nm_ = 1278.6;
  std::string calibration_;
  bool allow_nonlinear_ = false;
};

struct Rates {
  double excitation = 0.1;
  double radiative = 0.2;
  std::uint64_t seed = 1;

  void add(CLI::App* app)
  {
    app->add_option("--excitation-rate", excitation, "Excitation rate (1/ns)");
    app->add_option("--radiative-rate", radiative, "Radiative rate (1/ns)");
    app->add_option("--seed", seed, "Random seed");
  }
};

class RouletteCommand : public Command {
 public:
  void add(CLI::App* app) override
  {
    sites_.add(app);
    rates_.add(app);
    app->add_option("--photons", photons_, "Photons to simulate");
    app->add_option("--emitters", emitters_, "Independent emitters");
    app->add_option("--hop", hop_, "uniform or six site probabilities");
    app->add_option("--polarizer", polarizer_, "none, main, perp or an angle in degrees");
    app->add_option("--resolution", resolution_, "Gaussian FWHM (meV)");
    app->add_option("--temperature", temperature_, "Temperature for the hopping-regime check (K)");
    app->add_option("--barrier-gs", barrier_gs_, "Ground-state barrier (meV)");
    app->add_option("--barrier-es", barrier_es_, "Excited-state barrier (meV)");
    app->add_flag("--write-stream", write_stream_, "Also write every photon to photons.csv");
    collection_.add(app);
  }

  void run(io::ArtifactWriter& writer, bool svg, std::ostream& out) override
  {
    roulette::EmitterConfig config;
    const auto model = sites_.resolve();
    config.site_energies = sites_.energies();
    config.axis = model.axis;
    config.excitation_rate = rates_.excitation;
    config.radiative_rate = rates_.radiative;
    config.seed = rates_.seed;
    config.n_emitters = emitters_;
    if (hop_ != "uniform") config.hop_distribution = parse_site_values(hop_, "--hop");
    const auto stream = roulette::simulate_photons(config, photons_);
    const auto geometry = dipole::dipoles_for_axis(model.axis);
    const auto polarizer = parse_polarizer(polarizer_, geometry);
    const auto collection = collection_.model();
    const auto acc = roulette::accumulate_spectrum(stream, polarizer, collection, geometry, resolution_, rates_.seed + 1);

    const auto counts = roulette::site_counts(stream);
    const auto chi = roulette::chi_square_occupation(counts, config.hop_distribution);
    std::vector<std::vector<std::string>> rows;
    for (int s = 0; s < kSiteCount; ++s)
      rows.push_back({std::to_string(s), std::to_string(counts[s]),
                      format_number(static_cast<double>(counts[s]) / static_cast<double>(stream.size())),
                      format_number(config.hop_distribution[s])});
    writer.write("occupation.csv", io::to_csv({"site", "count", "frequency", "expected"}, rows));

    rows.clear();
    for (std::size_t i = 0; i < acc.curve.size(); ++i)
      rows.push_back(row({acc.curve.energy[i], spectra::meV_to_nm(acc.curve.energy[i]), acc.curve.intensity[i]}));
    writer.write("spectrum.csv", io::to_csv({"energy_meV", "wavelength_nm", "intensity"}, rows));

    if (write_stream_) {
      rows.clear();
      for (const auto& p : stream)
        rows.push_back({format_number(p.time), std::to_string(p.site), format_number(p.energy),
                        format_number(p.angle_deg), std::to_string(p.emitter)});
      writer.write("photons.csv", io::to_csv({"t_ns", "site", "energy_meV", "angle_deg", "emitter"}, rows));
    }

    const auto regime = roulette::hopping_regime_check(temperature_, barrier_gs_, barrier_es_);
    const double span = stream.back().time - stream.front().time;
    json j{{"photons", stream.size()},
           {"accepted", acc.accepted},
           {"mean_photon_rate_per_ns", static_cast<double>(stream.size()) / stream.back().time},
           {"expected_photon_rate_per_ns", config.photon_rate() * config.n_emitters},
           {"span_ns", span},
           {"chi_square", {{"statistic", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}}},
           {"regime",
            {{"classification", roulette::to_string(regime.regime)},
             {"kT_meV", regime.thermal_energy},
             {"threshold_meV", regime.threshold}}},
           {"polarizer_deg", polarizer ? json(*polarizer) : json("none")},
           {"collection", io::to_json(collection)}};
    writer.write("roulette.json", j.dump(2) + "\n");

    if (svg) {
      svg::Series s{"accumulated", acc.curve.energy, acc.curve.intensity, false};
      writer.write("roulette.svg", svg::render({"Accumulated spectrum", "energy (meV)", "counts / meV", {s}}));
    }
    out << "roulette: " << stream.size() << " photons, chi-square p = " << io::format_fixed(chi.p_value, 4) << ", "
        << roulette::to_string(regime.regime) << "\n";
  }

 private:
  SiteModel sites_;
  Rates rates_;
  std::size_t photons_ = 100000;
  int emitters_ = 1;
  std::string hop_ = "uniform";
  std::string polarizer_ = "none";
  double resolution_ = kDefaultResolution;
  double temperature_ = 30.0;
  double barrier_gs_ = 89.0;
  double barrier_es_ = 33.0;
  bool write_stream_ = false;
  Collection collection_;
};

class G2Command : public Command {
 public:
  void add(CLI::App* app) override
  {
    rates_.add(app);
    app->add_option("--emitters", emitters_, "Independent emitters");
    app->add_option("--photons", photons_, "Photons to simulate");
    app->add_option("--bin-width", bin_width_, "Histogram bin width (ns)");
    app->add_option("--max-delay", max_delay_, "Largest delay (ns)");
    app->add_flag("--surrogate", surrogate_, "Replace arrival times by uniform random ones");
  }

  void run(io::ArtifactWriter& writer, bool svg, std::ostream& out) override
  {
    roulette::EmitterConfig config;
    config.excitation_rate = rates_.excitation;
    config.radiative_rate = rates_.radiative;
    config.seed = rates_.seed;
    config.n_emitters = emitters_;
    config.site_energies = presets::site_energies(presets::unperturbed());
    auto stream = roulette::simulate_photons(config, photons_);
    if (surrogate_) stream = roulette::poisson_surrogate(stream, rates_.seed + 1);
    const auto curve = roulette::g2_histogram(stream, bin_width_, max_delay_);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < curve.delay.size(); ++i) {
      auto r = row({curve.delay[i], curve.g2[i]});
      r.push_back(std::to_string(curve.coincidences[i]));
      rows.push_back(std::move(r));
    }
    writer.write("g2.csv", io::to_csv({"delay_ns", "g2", "coincidences"}, rows));
    json j = io::to_json(curve);
    j["emitters"] = emitters_;
    j["photons"] = stream.size();
    j["surrogate"] = surrogate_;
    writer.write("g2.json", j.dump(2) + "\n");
    if (svg) {
      svg::Series s{"g2", curve.delay, curve.g2, false};
      writer.write("g2.svg", svg::render({"Photon autocorrelation", "delay (ns)", "g2", {s}}));
    }
    out << "g2: g2(0) = " << io::format_fixed(curve.at_zero(), 4) << "\n";
  }

 private:
  Rates rates_;
  int emitters_ = 1;
  std::size_t photons_ = 200000;
  double bin_width_ = 0.25;
  double max_delay_ = 100.0;
  bool surrogate_ = false;
};

class ClassifyCommand : public Command {
 public:
  void add(CLI::App* app) override
  {
    app->add_option("--spectrum", spectrum_, "Unpolarized spectrum CSV");
    app->add_option("--diagram", diagram_, "Whole-ZPL polarization diagram CSV");
    app->add_option("--polarized", polarized_, "Polarizer-resolved spectrum as ANGLE:PATH (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app->add_option("--simulate", simulate_, "Classify a simulated unperturbed, g0 or g1 defect instead of files");
    app->add_option("--photons", photons_, "Photons for --simulate");
    app->add_option("--seed", seed_, "Seed for --simulate");
    app->add_option("--r", r_, "Collection ratio r");
    app->add_option("--max-peaks", max_peaks_, "Largest peak model tried")->check(CLI::Range(1, 4));
    app->add_flag("--allow-pair-splitting", allow_pair_splitting_, "Allow classes that split an inversion pair");
  }

  void run(io::ArtifactWriter& writer, bool svg, std::ostream& out) override
  {
    fitting::DefectMeasurement m;
    if (!simulate_.empty()) {
      presets::SimulationSettings settings;
      settings.photons = photons_;
      settings.seed = seed_;
      settings.collection = dipole::CollectionModel::with_ratio(r_);
      m = presets::simulate_measurement(presets::by_name(simulate_), settings);
    } else {
      if (diagram_.empty()) fail(ErrorKind::invalid_argument, "classify needs --diagram or --simulate");
      if (!spectrum_.empty()) m.spectrum = expect<IntensityCurve>(io::load_measurement(spectrum_), spectrum_);
      m.diagram = expect<dipole::PolarizationDiagram>(io::load_measurement(diagram_), diagram_);
      for (const auto& item : polarized_) {
        const auto colon = item.find(':');
        double angle = 0;
        if (colon == std::string::npos || !io::parse_number(item.substr(0, colon), angle))
          fail(ErrorKind::invalid_argument, "--polarized expects ANGLE:PATH");
        const std::string path = item.substr(colon + 1);
        m.polarized.push_back({angle, expect<IntensityCurve>(io::load_measurement(path), path)});
      }
    }

    fitting::ClassifyOptions options;
    options.r = r_;
    options.max_peaks = max_peaks_;
    options.assignments.allow_pair_splitting = allow_pair_splitting_;
    const auto report = fitting::classify_defect(m, options);
    json j = io::to_json(report);
    j["r"] = r_;
    j["source"] = simulate_.empty() ? json("files") : json("simulated " + simulate_);
    writer.write("report.json", j.dump(2) + "\n");

    const IntensityCurve& shown = m.spectrum.size() ? m.spectrum : m.polarized.front().curve;
    std::vector<std::vector<std::string>> rows;
    std::vector<double> model;
    for (std::size_t i = 0; i < shown.size(); ++i) {
      model.push_back(report.peak_fit.evaluate(shown.energy[i]));
      rows.push_back(row({shown.energy[i], shown.intensity[i], model.back()}));
    }
    writer.write("fit.csv", io::to_csv({"energy_meV", "intensity", "model"}, rows));
    if (svg) {
      writer.write("fit.svg", svg::render({"Peak fit", "energy (meV)", "intensity",
                                            {{"data", shown.energy, shown.intensity, false},
                                             {"fit", shown.energy, model, false}}}));
    }
    out << "classify: " << fitting::to_string(report.pattern) << ", " << report.assignments.hypotheses.size()
        << " hypothesis(es)";
    for (const auto& h : report.assignments.hypotheses) out << " " << h.to_string();
    out << "\n";
  }

 private:
  template <typename T>
  static T expect(io::Measurement m, const std::string& path)
  {
    if (auto* v = std::get_if<T>(&m)) return std::move(*v);
    fail(ErrorKind::schema, path + ": wrong kind of measurement for this input");
  }

  std::string spectrum_;
  std::string diagram_;
  std::vector<std::string> polarized_;
  std::string simulate_;
  std::size_t photons_ = 1'000'000;
  std::uint64_t seed_ = 1;
  double r_ = 2.1;
  int max_peaks_ = 4;
  bool allow_pair_splitting_ = false;
};

class CalibrateCommand : public Command {
 public:
  void add(CLI::App* app) override
  {
    app->add_option("--barrier", barrier_, "Sixfold barrier height (meV)");
    app->add_option("--delta0-ueV", delta0_, "Target tunneling energy (ueV)");
    app->add_option("--n-grid", n_grid_, "Angular grid size");
  }

  void run(io::ArtifactWriter& writer, bool, std::ostream& out) override
  {
    const double target = units::ueV_to_meV(delta0_);
    const double b = ring::calibrate_kinetic_scale(barrier_, target, n_grid_);
    const double achieved = ring::symmetric_delta0(barrier_, b, n_grid_);
    const auto levels = ring::ring_energies(ring::build_potential(barrier_, uniform_site_values(0.0), n_grid_), b);
    json j{{"barrier_meV", barrier_},
           {"target_delta0_ueV", delta0_},
           {"n_grid", n_grid_},
           {"kinetic_scale_meV", b},
           {"achieved_delta0_ueV", units::meV_to_ueV(achieved)},
           {"relative_error", achieved / target - 1.0},
           {"symmetric_levels_meV", levels}};
    writer.write("calibration.json", j.dump(2) + "\n");
    out << "calibrate: B = " << format_number(b) << " meV\n";
  }

 private:
  double barrier_ = 33.0;
  double delta0_ = 2.5;
  int n_grid_ = ring::kDefaultGrid;
};

// Values of the options of `app`, as JSON, keyed by long name.
json config_of(const CLI::App* app)
{
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "emit-config") continue;
    if (opt->get_expected_max() == 0) {
      j[name] = opt->count() > 0;
      continue;
    }
    const std::string type = opt->get_type_name();
    const bool integral = type.rfind("INT", 0) == 0 || type.rfind("UINT", 0) == 0;
    const bool numeric = integral || type.rfind("FLOAT", 0) == 0;
    auto convert = [&](const std::string& value) -> json {
      double number = 0;
      if (!numeric || !io::parse_number(value, number)) return value;
      if (integral) return static_cast<long long>(number);
      return number;
    };
    if (opt->get_expected_max() > 1) {
      json list = json::array();
      for (const auto& v : opt->results()) list.push_back(convert(v));
      if (!list.empty()) j[name] = list;
      continue;
    }
    std::string value;
    if (opt->count() > 0 && !opt->results().empty())
      value = opt->results().back();
    else
      value = opt->get_default_str();
    if (!value.empty()) j[name] = convert(value);
  }
  return j;
}

std::vector<std::string> config_arguments(const json& config)
{
  std::vector<std::string> out;
  for (const auto& [key, value] : config.items()) {
    if (key == "command") continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back("--" + key);
    } else if (value.is_number()) {
      out.push_back("--" + key);
      out.push_back(value.is_number_integer() ? std::to_string(value.get<long long>()) : format_number(value.get<double>()));
    } else if (value.is_string()) {
      out.push_back("--" + key);
      out.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back("--" + key);
        out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else {
      fail(ErrorKind::schema, "config value for '" + key + "' must be a scalar or list");
    }
  }
  return out;
}

void report_error(std::ostream& err, std::string_view kind, const std::string& message)
{
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
  std::map<std::string, std::unique_ptr<Command>> commands;
  commands["quartet"] = std::make_unique<QuartetCommand>();
  commands["pes"] = std::make_unique<PesCommand>();
  commands["diagram"] = std::make_unique<DiagramCommand>();
  commands["spectrum"] = std::make_unique<SpectrumCommand>();
  commands["ensemble"] = std::make_unique<EnsembleCommand>();
  commands["roulette"] = std::make_unique<RouletteCommand>();
  commands["g2"] = std::make_unique<G2Command>();
  commands["classify"] = std::make_unique<ClassifyCommand>();
  commands["calibrate"] = std::make_unique<CalibrateCommand>();
  static const std::map<std::string, std::string> descriptions{
      {"quartet", "Quartet fine structure of the delocalized rotor"},
      {"pes", "Rotational levels and localization on the ring potential"},
      {"diagram", "Polarization diagram of a set of sites"},
      {"spectrum", "Polarizer-filtered ZPL spectrum"},
      {"ensemble", "Ensemble lines under uniaxial strain"},
      {"roulette", "Stochastic hopping emitter"},
      {"g2", "Photon autocorrelation of simulated emitters"},
      {"classify", "Classify a measured or simulated defect"},
      {"calibrate", "Calibrate the kinetic scale B"}};

  try {
    // --config FILE: its keys become leading options of the subcommand, so
    // explicit flags still win.
    std::optional<json> config;
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
        args.erase(args.begin() + static_cast<long>(i));
      } else {
        continue;
      }
      try {
        config = json::parse(io::read_file(path));
      } catch (const json::exception& e) {
        fail(ErrorKind::malformed_input, path + ": " + e.what());
      }
      break;
    }
    if (config) {
      if (!config->is_object()) fail(ErrorKind::schema, "config must be a JSON object");
      std::string command = config->value("command", "");
      json options = config->contains("config") ? config->at("config") : *config;
      if (!options.is_object()) fail(ErrorKind::schema, "config options must be a JSON object");
      auto sub = std::find_if(args.begin(), args.end(), [&](const std::string& a) { return commands.contains(a); });
      if (sub == args.end()) {
        if (command.empty()) fail(ErrorKind::schema, "config names no command and none was given");
        args.insert(args.begin(), command);
        sub = args.begin();
      }
      const auto injected = config_arguments(options);
      args.insert(sub + 1, injected.begin(), injected.end());
    }

    CLI::App app{"G-center rotational photophysics simulator", "gcenter"};
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    bool emit_config = false;
    std::map<std::string, Common> common;
    for (auto& [name, command] : commands) {
      CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
      command->add(sub);
      common[name].add(sub);
      sub->add_flag("--emit-config", emit_config, "Print the effective configuration as JSON and exit");
      sub->add_option("--config", "JSON configuration (or a manifest.json) supplying defaults");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      report_error(err, "usage", e.what());
      return kExitUsage;
    }

    CLI::App* selected = app.get_subcommands().front();
    const std::string name = selected->get_name();
    json cfg = config_of(selected);
    cfg["command"] = name;
    if (emit_config) {
      out << cfg.dump(2) << "\n";
      return 0;
    }
    const Common& c = common.at(name);
    io::ArtifactWriter writer(c.out_dir);
    commands.at(name)->run(writer, !c.no_svg, out);
    writer.write_manifest(name, cfg);
    return 0;
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "unexpected", e.what());
    return kExitUnexpected;
  }
}

}  // namespace gcenter::cli
