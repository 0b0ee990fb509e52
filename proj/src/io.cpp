#include "gcenter/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include "gcenter/error.hpp"
#include "gcenter/spectra.hpp"
#include "gcenter/units.hpp"
#include "gcenter/version.hpp"

namespace gcenter::io {

std::string format_number(double value)
{
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int digits)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

bool parse_number(std::string_view text, double& value)
{
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

namespace {

std::string trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_row(std::string_view line)
{
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

CsvTable parse_csv(std::string_view text)
{
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto cells = split_row(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      fail(ErrorKind::malformed_input, "line " + std::to_string(line_no) + ": expected " +
                                           std::to_string(table.header.size()) + " cells, found " +
                                           std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
    table.lines.push_back(line_no);
  }
  if (!have_header) fail(ErrorKind::schema, "CSV has no header row");
  return table;
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
{
  std::string out;
  const auto append = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append(header);
  for (const auto& r : rows) append(r);
  return out;
}

std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Measurement load_measurement(const std::filesystem::path& path)
{
  return parse_measurement(read_file(path), path.string());
}

Measurement parse_measurement(std::string_view csv_text, const std::string& source)
{
  const CsvTable table = parse_csv(csv_text);
  std::vector<std::string> names;
  for (const auto& h : table.header) names.push_back(lower(h));
  const auto column = [&](std::initializer_list<const char*> candidates) -> int {
    for (const char* c : candidates) {
      const auto it = std::find(names.begin(), names.end(), c);
      if (it != names.end()) return static_cast<int>(it - names.begin());
    }
    return -1;
  };

  const int angle = column({"angle_deg"});
  const int energy = column({"energy_mev"});
  const int wavelength = column({"wavelength_nm"});
  const int value = angle >= 0 ? column({"intensity", "counts"}) : column({"counts", "intensity"});

  if (angle < 0 && energy < 0 && wavelength < 0)
    fail(ErrorKind::schema, source + ": missing axis column (need angle_deg, energy_meV or wavelength_nm)");
  const int axis = angle >= 0 ? angle : (energy >= 0 ? energy : wavelength);
  if (value < 0)
    fail(ErrorKind::schema, source + ": missing column '" + std::string(angle >= 0 ? "intensity" : "counts") + "'");
  if (table.rows.size() < 2) fail(ErrorKind::schema, source + ": need at least two data rows");

  std::vector<double> x, y;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto where = [&](int col) {
      return source + ": line " + std::to_string(table.lines[r]) + ", column '" + table.header[col] + "'";
    };
    double xv = 0, yv = 0;
    if (!parse_number(table.rows[r][axis], xv) || !std::isfinite(xv))
      fail(ErrorKind::malformed_input, where(axis) + ": not a number");
    if (!parse_number(table.rows[r][value], yv) || !std::isfinite(yv))
      fail(ErrorKind::malformed_input, where(value) + ": not a number");
    if (yv < 0) fail(ErrorKind::schema, where(value) + ": negative value");
    if (axis == wavelength && xv <= 0) fail(ErrorKind::schema, where(axis) + ": wavelength must be positive");
    if (!x.empty()) {
      const bool rising = x.size() < 2 || x[1] > x[0];
      const bool ok = rising ? xv > x.back() : xv < x.back();
      if (!ok) fail(ErrorKind::schema, where(axis) + ": axis is not strictly monotone");
    }
    x.push_back(xv);
    y.push_back(yv);
  }

  if (angle >= 0) {
    if (x[1] < x[0]) {
      std::reverse(x.begin(), x.end());
      std::reverse(y.begin(), y.end());
    }
    dipole::PolarizationDiagram d;
    d.angle_deg = std::move(x);
    d.intensity = std::move(y);
    return d;
  }

  IntensityCurve curve;
  if (axis == wavelength)
    for (double& v : x) v = spectra::nm_to_meV(v);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  for (std::size_t i : order) {
    curve.energy.push_back(x[i]);
    curve.intensity.push_back(y[i]);
  }
  return curve;
}

std::string sha256_hex(std::string_view data)
{
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::io, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path directory) : directory_(std::move(directory))
{
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + directory_.string() + ": " + ec.message());
}

void ArtifactWriter::write(const std::string& name, const std::string& content)
{
  const auto path = directory_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorKind::io, "write failed for " + path.string());
  artifacts_.push_back({name, sha256_hex(content), content.size()});
}

json library_versions()
{
  return {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"openssl", OPENSSL_VERSION_TEXT},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

void ArtifactWriter::write_manifest(const std::string& command, const json& config)
{
  json m;
  m["tool"] = "gcenter";
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = config;
  m["libraries"] = library_versions();
  json list = json::array();
  for (const auto& a : artifacts_) list.push_back({{"name", a.name}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  m["artifacts"] = list;
  const std::string text = m.dump(2) + "\n";
  const auto path = directory_ / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << text;
}

json to_json(const LineSpectrum& spectrum)
{
  json lines = json::array();
  for (const auto& l : spectrum.lines) {
    lines.push_back({{"energy_meV", spectrum.energy(l)},
                     {"offset_meV", l.offset},
                     {"offset_ueV", units::meV_to_ueV(l.offset)},
                     {"weight", l.weight()},
                     {"sites", l.sites().sites()},
                     {"site_weight", l.site_weight}});
  }
  return {{"center_meV", spectrum.center},
          {"resolution_meV", spectrum.resolution},
          {"axis", spectrum.axis.to_string()},
          {"lines", lines}};
}

json to_json(const dipole::DiagramFit& fit)
{
  json j{{"visibility", fit.visibility},
         {"amplitude", fit.amplitude},
         {"orientation_defined", fit.orientation_defined},
         {"residual_rms", fit.residual_rms},
         {"covariance_V_phi", {{fit.covariance(0, 0), fit.covariance(0, 1)}, {fit.covariance(1, 0), fit.covariance(1, 1)}}}};
  j["orientation_deg"] = fit.orientation_defined ? json(fit.orientation_deg) : json(nullptr);
  return j;
}

json to_json(const dipole::PolarizationDiagram& diagram)
{
  json j{{"angle_deg", diagram.angle_deg}, {"intensity", diagram.intensity}};
  if (diagram.fit) j["fit"] = to_json(*diagram.fit);
  return j;
}

json to_json(const dipole::CollectionModel& m)
{
  return {{"depth_nm", m.depth_nm},
          {"purcell_in_plane", m.purcell_in_plane},
          {"purcell_out_of_plane", m.purcell_out_of_plane},
          {"ceff_in_plane", m.ceff_in_plane},
          {"ceff_out_of_plane", m.ceff_out_of_plane},
          {"r", m.ratio()}};
}

json to_json(const ring::RotationalSpectrum& spectrum, bool include_wavefunctions)
{
  json levels = json::array();
  for (std::size_t k = 0; k < spectrum.levels.size(); ++k) {
    json l{{"energy_meV", spectrum.levels[k].energy}, {"ipr", spectrum.ipr[k]}};
    if (include_wavefunctions) l["psi"] = spectrum.levels[k].wavefunction;
    levels.push_back(l);
  }
  json j{{"barrier_meV", spectrum.potential.barrier},
         {"site_offsets_meV", spectrum.potential.site_offsets},
         {"n_grid", spectrum.potential.n_grid},
         {"kinetic_scale_meV", spectrum.kinetic_scale},
         {"levels", levels}};
  if (include_wavefunctions) {
    j["theta_rad"] = spectrum.potential.theta;
    j["potential_meV"] = spectrum.potential.value;
  }
  return j;
}

json to_json(const ring::LocalizationReport& report)
{
  json levels = json::array();
  for (const auto& l : report.levels)
    levels.push_back({{"energy_meV", l.energy},
                      {"subset", l.subset},
                      {"flag", ring::to_string(l.flag)},
                      {"ipr", l.ipr},
                      {"well_mass", l.mass},
                      {"raw_well_mass", l.raw_mass}});
  return {{"grouping_threshold_meV", report.grouping_threshold}, {"subsets", report.subsets}, {"levels", levels}};
}

json to_json(const strain::EnsembleReport& report)
{
  json orientations = json::array();
  for (const auto& o : report.orientations)
    orientations.push_back({{"defect_axis", o.defect_axis.to_string()},
                            {"strain_class", strain::to_string(o.strain_class)},
                            {"site_offsets_meV", o.offsets},
                            {"lines_meV", o.lines}});
  return {{"orientations", orientations}, {"lines_meV", report.lines}, {"line_count", report.lines.size()}};
}

json to_json(const strain::StrainResponse& response)
{
  json split, shift;
  for (auto c : strain::kStrainClasses) {
    split[strain::to_string(c)] = response.split_of(c);
    shift[strain::to_string(c)] = response.shift_of(c);
  }
  return {{"units", "meV per unit strain"},
          {"sign", response.sign == strain::SplitSign::linear ? "linear" : "magnitude"},
          {"split", split},
          {"shift", shift}};
}

strain::StrainResponse strain_response_from_json(const json& j)
{
  strain::StrainResponse r = strain::StrainResponse::defaults();
  try {
    if (j.contains("sign")) {
      const auto s = j.at("sign").get<std::string>();
      if (s == "linear")
        r.sign = strain::SplitSign::linear;
      else if (s == "magnitude")
        r.sign = strain::SplitSign::magnitude;
      else
        fail(ErrorKind::schema, "strain calibration: sign must be 'linear' or 'magnitude'");
    }
    for (const char* table : {"split", "shift"}) {
      if (!j.contains(table)) continue;
      for (const auto& [key, value] : j.at(table).items()) {
        const auto c = strain::parse_strain_class(key);
        (std::string(table) == "split" ? r.split : r.shift)[static_cast<int>(c)] = value.get<double>();
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::schema, std::string("strain calibration: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::schema) throw;
    fail(ErrorKind::schema, std::string("strain calibration: ") + e.what());
  }
  return r;
}

dipole::CollectionTable collection_table_from_json(const json& j)
{
  std::vector<dipole::CollectionRow> rows;
  try {
    for (const auto& row : j.at("rows"))
      rows.push_back({row.at("depth_nm").get<double>(), row.at("purcell_in_plane").get<double>(),
                      row.at("purcell_out_of_plane").get<double>(), row.at("ceff_in_plane").get<double>(),
                      row.at("ceff_out_of_plane").get<double>()});
  } catch (const json::exception& e) {
    fail(ErrorKind::schema, std::string("collection table: ") + e.what());
  }
  try {
    return dipole::CollectionTable(std::move(rows));
  } catch (const Error& e) {
    fail(ErrorKind::schema, std::string("collection table: ") + e.what());
  }
}

json to_json(const fitting::PeakFit& fit)
{
  json peaks = json::array();
  for (const auto& p : fit.peaks)
    peaks.push_back({{"center_meV", p.center}, {"fwhm_meV", p.fwhm}, {"area", p.area}, {"height", p.height(fit.shape)}});
  json bics = json::array();
  for (double b : fit.bic_by_order) bics.push_back(std::isfinite(b) ? json(b) : json(nullptr));
  return {{"peaks", peaks}, {"baseline", fit.baseline}, {"residual_rms", fit.residual_rms},
          {"bic", fit.bic}, {"bic_by_order", bics}};
}

json to_json(const fitting::AssignmentResult& result)
{
  json hyps = json::array();
  for (const auto& h : result.hypotheses) {
    json preds = json::array();
    for (const auto& p : h.predictions)
      preds.push_back({{"visibility", p.visibility},
                       {"polarized", p.polarized},
                       {"angle_deg", p.angle_deg},
                       {"relative_intensity", p.relative_intensity}});
    json classes = json::array();
    for (const auto& c : h.partition) classes.push_back(c.sites());
    hyps.push_back({{"partition", h.to_string()},
                    {"classes", classes},
                    {"score", h.score},
                    {"cost", h.cost},
                    {"z", h.z},
                    {"interpretation", h.interpretation},
                    {"predictions", preds}});
  }
  return {{"hypotheses", hyps}, {"enumerated", result.enumerated}, {"explanation", result.explanation}};
}

json to_json(const fitting::DefectReport& report)
{
  json lines = json::array();
  for (std::size_t i = 0; i < report.lines.size(); ++i) {
    const auto& l = report.lines[i];
    json jl{{"label", "L" + std::to_string(i)}, {"energy_meV", l.energy}, {"fwhm_meV", l.fwhm}, {"area", l.area}};
    if (l.diagram) jl["diagram"] = to_json(*l.diagram);
    if (l.observation.ratio) jl["ratio"] = *l.observation.ratio;
    if (l.observation.angle_deg) jl["angle_to_main_axis_deg"] = *l.observation.angle_deg;
    lines.push_back(jl);
  }
  return {{"pattern", fitting::to_string(report.pattern)},
          {"diagram", to_json(report.diagram)},
          {"lines", lines},
          {"splittings_meV", report.splittings},
          {"peak_fit", to_json(report.peak_fit)},
          {"assignments", to_json(report.assignments)},
          {"thresholds",
           {{"polarized_visibility", fitting::kPolarizedVisibility},
            {"consistency_z", 3.0},
            {"keep_fraction", 0.95},
            {"bic_rms_floor", 1e-6}}}};
}

json to_json(const roulette::G2Curve& curve)
{
  return {{"bin_width_ns", curve.bin_width},
          {"delay_ns", curve.delay},
          {"g2", curve.g2},
          {"coincidences", curve.coincidences},
          {"g2_zero", curve.at_zero()}};
}

}  // namespace gcenter::io
