#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gcenter/dipole.hpp"
#include "gcenter/fitting.hpp"
#include "gcenter/line_spectrum.hpp"
#include "gcenter/ring.hpp"
#include "gcenter/roulette.hpp"
#include "gcenter/strain.hpp"

namespace gcenter::io {

using json = nlohmann::json;

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double value);
/// Fixed-point with `digits` decimals, locale independent.
std::string format_fixed(double value, int digits);
/// Strict locale-independent parse; false if `text` is not entirely a number.
bool parse_number(std::string_view text, double& value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// File line of each row (header is line 1).
  std::vector<std::size_t> lines;
};

CsvTable parse_csv(std::string_view text);
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

std::string read_file(const std::filesystem::path& path);

using Measurement = std::variant<IntensityCurve, dipole::PolarizationDiagram>;

/// CSV with a header row and columns (wavelength_nm | energy_meV, counts) or
/// (angle_deg, intensity). Spectra come back sorted by energy in meV.
/// Missing columns, bad cells, negative values and non-monotone axes raise
/// schema or malformed-input errors naming the line and column.
Measurement load_measurement(const std::filesystem::path& path);
Measurement parse_measurement(std::string_view csv_text, const std::string& source = "input");

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

struct Artifact {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

/// Writes files into one directory and records their checksums.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path directory);

  void write(const std::string& name, const std::string& content);
  /// manifest.json: command, config echo, versions, artifact checksums.
  void write_manifest(const std::string& command, const json& config);

  const std::filesystem::path& directory() const { return directory_; }
  const std::vector<Artifact>& artifacts() const { return artifacts_; }

 private:
  std::filesystem::path directory_;
  std::vector<Artifact> artifacts_;
};

json library_versions();

json to_json(const LineSpectrum& spectrum);
json to_json(const dipole::DiagramFit& fit);
json to_json(const dipole::PolarizationDiagram& diagram);
json to_json(const dipole::CollectionModel& model);
json to_json(const ring::RotationalSpectrum& spectrum, bool include_wavefunctions = true);
json to_json(const ring::LocalizationReport& report);
json to_json(const strain::EnsembleReport& report);
json to_json(const strain::StrainResponse& response);
json to_json(const fitting::PeakFit& fit);
json to_json(const fitting::AssignmentResult& result);
json to_json(const fitting::DefectReport& report);
json to_json(const roulette::G2Curve& curve);

strain::StrainResponse strain_response_from_json(const json& j);
dipole::CollectionTable collection_table_from_json(const json& j);

}  // namespace gcenter::io
