#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "gcenter/error.hpp"
#include "gcenter/io.hpp"
#include "gcenter/svg.hpp"

using namespace gcenter;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  const int code = cli::run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh(const std::string& name)
{
  const auto dir = fs::temp_directory_path() / ("gcenter-test-" + name);
  fs::remove_all(dir);
  return dir;
}

io::json read_json(const fs::path& p) { return io::json::parse(io::read_file(p)); }

}  // namespace

TEST_CASE("number formatting")
{
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(2.5) == "2.5");
  CHECK(io::format_fixed(0.6774, 3) == "0.677");
  double v = 0;
  CHECK(io::parse_number("1e-3", v));
  CHECK(v == 0.001);
  CHECK_FALSE(io::parse_number("1,5", v));
  CHECK_FALSE(io::parse_number("abc", v));
}

TEST_CASE("csv")
{
  const auto t = io::parse_csv("# comment\na,b\n1,2\n\n3,4\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.rows.size() == 2);
  CHECK(t.lines[1] == 5);
  CHECK_THROWS_AS(io::parse_csv("a,b\n1\n"), Error);
  CHECK(io::to_csv({"x"}, {{"1"}}) == "x\n1\n");
}

TEST_CASE("measurement loading")
{
  SUBCASE("wavelength spectrum is converted and sorted")
  {
    const auto m = io::parse_measurement("wavelength_nm,counts\n1278.0,1\n1278.6,5\n1279.0,2\n");
    const auto& c = std::get<IntensityCurve>(m);
    REQUIRE(c.size() == 3);
    CHECK(c.energy[0] < c.energy[1]);
    CHECK(c.intensity[0] == 2.0);
  }
  SUBCASE("angle diagram")
  {
    std::string text = "angle_deg,intensity\n";
    for (int a = 0; a <= 360; a += 20) text += std::to_string(a) + ",1\n";
    const auto d = std::get<dipole::PolarizationDiagram>(io::parse_measurement(text));
    CHECK(d.angle_deg.size() == 19);
  }
  SUBCASE("schema errors")
  {
    auto kind = [](const std::string& text) {
      try {
        io::parse_measurement(text, "f.csv");
      } catch (const Error& e) {
        return std::make_pair(e.kind(), std::string(e.what()));
      }
      return std::make_pair(ErrorKind::io, std::string());
    };
    CHECK(kind("energy_meV\n1\n").first == ErrorKind::schema);
    const auto negative = kind("energy_meV,counts\n1,1\n2,-1\n");
    CHECK(negative.first == ErrorKind::schema);
    CHECK(negative.second.find("line 3") != std::string::npos);
    CHECK(kind("angle_deg,intensity\n0,1\n10,1\n5,1\n").first == ErrorKind::schema);
    CHECK(kind("energy_meV,counts\n1,2\n2,x\n").first == ErrorKind::malformed_input);
  }
}

TEST_CASE("sha256")
{
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("svg")
{
  const auto s = svg::render({"t", "x", "y", {{"a", {0, 1, 2}, {1, 3, 2}, false}}});
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("polyline") != std::string::npos);
}

TEST_CASE("cli quartet matches golden output")
{
  const auto dir = fresh("golden");
  const auto r = run({"quartet", "--delta-es-ueV", "2.5", "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(io::read_file(dir / "quartet.csv") == io::read_file(fs::path(GCENTER_TEST_DATA) / "golden" / "quartet.csv"));
  const auto manifest = read_json(dir / "manifest.json");
  CHECK(manifest["command"] == "quartet");
  for (const auto& a : manifest["artifacts"])
    CHECK(a["sha256"] == io::sha256_hex(io::read_file(dir / a["name"].get<std::string>())));
  CHECK(manifest["artifacts"].size() == 3);
}

TEST_CASE("cli spec examples")
{
  const auto dir = fresh("examples");
  REQUIRE(run({"diagram", "--sites", "all", "--r", "2.1", "--out-dir", (dir / "d").string()}).code == 0);
  CHECK(read_json(dir / "d" / "diagram.json")["fit"]["visibility"].get<double>() == doctest::Approx(0.677).epsilon(1e-3));

  REQUIRE(run({"ensemble", "--strain-dir", "110", "--strain", "0.001", "--out-dir", (dir / "e").string()}).code == 0);
  CHECK(read_json(dir / "e" / "ensemble.json")["line_count"] == 4);
}

TEST_CASE("cli manifest replay is reproducible")
{
  const auto dir = fresh("replay");
  const std::vector<std::vector<std::string>> commands{
      {"pes", "--offsets", "1.9,0,0,1.9,0,0", "--n-grid", "120", "--kinetic-scale", "0.5"},
      {"roulette", "--preset", "g1", "--photons", "20000", "--seed", "5", "--polarizer", "main"},
      {"spectrum", "--preset", "g0", "--polarizer", "perp"},
      {"g2", "--photons", "20000", "--emitters", "2", "--max-delay", "20"},
  };
  int i = 0;
  for (auto args : commands) {
    const auto a = dir / ("a" + std::to_string(i));
    const auto b = dir / ("b" + std::to_string(i));
    ++i;
    args.insert(args.end(), {"--out-dir", a.string()});
    REQUIRE(run(args).code == 0);
    REQUIRE(run({"--config", (a / "manifest.json").string(), "--out-dir", b.string()}).code == 0);
    const auto ma = read_json(a / "manifest.json");
    const auto mb = read_json(b / "manifest.json");
    CHECK(ma["artifacts"] == mb["artifacts"]);
  }
}

TEST_CASE("cli emit-config round trip")
{
  const auto dir = fresh("emit");
  const auto emitted = run({"diagram", "--sites", "0,3", "--axis", "-111", "--emit-config"});
  REQUIRE(emitted.code == 0);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "cfg.json") << emitted.out;
  }
  const auto again = run({"--config", (dir / "cfg.json").string(), "--emit-config"});
  REQUIRE(again.code == 0);
  CHECK(io::json::parse(again.out) == io::json::parse(emitted.out));
  // Command-line flags override the file.
  const auto overridden = run({"--config", (dir / "cfg.json").string(), "diagram", "--sites", "1,4", "--emit-config"});
  CHECK(io::json::parse(overridden.out)["sites"] == "1,4");
}

TEST_CASE("cli errors")
{
  const auto dir = fresh("errors");
  fs::create_directories(dir);
  auto error_kind = [](const Run& r) { return io::json::parse(r.err)["error"].get<std::string>(); };

  const auto unknown = run({"quartet", "--nope"});
  CHECK(unknown.code == cli::kExitUsage);
  CHECK(error_kind(unknown) == "usage");

  {
    std::ofstream(dir / "bad.csv") << "angle_deg,intensity\n0,1\n10,abc\n";
  }
  const auto malformed = run({"classify", "--diagram", (dir / "bad.csv").string(), "--out-dir", dir.string()});
  CHECK(malformed.code == cli::exit_code(ErrorKind::malformed_input));

  {
    std::ofstream(dir / "schema.csv") << "angle_deg,volts\n0,1\n";
  }
  const auto schema = run({"classify", "--diagram", (dir / "schema.csv").string(), "--out-dir", dir.string()});
  CHECK(schema.code == cli::exit_code(ErrorKind::schema));
  CHECK(error_kind(schema) == "schema");

  const auto domain = run({"ensemble", "--strain", "0.02", "--out-dir", dir.string()});
  CHECK(domain.code == cli::exit_code(ErrorKind::nonlinear_regime));

  const std::set<int> codes{unknown.code, malformed.code, schema.code, domain.code};
  CHECK(codes.size() == 4);
}
