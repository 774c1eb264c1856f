#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "porofft/error.hpp"
#include "porofft/field_io.hpp"
#include "porofft/geometry.hpp"
#include "porofft/raster_io.hpp"
#include "porofft/run.hpp"

using namespace porofft;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "porofft_test_io" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunConfig small_run(int n) {
  RunConfig c;
  c.geometry = parse_geometry_spec("disk:0.25");
  c.geometry.resolution = n;
  c.transport.pe = 10.0;
  return c;
}

}  // namespace

TEST_CASE("double formatting round trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    REQUIRE(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv export and import are exact") {
  const auto dir = scratch("csv");
  const UnitCellGrid g({6, 5});
  std::mt19937 rng(2);
  std::normal_distribution<double> d;
  VectorField u(g);
  for (int c = 0; c < 2; ++c)
    for (auto& x : u.component(c)) x = d(rng);
  export_field(u, FieldFormat::Csv, dir / "u.csv");
  const auto back = import_field_csv(dir / "u.csv").to_vector();
  REQUIRE(back.grid() == g);
  for (int c = 0; c < 2; ++c)
    for (std::size_t p = 0; p < g.num_points(); ++p) REQUIRE(back.component(c)[p] == u.component(c)[p]);

  ScalarField f(g, 0.1);
  export_field(f, FieldFormat::Csv, dir / "f.csv");
  const auto fb = import_field_csv(dir / "f.csv").to_scalar();
  for (std::size_t p = 0; p < g.num_points(); ++p) REQUIRE(fb[p] == 0.1);
  const auto text = slurp(dir / "f.csv");
  CHECK(text.find("# dims 6 5") != std::string::npos);
}

TEST_CASE("large field keeps its norm through csv") {
  const auto dir = scratch("big");
  const auto g = UnitCellGrid::uniform(128);
  VectorField u(g);
  for (int c = 0; c < 2; ++c)
    for (std::size_t p = 0; p < g.num_points(); ++p) u.component(c)[p] = std::sin(0.37 * p + c) * 1e-3;
  export_field(u, FieldFormat::Csv, dir / "u.csv");
  const auto back = import_field_csv(dir / "u.csv").to_vector();
  CHECK(std::abs(l2_norm(back) - l2_norm(u)) <= 1e-15 * l2_norm(u));
}

TEST_CASE("vtk layout") {
  const auto dir = scratch("vtk");
  const UnitCellGrid g({4, 5});
  export_field(VectorField(g, 1.5), FieldFormat::Vtk, dir / "u.vtk", "u");
  const auto text = slurp(dir / "u.vtk");
  CHECK(text.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(text.find("DATASET STRUCTURED_POINTS") != std::string::npos);
  CHECK(text.find("DIMENSIONS 4 5 1") != std::string::npos);
  CHECK(text.find("POINT_DATA 20") != std::string::npos);
  CHECK(text.find("SCALARS u_0 double 1") != std::string::npos);
  CHECK(text.find("SCALARS u_1 double 1") != std::string::npos);
}

TEST_CASE("field io errors") {
  const auto dir = scratch("err");
  CHECK_THROWS_AS(import_field_csv(dir / "nope.csv"), IoError);
  {
    std::ofstream f(dir / "bad.csv");
    f << "# porofft-field v1\n# dims 4 4\n";
  }
  CHECK_THROWS_AS(import_field_csv(dir / "bad.csv"), IoError);
  CHECK_THROWS_AS(export_field(ScalarField(UnitCellGrid::uniform(4)), FieldFormat::Csv, dir / "no" / "dir" / "x.csv"),
                  IoError);
  CHECK_THROWS(parse_field_format("hdf5"));
}

TEST_CASE("geometry specifications") {
  const auto d = parse_geometry_spec("disk:0.2@0.3,0.6");
  REQUIRE(d.obstacles.size() == 1);
  CHECK(std::get<Disk>(d.obstacles[0]).radius == 0.2);
  CHECK(std::get<Disk>(d.obstacles[0]).center[1] == 0.6);
  const auto e = parse_geometry_spec("ellipse:0.3,0.1,90");
  CHECK(std::get<Ellipse>(e.obstacles[0]).angle == doctest::Approx(M_PI / 2));
  const auto r = parse_geometry_spec("random:5,4,0.05,0.1");
  CHECK(r.random);
  CHECK(r.count == 4);
  const auto f = parse_geometry_spec("cell.pgm");
  CHECK(f.raster.has_value());
  CHECK(f.obstacles.empty());
  CHECK_THROWS_AS(parse_geometry_spec("disk:abc"), ConfigError);
  CHECK_THROWS_AS(parse_geometry_spec("ellipse:0.3"), ConfigError);
}

TEST_CASE("sweep specifications") {
  const auto s = parse_sweep_spec("a0=0.5,0.55,1");
  CHECK(s.param == "a0");
  CHECK(s.values.size() == 3);
  CHECK_THROWS_AS(parse_sweep_spec("a0="), ConfigError);
  CHECK_THROWS_AS(parse_sweep_spec("gamma=1"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_spec("a0"), ConfigError);
}

TEST_CASE("run writes a complete report") {
  const auto dir = scratch("run");
  auto c = small_run(16);
  c.out_dir = dir;
  c.field_formats = {FieldFormat::Csv, FieldFormat::Vtk};
  const auto rep = run(c);
  CHECK(rep.converged());
  CHECK(exit_code(rep) == 0);
  for (const char* f : {"report.json", "indicator.pgm", "u_e1.csv", "u_e2.vtk", "chi_e1.csv", "grad_chi_e2.vtk",
                        "stokes_history_e1.csv", "transport_history_e2.csv"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["version"] == kReportSchemaVersion);
  CHECK(j["converged"] == true);
  CHECK(j["stokes"].size() == 2);
  CHECK(j["stokes"][0]["final_residuals"].size() == 3);
  CHECK(j["transport"]["runs"].size() == 2);
  CHECK(j["tensors"]["K"][0][0].get<double>() > 0.0);
  CHECK(j["tensors"]["D"].is_array());
  CHECK(j["tensors"]["meta"]["stokes_symbol_mode"] == "central");
  CHECK(j["tensors"]["meta"]["transport_eps"] == 1e-5);
  CHECK(j.contains("timing"));
  const auto hist = slurp(dir / "stokes_history_e1.csv");
  CHECK(std::count(hist.begin(), hist.end(), '\n') == rep.unit_flows[0].result.report.iterations + 1);
}

TEST_CASE("reports are deterministic apart from timing") {
  const auto a = run(small_run(16)), b = run(small_run(16));
  CHECK(report_json(a, false) == report_json(b, false));
}

TEST_CASE("driven flow and unit flows") {
  auto c = small_run(16);
  c.stokes.g_p = {1.0, 1.0};
  const auto rep = run(c);
  REQUIRE(rep.driven_flow.has_value());
  CHECK(rep.transport_flow().g_p == std::vector<double>{1.0, 1.0});
  CHECK(rep.tensors.meta.transport_g_p == std::vector<double>{1.0, 1.0});
}

TEST_CASE("all solid cells produce a degenerate report") {
  const auto dir = scratch("solid");
  {
    std::ofstream f(dir / "solid.csv");
    for (int r = 0; r < 8; ++r) f << "1,1,1,1,1,1,1,1\n";
  }
  RunConfig c;
  c.geometry = parse_geometry_spec((dir / "solid.csv").string());
  c.out_dir = dir / "out";
  const auto rep = run(c);
  CHECK(rep.stokes_converged());
  CHECK(rep.porosity == 0.0);
  CHECK(rep.tensors.K(0, 0) == 0.0);
  CHECK_FALSE(rep.tensors.D.has_value());
  CHECK(rep.transport_skipped.find("no pore space") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "report.json"));
}

TEST_CASE("non convergence still writes the report") {
  const auto dir = scratch("nc");
  auto c = small_run(16);
  c.stokes.max_iter = 3;
  c.out_dir = dir;
  const auto rep = run(c);
  CHECK(exit_code(rep) == 2);
  CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("config validation") {
  RunConfig c;
  c.geometry.obstacles.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.jobs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.sweep = SweepSpec{"a0", {}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.alpha = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("penalties follow the config") {
  RunConfig c;
  const auto g = UnitCellGrid::uniform(32);
  CHECK(c.penalties_for(g).alpha == doctest::Approx(1024.0));
  c.adaptive = true;
  c.beta = 7.0;
  const auto p = c.penalties_for(g);
  CHECK(p.adaptive);
  CHECK(p.alpha == 1.0);
  CHECK(p.beta == 7.0);
}

TEST_CASE("sweeps are ordered and independent of concurrency") {
  const auto dir = scratch("sweep");
  auto c = small_run(16);
  c.sweep = parse_sweep_spec("a0=1.0,0.55,0.7");
  c.out_dir = dir;
  const auto serial = run_sweep(c);
  c.jobs = 3;
  const auto par = run_sweep(c);
  REQUIRE(serial.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(serial[i].value == par[i].value);
    CHECK(serial[i].transport_iterations == par[i].transport_iterations);
    CHECK(serial[i].d11 == par[i].d11);
  }
  CHECK(serial[1].transport_iterations <= serial[0].transport_iterations);
  CHECK(fs::exists(dir / "sweep.csv"));

  c.sweep = parse_sweep_spec("b=100,1000");
  c.jobs = 1;
  const auto pen = run_sweep(c);
  CHECK(pen[0].transport_status == "skipped");
  CHECK(pen[0].stokes_iterations != pen[1].stokes_iterations);
}
