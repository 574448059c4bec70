#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sys/wait.h>
#include <fstream>
#include <sstream>

#include "fvstag/config.hpp"
#include "fvstag/io.hpp"
#include "support.hpp"

using namespace fvstag;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("fvstag_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(FVSTAG_CLI) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos && line[0] != '#') kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("mesh files round-trip bit for bit") {
  const Mesh m = fvstag::testing::unit_mesh(7, true, 0.25, 12);
  const RawMesh raw = parse_mesh(format_mesh(m));
  REQUIRE(raw.nodes.size() == m.num_nodes());
  for (std::size_t i = 0; i < raw.nodes.size(); ++i) {
    CHECK(raw.nodes[i].x == m.nodes()[i].x);
    CHECK(raw.nodes[i].y == m.nodes()[i].y);
  }
  CHECK(raw.triangles == m.triangles());
  CHECK(raw.periodic_pairs == m.periodic_pairs());

  const fs::path d = scratch_dir("mesh");
  write_mesh(m, d / "m.txt");
  const Mesh back = read_mesh(d / "m.txt");
  CHECK(back.num_unique_nodes() == m.num_unique_nodes());
  CHECK(back.total_area() == m.total_area());
}

TEST_CASE("malformed mesh files are rejected") {
  CHECK_THROWS_AS(parse_mesh(""), IOError);
  CHECK_THROWS_AS(parse_mesh("OTHER 1\n1 0 0\n0 0\n"), IOError);
  CHECK_THROWS_AS(parse_mesh("FVSTAG-MESH 1\n3 1 0\n0 0\n1 0\n"), IOError);
  CHECK_THROWS_AS(parse_mesh("FVSTAG-MESH 1\n3 1 0\n0 0\n1 0\n0 1\n0 1 5\n"), IOError);
  CHECK_THROWS_AS(parse_mesh("FVSTAG-MESH 1\n3 1 0\n0 0\n1 0\n0 1\n0 1 2\n7\n"), IOError);
  const RawMesh ok = parse_mesh("# comment\nFVSTAG-MESH 1\n3 1 0 # counts\n0 0\n1 0\n0 1\n0 1 2\n");
  CHECK(ok.triangles.size() == 1);
  CHECK_THROWS_AS(read_mesh("/nonexistent/fvstag/mesh.txt"), IOError);
}

TEST_CASE("VTK output") {
  const Mesh m = fvstag::testing::unit_mesh(3, false);
  ModelState s;
  s.p = NodeScalarField(m.num_nodes(), 1.0 / 3.0);
  s.u = CellVectorField(m.num_cells(), Vec3{0.1, 0.2, 0.3});
  s.A = CellTensorField(m.num_cells(), Mat3::identity());
  const std::string vtk = format_vtk(m, s);

  CHECK(vtk.find("POINTS 9 double") != std::string::npos);
  CHECK(vtk.find("CELLS 8 32") != std::string::npos);
  CHECK(vtk.find("CELL_TYPES 8\n5\n5\n5\n5\n5\n5\n5\n5\n") != std::string::npos);
  CHECK(vtk.find("POINT_DATA 9\nSCALARS p double 1") != std::string::npos);
  CHECK(vtk.find("0.1 0.2 0.3\n") != std::string::npos);
  CHECK(vtk.find("VECTORS A3 double\n0 0 1\n") != std::string::npos);
  CHECK(vtk.find("SCALARS rho") == std::string::npos);
  CHECK(vtk.find("VECTORS B") == std::string::npos);
  CHECK(vtk.find("0.3333333333333333\n") != std::string::npos);

  // coordinates survive the 16-digit print to 1e-15 relative
  const Mesh j = fvstag::testing::unit_mesh(6, false, 0.3, 5);
  std::istringstream in(format_vtk(j, ModelState{}));
  std::string line;
  while (std::getline(in, line) && !line.starts_with("POINTS")) {
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < j.num_nodes(); ++i) {
    double x, y, z;
    in >> x >> y >> z;
    worst = std::max(worst, std::abs(x - j.nodes()[i].x) / std::max(1e-300, std::abs(j.nodes()[i].x)));
    worst = std::max(worst, std::abs(y - j.nodes()[i].y) / std::max(1e-300, std::abs(j.nodes()[i].y)));
  }
  CHECK(worst <= 1e-15);

  CHECK_THROWS_AS(write_vtk(m, s, "/proc/fvstag/none.vtk"), IOError);
}

TEST_CASE("time series format") {
  const std::string header = "step,time,dt,Ekin,Emag,mom_x,mom_y,div_u_L2,div_B_L2,curl_A_L2,cg_iters\n";
  const fs::path d = scratch_dir("series");
  write_timeseries(d / "ts.csv", {}, SeriesColumns{});
  CHECK(read(d / "ts.csv") == "# active: Ekin,mom_x,mom_y,div_u_L2\n" + header);

  ModelParams mhd;
  mhd.model = ModelKind::mhd;
  CHECK(timeseries_header(series_columns(mhd)).find("div_B_L2\n") != std::string::npos);

  TimeSeriesRow r;
  r.step = 3;
  r.time = 0.5;
  r.dt = 0.125;
  r.diag.ekin = 2.0;
  r.cg_iters = 17;
  CHECK(timeseries_line(r) == "3,0.5,0.125,2,0,0,0,0,0,0,17\n");
}

TEST_CASE("config files and overrides") {
  RunConfig cfg;
  apply_config_text(cfg, "# comment\ncase = mhd-vortex\nnx=24\nt-end=0.5\ncg_tol=1e-10\ndeterministic=true\n");
  CHECK(cfg.case_name == "mhd-vortex");
  CHECK(cfg.nx == 24);
  CHECK(*cfg.t_end == 0.5);
  CHECK(cfg.cg_tol == 1e-10);
  CHECK(cfg.deterministic);
  cfg.set("nx", "30");  // later sources win
  CHECK(cfg.nx == 30);

  CHECK_THROWS_AS(apply_config_text(cfg, "colour=blue\n"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(cfg, "nx\n"), ConfigError);
  CHECK_THROWS_AS(cfg.set("nx", "ten"), ConfigError);
  CHECK_THROWS_AS(cfg.set("cfl", "0.5x"), ConfigError);
  CHECK_THROWS_AS(cfg.set("jacobi", "maybe"), ConfigError);

  const ResolvedRun r = resolve(cfg);
  CHECK(r.prm.model == ModelKind::mhd);
  CHECK(r.prm.t_end == 0.5);
  CHECK(r.nx == 30);
  CHECK(r.ny == 30);

  // the echo lists every key and parses back to the same resolution
  const std::string echo = echo_config(cfg, r);
  RunConfig again;
  apply_config_text(again, echo);
  const std::string echo2 = echo_config(again, resolve(again));
  CHECK(echo == echo2);
  const auto kv = key_values(echo);
  for (const char* k : {"case", "model", "nx", "cfl", "t_end", "c0", "mu", "cs", "viscosity", "cg_tol", "seed"})
    CHECK_MESSAGE(kv.count(k) == 1, k);
}

TEST_CASE("invalid configurations") {
  auto bad = [](const std::string& text) {
    RunConfig c;
    apply_config_text(c, text);
    return resolve(c);
  };
  CHECK_THROWS_AS(bad("cfl=0\n"), ConfigError);
  CHECK_THROWS_AS(bad("cfl=1.5\n"), ConfigError);
  CHECK_THROWS_AS(bad("t_end=-1\n"), ConfigError);
  CHECK_THROWS_AS(bad("case=sod\nc0=0\n"), ConfigError);
  CHECK_THROWS_AS(bad("jitter=0.5\n"), ConfigError);
  CHECK_THROWS_AS(bad("model=ns-incomp\n"), ConfigError);  // no viscosity given
  CHECK_THROWS_AS(bad("model=plasma\n"), ConfigError);
  CHECK_THROWS_AS(bad("case=cavity\n"), ConfigError);
  CHECK_NOTHROW(bad("model=ns-incomp\nmu=0.1\n"));
}

TEST_CASE("command line runs") {
  const fs::path d = scratch_dir("cli");
  const std::string out = (d / "tg").string();
  REQUIRE(cli("run --case taylor-green --model euler-incomp --nx 20 --cfl 0.9 --t-end 0.25 --out " + out) == 0);
  const auto sum = key_values(read(fs::path(out) / "summary.txt"));
  const double l2u = std::stod(sum.at("L2_u"));
  // reference magnitude at this resolution: 1.4e-1
  CHECK(l2u > 0.14 / 2);
  CHECK(l2u < 0.14 * 2);
  CHECK(fs::exists(fs::path(out) / "config.txt"));

  const auto rows = csv_rows(read(fs::path(out) / "timeseries.csv"));
  REQUIRE(rows.size() > 2);
  double prev = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][7]) <= 1e-10);
    const double ek = std::stod(rows[i][3]);
    CHECK(ek <= prev);
    prev = ek;
  }

  const std::string sod = (d / "sod").string();
  CHECK(cli("run --case sod --t-end 0 --out " + sod) == 0);
  std::size_t vtks = 0;
  for (const auto& e : fs::directory_iterator(sod)) vtks += e.path().extension() == ".vtk";
  CHECK(vtks == 1);
  CHECK(fs::exists(fs::path(sod) / "state_000000.vtk"));

  CHECK(cli("run --nx") == 2);
  CHECK(cli("run --bogus 3") == 2);
  CHECK(cli("run --case cavity --out " + (d / "x").string()) == 2);
  CHECK(cli("run --cfl 7 --out " + (d / "x").string()) == 2);
  CHECK(cli("frobnicate") == 2);

  // config file plus a winning flag
  {
    std::ofstream cf(d / "run.cfg");
    cf << "case=taylor-green\nnx=9\nt_end=0.5\n";
  }
  const std::string o2 = (d / "cfg").string();
  REQUIRE(cli("run --config " + (d / "run.cfg").string() + " --t-end 0.05 --out " + o2) == 0);
  const auto echo = key_values(read(fs::path(o2) / "config.txt"));
  CHECK(echo.at("nx") == "9");
  CHECK(echo.at("t_end") == "0.05");
}

TEST_CASE("mesh files reproduce in-memory runs and deterministic runs repeat") {
  const fs::path d = scratch_dir("mesh_cli");
  const std::string mesh = (d / "m.txt").string();
  REQUIRE(cli("mesh --nx 8 --ny 8 --jitter 0.2 --seed 5 --out " + mesh) == 0);
  REQUIRE(cli("run --mesh " + mesh + " --t-end 0.1 --deterministic --out " + (d / "a").string()) == 0);
  REQUIRE(cli("run --nx 8 --jitter 0.2 --seed 5 --t-end 0.1 --deterministic --out " + (d / "b").string()) == 0);
  REQUIRE(cli("run --nx 8 --jitter 0.2 --seed 5 --t-end 0.1 --deterministic --out " + (d / "c").string()) == 0);
  const std::string a = read(d / "a" / "timeseries.csv");
  CHECK(a == read(d / "b" / "timeseries.csv"));
  CHECK(read(d / "b" / "timeseries.csv") == read(d / "c" / "timeseries.csv"));
  CHECK(read(d / "b" / "summary.txt") == read(d / "c" / "summary.txt"));
}

TEST_CASE("verify-operators subcommand") { CHECK(cli("verify-operators --sizes 8 --fields 5 --probes 5") == 0); }
