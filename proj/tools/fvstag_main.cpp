// fvstag command line: run, convergence, ap-sweep, mesh, verify-operators.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "fvstag/bench.hpp"
#include "fvstag/config.hpp"
#include "fvstag/io.hpp"
#include "fvstag/verify.hpp"

namespace fs = std::filesystem;
using namespace fvstag;

namespace {

constexpr int kSolverFailure = 1;
constexpr int kBadFlags = 2;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string snapshot_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%06ld.vtk", step);
  return buf;
}

struct RunFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool jacobi = false;
  bool deterministic = false;
  CLI::Option* jacobi_opt = nullptr;
  CLI::Option* deterministic_opt = nullptr;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config_file, "key=value config file; flags override it");
  const std::vector<std::pair<std::string, std::string>> flags{
      {"case", "benchmark case"},
      {"model", "euler-incomp, ns-incomp, euler-wc, ns-wc, mhd, gpr"},
      {"nx", "nodes in x"},
      {"ny", "nodes in y (default nx)"},
      {"cfl", "CFL number of the explicit subsystem"},
      {"t-end", "final time"},
      {"c0", "sound speed (weakly compressible)"},
      {"mu", "dynamic viscosity"},
      {"cs", "shear sound speed (GPR)"},
      {"viscosity", "none, explicit or implicit"},
      {"cg-tol", "CG relative residual tolerance"},
      {"cg-max-iter", "CG iteration cap (0: automatic)"},
      {"jitter", "node perturbation as fraction of the spacing"},
      {"seed", "jitter seed"},
      {"out", "output directory"},
      {"write-every", "VTK snapshot interval in steps (0: first and last only)"},
      {"dt-max", "upper bound on the time step"},
      {"mesh", "mesh file to use instead of the generated lattice"},
  };
  for (const auto& [name, help] : flags) f.options[name] = app->add_option("--" + name, f.values[name], help);
  f.jacobi_opt = app->add_flag("--jacobi", f.jacobi, "Jacobi preconditioning of the pressure CG");
  f.deterministic_opt =
      app->add_flag("--deterministic", f.deterministic, "single worker, no wall-clock data in outputs");
}

RunConfig collect(const RunFlags& f) {
  RunConfig cfg;
  if (!f.config_file.empty()) apply_config_file(cfg, f.config_file);
  for (const auto& [name, opt] : f.options)
    if (opt->count() > 0) cfg.set(name, f.values.at(name));
  if (f.jacobi_opt->count() > 0) cfg.jacobi = f.jacobi;
  if (f.deterministic_opt->count() > 0) cfg.deterministic = f.deterministic;
  return cfg;
}

int cmd_run(const RunFlags& flags) {
  const RunConfig cfg = collect(flags);
  if (cfg.deterministic) setenv("FVSTAG_THREADS", "1", 1);
  ResolvedRun r = resolve(cfg);
  const Mesh mesh = build_mesh(cfg, r);
  attach_exact_pin(r.spec, mesh, r.prm);

  const fs::path out = cfg.out;
  fs::create_directories(out);
  write_text(out / "config.txt", echo_config(cfg, r));

  const auto t0 = std::chrono::steady_clock::now();
  ModelState s0 = initial_state(r.spec, mesh, r.prm);
  const SeriesColumns cols = series_columns(r.prm);
  TimeSeriesWriter series(out / "timeseries.csv", cols);

  long last_written = -1;
  RunOptions opt;
  opt.observer = [&](const ModelState& s, const TimeSeriesRow& row) {
    series.append(row);
    const bool due = cfg.write_every > 0 ? s.step % cfg.write_every == 0 : s.step == 0;
    if (due) {
      write_vtk(mesh, s, out / snapshot_name(s.step), r.spec.name);
      last_written = s.step;
    }
  };

  RunResult res;
  try {
    res = run(std::move(s0), mesh, r.prm, opt);
  } catch (const std::exception& e) {
    write_text(out / "summary.txt", "status=failed\nerror=" + std::string(e.what()) + "\n");
    throw;
  }
  if (res.state.step != last_written) write_vtk(mesh, res.state, out / snapshot_name(res.state.step), r.spec.name);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool has_b = r.prm.model == ModelKind::mhd;
  const bool has_a = r.prm.model == ModelKind::gpr;
  // The compressible model has no divergence constraint and no projection.
  std::vector<Verdict> verdicts;
  if (r.prm.model != ModelKind::weakly_compressible) verdicts = structure_report(res.rows, {}, has_b, has_a);
  write_text(out / ("structure_" + r.spec.name + ".csv"), structure_csv(verdicts));

  std::ostringstream sum;
  sum << "status=ok\ncase=" << r.spec.name << "\nmodel=" << to_string(r.prm.model) << '\n';
  sum << "steps=" << res.state.step << "\nt_final=" << sci(res.state.t) << '\n';
  sum << "nodes=" << mesh.num_nodes() << "\ncells=" << mesh.num_cells() << '\n';
  if (const ExactSolution ex = exact_solution(r.spec, r.prm)) {
    const ErrorNorms e = error_norms(res.state, ex, mesh);
    sum << "L2_u=" << sci(e.u) << "\nL2_v=" << sci(e.v) << "\nL2_p=" << sci(e.p) << '\n';
    if (e.has_b) sum << "L2_Bx=" << sci(e.bx) << "\nL2_By=" << sci(e.by) << '\n';
  }
  sum << "max_div_u_L2=" << sci(res.max_div_u) << '\n';
  if (has_b) sum << "max_div_B_L2=" << sci(res.max_div_b) << '\n';
  if (has_a) sum << "max_curl_A_L2=" << sci(res.max_curl_a) << '\n';
  sum << "total_cg_iterations=" << res.total_cg_iterations << '\n';
  for (const auto& v : verdicts) sum << "check." << v.check << '=' << (v.pass ? "pass" : "FAIL") << '\n';
  if (!cfg.deterministic) sum << "wall_seconds=" << sci(seconds) << '\n';
  write_text(out / "summary.txt", sum.str());
  std::cout << sum.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staggered semi-implicit finite volume solver on triangular meshes"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "advance one benchmark case");
  add_run_flags(run_cmd, run_flags);

  std::string conv_case = "taylor-green", conv_visc, conv_out = ".";
  std::vector<int> conv_nx{20, 40, 60, 80, 100};
  std::optional<double> conv_jitter;
  std::uint64_t conv_seed = 1;
  std::optional<double> conv_cfl;
  auto* conv_cmd = app.add_subcommand("convergence", "mesh refinement study against the exact solution");
  conv_cmd->add_option("--case", conv_case, "benchmark case with an exact solution");
  conv_cmd->add_option("--nx", conv_nx, "node counts")->delimiter(',');
  conv_cmd->add_option("--viscosity", conv_visc, "none, explicit or implicit");
  conv_cmd->add_option("--cfl", conv_cfl, "CFL number");
  conv_cmd->add_option("--jitter", conv_jitter, "node perturbation (default: per case)")->check(CLI::Range(0.0, 0.3));
  conv_cmd->add_option("--seed", conv_seed, "jitter seed");
  conv_cmd->add_option("--out", conv_out, "output directory");

  int ap_nx = 100;
  std::vector<double> ap_c0{10.0, 100.0, 1000.0};
  std::string ap_out = ".";
  auto* ap_cmd = app.add_subcommand("ap-sweep", "div u of compressible Taylor-Green against c0");
  ap_cmd->add_option("--nx", ap_nx, "node count")->check(CLI::PositiveNumber);
  ap_cmd->add_option("--c0", ap_c0, "sound speeds")->delimiter(',');
  ap_cmd->add_option("--out", ap_out, "output directory");

  std::string mesh_case = "taylor-green", mesh_out = "mesh.txt";
  int mesh_nx = 8;
  std::optional<int> mesh_ny;
  double mesh_jitter = 0.0;
  std::uint64_t mesh_seed = 1;
  auto* mesh_cmd = app.add_subcommand("mesh", "write a structured triangulation of a case domain");
  mesh_cmd->add_option("--case", mesh_case, "case providing domain and periodicity");
  mesh_cmd->add_option("--nx", mesh_nx, "nodes in x")->check(CLI::Range(2, 1 << 20));
  mesh_cmd->add_option("--ny", mesh_ny, "nodes in y (default nx)");
  mesh_cmd->add_option("--jitter", mesh_jitter, "node perturbation")->check(CLI::Range(0.0, 0.3));
  mesh_cmd->add_option("--seed", mesh_seed, "jitter seed");
  mesh_cmd->add_option("--out", mesh_out, "mesh file");

  std::vector<int> ver_sizes{8, 16, 32};
  std::vector<double> ver_jitters{0.0, 0.2};
  int ver_fields = 50, ver_probes = 20;
  std::uint64_t ver_seed = 7;
  auto* ver_cmd = app.add_subcommand("verify-operators", "discrete identity and summation-by-parts checks");
  ver_cmd->add_option("--sizes", ver_sizes, "mesh sizes")->delimiter(',');
  ver_cmd->add_option("--jitters", ver_jitters, "jitter values")->delimiter(',');
  ver_cmd->add_option("--fields", ver_fields, "random fields per mesh");
  ver_cmd->add_option("--probes", ver_probes, "summation-by-parts probes per mesh");
  ver_cmd->add_option("--seed", ver_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kBadFlags;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags);

    if (*conv_cmd) {
      const CaseSpec spec = case_spec(conv_case);
      ConvergenceOptions opt;
      opt.jitter = conv_jitter.value_or(spec.study_jitter);
      opt.seed = conv_seed;
      const std::optional<ViscosityMode> visc =
          conv_visc.empty() ? std::nullopt : std::optional(parse_viscosity(conv_visc));
      opt.adjust = [&](ModelParams& p) {
        if (visc) p.viscosity = *visc;
        if (conv_cfl) p.cfl = *conv_cfl;
      };
      const auto rows = convergence_study(spec, conv_nx, opt);
      const std::string csv = convergence_csv(rows);
      fs::create_directories(conv_out);
      write_text(fs::path(conv_out) / ("convergence_" + conv_case + ".csv"), csv);
      std::cout << csv;
      return 0;
    }

    if (*ap_cmd) {
      const ApSweep sw = ap_sweep(ap_nx, ap_c0);
      std::ostringstream csv;
      csv << "c0,div_u_L2\n";
      for (const auto& p : sw.points) csv << sci(p.c0) << ',' << sci(p.div_u) << '\n';
      csv << "# slope " << sci(sw.slope) << '\n';
      fs::create_directories(ap_out);
      write_text(fs::path(ap_out) / "ap_sweep.csv", csv.str());
      std::cout << csv.str();
      return 0;
    }

    if (*mesh_cmd) {
      const CaseSpec spec = case_spec(mesh_case);
      const Mesh mesh = make_case_mesh(spec, mesh_nx, mesh_ny.value_or(mesh_nx), mesh_jitter, mesh_seed);
      write_mesh(mesh, mesh_out);
      std::cout << mesh_out << ": " << mesh.num_nodes() << " nodes, " << mesh.num_cells() << " cells\n";
      return 0;
    }

    if (*ver_cmd) {
      const IdentityReport rep = verify_operator_identities(ver_sizes, ver_jitters, ver_fields, ver_probes, ver_seed);
      std::cout << format_identity_report(rep);
      const bool ok = rep.pass();
      std::cout << (ok ? "PASS" : "FAIL") << '\n';
      return ok ? 0 : kSolverFailure;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadFlags;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return 0;
}
