#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fvstag/mesh.hpp"
#include "fvstag/models.hpp"

namespace fvstag {

struct CaseSpec {
  std::string name;
  Rect domain;
  bool periodic_x = true;
  bool periodic_y = true;
  double t_end = 0.25;
  ModelKind model = ModelKind::incompressible;
  ViscosityMode viscosity = ViscosityMode::none;
  double mu = 0.0;
  double c0 = 1.0;
  double cs = 0.0;
  double radius = 0.2;  // solid rotor
  double cfl = 0.9;
  BoundaryClosure closure = BoundaryClosure::outflow;
  std::optional<double> lambda_floor;
  // Project the sampled initial velocity before the first step.
  bool project_initial = false;
  // Node perturbation used by refinement studies of this case.
  double study_jitter = 0.0;
};

const std::vector<std::string>& case_names();
// Default settings of a benchmark; throws ConfigError on an unknown name.
CaseSpec case_spec(const std::string& name);

Mesh make_case_mesh(const CaseSpec& spec, int nx, int ny, double jitter = 0.0, std::uint64_t seed = 1);

// Model parameters of a case, including the pressure gauge.
ModelParams case_params(const CaseSpec& spec);

// Fixes the incompressible pressure gauge at node prm.pin_node to the exact
// solution when the case has one and no pin value is set yet.
void attach_exact_pin(const CaseSpec& spec, const Mesh& mesh, ModelParams& prm);

// Initial state. Node quantities are sampled at node coordinates and cell
// quantities at barycenters; the MHD field is the primal curl of the sampled
// node potential.
ModelState init_case(const CaseSpec& spec, const Mesh& mesh, const ModelParams& prm);
// init_case followed by the initial projection when the case asks for it.
ModelState initial_state(const CaseSpec& spec, const Mesh& mesh, const ModelParams& prm);

struct TaylorGreenValue {
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;
};
TaylorGreenValue taylor_green_exact(double x, double y, double t, double nu, double p0 = -0.5);

// Pointwise reference solution of a case.
struct ExactValue {
  Vec3 u;
  double p = 0.0;
  Vec3 b;
};
using ExactSolution = std::function<ExactValue(const Vec3& x, double t)>;
// Empty when the case has no closed-form solution.
ExactSolution exact_solution(const CaseSpec& spec, const ModelParams& prm);

struct ErrorNorms {
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;
  double bx = 0.0;
  double by = 0.0;
  bool has_b = false;
};
// Cell-area weighted L2 errors of the cell variables, dual-area weighted for p.
ErrorNorms error_norms(const ModelState& s, const ExactSolution& exact, const Mesh& mesh);

struct RiemannProfile {
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> mom;
};
// Fine-grid 1D isothermal Rusanov solution on [x0, x1] with the jump at 0,
// sampled by cell lookup at `samples`.
RiemannProfile riemann_reference_1d(double rho_l, double rho_r, double c0, double t, const std::vector<double>& samples,
                                    int cells = 20000, double x0 = -1.0, double x1 = 1.0);

// One row of the time-series output.
struct TimeSeriesRow {
  long step = 0;
  double time = 0.0;
  double dt = 0.0;
  Diagnostics diag;
  std::size_t cg_iters = 0;
  // Projection sub-step energies (zero for the initial row).
  double ekin_star = 0.0;
  double ekin_projected = 0.0;
  double projection_dissipation = 0.0;
};

struct RunOptions {
  // Called after every completed step (and once for the initial state).
  std::function<void(const ModelState&, const TimeSeriesRow&)> observer;
  bool record = true;
  // Hard cap on the number of steps, 0 for none.
  long max_steps = 0;
};

struct RunResult {
  ModelState state;
  std::vector<TimeSeriesRow> rows;
  std::size_t total_cg_iterations = 0;
  double max_div_u = 0.0;
  double max_div_b = 0.0;
  double max_curl_a = 0.0;
  // Largest E(u^{n+1}) - E(u*) over the steps; positive values violate the
  // projection energy inequality.
  double max_energy_increase = -1e300;
  bool viscous_cg_ok = true;
};

// Advances `state` to prm.t_end.
RunResult run(ModelState state, const Mesh& mesh, const ModelParams& prm, const RunOptions& opt = {});

// Single pressure projection of the initial velocity (solid rotor).
void project_initial_velocity(ModelState& s, const Mesh& mesh, const ModelParams& prm);

struct ConvergenceRow {
  int nx = 0;
  ErrorNorms err;
  std::optional<ErrorNorms> order;
  double seconds = 0.0;
  long steps = 0;
  // Per-step extremes of the run, as in RunResult.
  double max_div_u = 0.0;
  double max_div_b = 0.0;
  double max_energy_increase = 0.0;
  bool viscous_cg_ok = true;
};

struct ConvergenceOptions {
  double jitter = 0.0;
  std::uint64_t seed = 1;
  // Overrides applied to the case parameters before each run.
  std::function<void(ModelParams&)> adjust;
};

double observed_order(double e_prev, double e_cur, int nx_prev, int nx_cur);

std::vector<ConvergenceRow> convergence_study(const CaseSpec& spec, const std::vector<int>& nxs,
                                              const ConvergenceOptions& opt = {});
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

struct Verdict {
  std::string check;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct StructureLimits {
  double div_u = 1e-10;
  double div_b = 1e-12;
  double curl_a = 1e-12;
  double energy_slack = 1e-12;
};

// Involution ceilings and the projection energy inequality over a time series.
std::vector<Verdict> structure_report(const std::vector<TimeSeriesRow>& rows, const StructureLimits& lim = {},
                                      bool has_b = false, bool has_a = false);
std::string structure_csv(const std::vector<Verdict>& v);

struct ApPoint {
  double c0 = 0.0;
  double div_u = 0.0;
};
struct ApSweep {
  std::vector<ApPoint> points;
  double slope = 0.0;
};
// Least-squares slope of log(div u) against log(c0).
double loglog_slope(const std::vector<ApPoint>& pts);
ApSweep ap_sweep(int nx, const std::vector<double>& c0s, double jitter = 0.0, std::uint64_t seed = 1);

struct SodComparison {
  double l1_rho = 0.0;
  double l1_mom = 0.0;
  double shock_x = 0.0;
  double shock_x_ref = 0.0;
  double dx = 0.0;
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> rho_ref;
};
// Compares the y-averaged density and momentum columns against the 1D
// reference at time s.t.
SodComparison compare_sod(const ModelState& s, const Mesh& mesh, const CaseSpec& spec, int nx);

// Largest jump of the sampled Gresho pressure between adjacent nodes whose
// segment crosses r = 0.2 or r = 0.4.
double gresho_seam_jump(const Mesh& mesh, const NodeScalarField& p);

}  // namespace fvstag
