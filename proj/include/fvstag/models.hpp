#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "fvstag/linsolve.hpp"
#include "fvstag/mesh.hpp"
#include "fvstag/operators.hpp"
#include "fvstag/types.hpp"

namespace fvstag {

enum class ModelKind {
  incompressible,       // Euler, or Navier-Stokes when mu > 0
  weakly_compressible,  // isothermal Euler / Navier-Stokes, p = c0^2 rho
  mhd,                  // incompressible MHD
  gpr,                  // incompressible GPR
};

enum class ViscosityMode { none, explicit_stress, implicit_stress };

std::string_view to_string(ModelKind m);
std::string_view to_string(ViscosityMode v);
ModelKind parse_model(std::string_view name);
ViscosityMode parse_viscosity(std::string_view name);

struct ModelParams {
  ModelKind model = ModelKind::incompressible;
  double rho = 1.0;  // constant density of the incompressible models
  double c0 = 1.0;
  double mu = 0.0;
  double cs = 0.0;
  double cfl = 0.9;
  ViscosityMode viscosity = ViscosityMode::none;
  // Keep the -2/3 (div u) I term of the viscous stress.
  bool full_deviatoric = true;
  double t_end = 0.25;
  std::optional<double> dt_max;
  // Floor on the wave speed of the CFL rule; the default depends on the model.
  std::optional<double> lambda_floor;
  BoundaryClosure closure = BoundaryClosure::outflow;

  double cg_tol = 1e-12;
  std::size_t cg_max_iter = 0;
  bool jacobi = false;

  // Pressure gauge of the incompressible models: node `pin_node` is fixed to
  // pin_value(t^{n+1}) (zero when unset).
  int pin_node = 0;
  std::function<double(double)> pin_value;

  void validate() const;
};

struct ModelState {
  double t = 0.0;
  long step = 0;
  NodeScalarField p;
  NodeScalarField rho_node;  // weakly compressible only
  CellVectorField m;
  CellVectorField u;
  CellVectorField B;  // MHD only
  CellTensorField A;  // GPR only

  bool has_magnetic_field() const { return !B.empty(); }
  bool has_distortion() const { return !A.empty(); }
};

struct StepReport {
  double dt = 0.0;
  std::size_t cg_iterations = 0;
  double cg_residual = 0.0;
  std::size_t viscous_cg_iterations = 0;
  bool viscous_cg_converged = true;
  // Kinetic energy of the pressure sub-step: before projection (u*), after
  // (u^{n+1}) and the exact bookkeeping term sum 1/2 rho |w_c| (u^{n+1}-u*)^2.
  double ekin_star = 0.0;
  double ekin_projected = 0.0;
  double projection_dissipation = 0.0;
};

struct StepResult {
  ModelState state;
  StepReport report;
};

struct Diagnostics {
  double ekin = 0.0;
  double emag = 0.0;
  Vec3 momentum;
  double mass = 0.0;
  double div_u_l2 = 0.0;
  double div_b_l2 = 0.0;
  double curl_a_l2 = 0.0;
};

// Per-cell wave speed of the explicit subsystem.
double explicit_wavespeed(const ModelState& s, const ModelParams& prm, int c);

// CFL step capped by dt_max and the time left; a remainder between one and
// two steps is split in half.
double compute_time_step(const ModelState& s, const Mesh& mesh, const ModelParams& prm);

// Normal flux and Rusanov speed of the explicit momentum subsystem.
struct ConvectiveFlux {
  ModelKind model = ModelKind::incompressible;
  double rho = 1.0;
  double cs = 0.0;

  static ConvectiveFlux for_params(const ModelParams& prm);
  // F(Q_c) n for cell c.
  Vec3 normal_flux(const ModelState& s, int c, const Vec3& n) const;
  // Wave speed of cell c along n.
  double wavespeed(const ModelState& s, int c, const Vec3& n) const;
};

// m_c - dt/|w_c| sum_a |e_ac| f_ac with the edge Rusanov flux
// f = 1/2 (F_a + F_c) n - 1/2 s_max (m_a - m_c).
CellVectorField convective_predictor(const ModelState& s, const Mesh& mesh, const ConvectiveFlux& flux, double dt,
                                     BoundaryClosure closure = BoundaryClosure::outflow);

// sigma_p = -mu (grad u + grad u^T - 2/3 (div u) I) at the nodes.
NodeTensorField viscous_stress_nodes(const CellVectorField& u, double mu, const Mesh& mesh,
                                     BoundaryClosure closure = BoundaryClosure::outflow, bool full_deviatoric = true);

// Solves rho_c u + dt div_c(sigma_p(u)) = m_conv for u by CG under the
// cell-area inner product. Requires a fully periodic mesh.
CellVectorField implicit_viscous_solve(const CellVectorField& m_conv, const CellScalarField& rho_c, double dt,
                                       double mu, const Mesh& mesh, double tol, CGReport* report = nullptr,
                                       const CellVectorField* initial_guess = nullptr, bool full_deviatoric = true);

// The symmetric operator of implicit_viscous_solve on flattened (x, y) cell
// components.
LinearOperator viscous_operator(const CellScalarField& rho_c, double dt, double mu, const Mesh& mesh,
                                bool full_deviatoric = true);

// sigma = rho cs^2 G dev(G), G = A^T A.
Mat3 gpr_stress(const Mat3& a, double rho, double cs);

struct ProjectionResult {
  CellVectorField m;
  NodeScalarField p;
  CGReport report;
};

// Incompressible pressure projection: solves div(grad p) = div(m*)/dt with a
// pinned gauge and returns m = m* - dt grad p.
ProjectionResult pressure_projection(const CellVectorField& m_star, const NodeScalarField& p_guess,
                                     const Mesh& mesh, double dt, const ModelParams& prm, double t_new);

StepResult step_incompressible_euler(const ModelState& s, const Mesh& mesh, const ModelParams& prm);
StepResult step_weakly_compressible(const ModelState& s, const Mesh& mesh, const ModelParams& prm);
StepResult step_incompressible_mhd(const ModelState& s, const Mesh& mesh, const ModelParams& prm);
StepResult step_incompressible_gpr(const ModelState& s, const Mesh& mesh, const ModelParams& prm);
StepResult step(const ModelState& s, const Mesh& mesh, const ModelParams& prm);

Diagnostics diagnostics(const ModelState& s, const Mesh& mesh, const ModelParams& prm);

double kinetic_energy(const CellVectorField& u, const CellScalarField& rho_c, const Mesh& mesh);
double kinetic_energy(const CellVectorField& u, double rho, const Mesh& mesh);
// sqrt(sum_p |w_p| f_p^2) over unique nodes.
double node_l2(const NodeScalarField& f, const Mesh& mesh);
double node_l2(const NodeVectorField& f, const Mesh& mesh);

// Cell density of a state: rho_c = average of rho_node, or the constant rho.
CellScalarField cell_density(const ModelState& s, const Mesh& mesh, const ModelParams& prm);

}  // namespace fvstag
