#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "fvstag/models.hpp"
#include "fvstag/parallel.hpp"

namespace fvstag {

namespace {

std::vector<double> unique_dual_areas(const Mesh& mesh) {
  const auto a = mesh.dual_areas_unique();
  return {a.begin(), a.end()};
}

// Diagonal of the negative Laplacian on unique nodes.
void laplacian_diagonal(const Mesh& mesh, std::span<double> d) {
  const auto area = mesh.cell_area();
  for (std::size_t ui = 0; ui < mesh.num_unique_nodes(); ++ui) {
    const int u = static_cast<int>(ui);
    double s = 0.0;
    for (const Corner& cr : mesh.node_cells(u)) {
      Vec3 ncu;
      for (int k = 0; k < 3; ++k)
        if (mesh.cell_unique(cr.cell, k) == u) ncu += mesh.corner_normal(cr.cell, k);
      s += dot(mesh.corner_normal(cr.cell, cr.local), ncu) / area[cr.cell];
    }
    d[ui] = s / mesh.dual_area_unique(u);
  }
}

// y = shift * x + scale * K x with K the negative Laplacian.
LinearOperator pressure_operator(const Mesh& mesh, double shift, double scale) {
  LinearOperator op;
  op.size = mesh.num_unique_nodes();
  op.weights = unique_dual_areas(mesh);
  auto scratch = std::make_shared<std::vector<Vec3>>();
  op.apply = [&mesh, shift, scale, scratch](std::span<const double> x, std::span<double> y) {
    apply_negative_laplacian(mesh, x, y, *scratch);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = shift * x[i] + scale * y[i];
  };
  op.diagonal = [&mesh, shift, scale](std::span<double> d) {
    laplacian_diagonal(mesh, d);
    for (double& v : d) v = shift + scale * v;
  };
  return op;
}

CGOptions cg_options(const ModelParams& prm) {
  CGOptions opt;
  opt.tol = prm.cg_tol;
  opt.max_iter = prm.cg_max_iter;
  opt.jacobi = prm.jacobi;
  return opt;
}

void require_converged(const CGReport& rep, double tol, const char* what) {
  if (acceptable(rep, tol)) return;
  std::ostringstream os;
  os << what << " did not converge: relative residual " << rep.relative_residual << " after " << rep.iterations
     << " iterations";
  throw SolverError(os.str());
}

CellVectorField divide(const CellVectorField& m, const CellScalarField& rho_c) {
  CellVectorField u(m.size());
  for (std::size_t c = 0; c < m.size(); ++c) u[c] = (1.0 / rho_c[c]) * m[c];
  return u;
}

struct Predicted {
  CellVectorField m;
  CellVectorField u;
};

// Convective predictor followed by the explicit or implicit viscous stress.
Predicted momentum_predictor(const ModelState& s, const Mesh& mesh, const ModelParams& prm, double dt,
                             const CellScalarField& rho_c, StepReport& rep) {
  Predicted out;
  out.m = convective_predictor(s, mesh, ConvectiveFlux::for_params(prm), dt, prm.closure);
  if (prm.mu > 0.0 && prm.viscosity == ViscosityMode::explicit_stress) {
    const NodeTensorField sigma = viscous_stress_nodes(s.u, prm.mu, mesh, prm.closure, prm.full_deviatoric);
    const CellVectorField div = divergence_primal_tensor(sigma, mesh);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) out.m[c] -= dt * div[c];
    out.u = divide(out.m, rho_c);
  } else if (prm.mu > 0.0 && prm.viscosity == ViscosityMode::implicit_stress) {
    CGReport vrep;
    out.u = implicit_viscous_solve(out.m, rho_c, dt, prm.mu, mesh, prm.cg_tol, &vrep, &s.u, prm.full_deviatoric);
    rep.viscous_cg_iterations = vrep.iterations;
    rep.viscous_cg_converged = acceptable(vrep, prm.cg_tol);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) out.m[c] = rho_c[c] * out.u[c];
  } else {
    out.u = divide(out.m, rho_c);
  }
  return out;
}

void energy_bookkeeping(const CellVectorField& u_star, const CellVectorField& u_new, const CellScalarField& rho_c,
                        const Mesh& mesh, StepReport& rep) {
  rep.ekin_star = kinetic_energy(u_star, rho_c, mesh);
  rep.ekin_projected = kinetic_energy(u_new, rho_c, mesh);
  const auto area = mesh.cell_area();
  double d = 0.0;
  for (std::size_t c = 0; c < u_new.size(); ++c) {
    const Vec3 w = u_new[c] - u_star[c];
    d += 0.5 * rho_c[c] * area[c] * dot(w, w);
  }
  rep.projection_dissipation = d;
}

void check_finite(const CellVectorField& f, const char* what) {
  for (std::size_t c = 0; c < f.size(); ++c) {
    if (!std::isfinite(f[c].x) || !std::isfinite(f[c].y) || !std::isfinite(f[c].z)) {
      std::ostringstream os;
      os << "non-finite " << what << " in cell " << c;
      throw NumericalError(os.str());
    }
  }
}

}  // namespace

ProjectionResult pressure_projection(const CellVectorField& m_star, const NodeScalarField& p_guess, const Mesh& mesh,
                                     double dt, const ModelParams& prm, double t_new) {
  const NodeScalarField div = divergence_dual(m_star, mesh, prm.closure);
  std::vector<double> b = gather_unique(div, mesh);
  for (double& v : b) v *= -1.0 / dt;
  std::vector<double> x = gather_unique(p_guess, mesh);

  const LinearOperator op = pressure_operator(mesh, 0.0, 1.0);
  CGOptions opt = cg_options(prm);
  if (prm.pin_node < 0 || static_cast<std::size_t>(prm.pin_node) >= mesh.num_nodes())
    throw ConfigError("pressure pin node out of range");
  opt.pin = Pin{static_cast<std::size_t>(mesh.unique_index(prm.pin_node)), prm.pin_value ? prm.pin_value(t_new) : 0.0};

  ProjectionResult res;
  res.report = conjugate_gradient(op, b, x, opt);
  require_converged(res.report, opt.tol, "pressure Poisson solve");
  res.p = scatter_unique(x, mesh);
  const CellVectorField g = gradient_primal(res.p, mesh);
  res.m = CellVectorField(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) res.m[c] = m_star[c] - dt * g[c];
  return res;
}

StepResult step_incompressible_euler(const ModelState& s, const Mesh& mesh, const ModelParams& prm) {
  StepResult r;
  StepReport& rep = r.report;
  rep.dt = compute_time_step(s, mesh, prm);
  const CellScalarField rho_c(mesh.num_cells(), prm.rho);
  const Predicted pred = momentum_predictor(s, mesh, prm, rep.dt, rho_c, rep);
  ProjectionResult proj = pressure_projection(pred.m, s.p, mesh, rep.dt, prm, s.t + rep.dt);
  rep.cg_iterations = proj.report.iterations;
  rep.cg_residual = proj.report.relative_residual;

  ModelState& n = r.state;
  n.t = s.t + rep.dt;
  n.step = s.step + 1;
  n.p = std::move(proj.p);
  n.m = std::move(proj.m);
  n.u = divide(n.m, rho_c);
  n.B = s.B;
  n.A = s.A;
  check_finite(n.u, "velocity");
  energy_bookkeeping(pred.u, n.u, rho_c, mesh, rep);
  return r;
}

StepResult step_weakly_compressible(const ModelState& s, const Mesh& mesh, const ModelParams& prm) {
  if (s.rho_node.size() != mesh.num_nodes()) throw ConfigError("weakly compressible state needs nodal density");
  StepResult r;
  StepReport& rep = r.report;
  const double dt = rep.dt = compute_time_step(s, mesh, prm);
  const CellScalarField rho_c = average_node_to_cell(s.rho_node, mesh);
  const Predicted pred = momentum_predictor(s, mesh, prm, dt, rho_c, rep);

  // Pressure wave equation written for the increment d = p^{n+1} - p^n:
  //   d / c0^2 + dt^2 K d = -dt^2 K p^n - dt div(m*).
  // Solving for the increment keeps the relative CG tolerance meaningful
  // when c0 is large and p^n dominates the right-hand side.
  const double c2 = prm.c0 * prm.c0;
  const std::vector<double> pn = gather_unique(s.p, mesh);
  const std::vector<double> div_star = gather_unique(divergence_dual(pred.m, mesh, prm.closure), mesh);
  const std::size_t nu = mesh.num_unique_nodes();
  std::vector<double> kp(nu), b(nu), d(nu, 0.0);
  std::vector<Vec3> scratch;
  apply_negative_laplacian(mesh, pn, kp, scratch);
  for (std::size_t i = 0; i < nu; ++i) b[i] = -dt * dt * kp[i] - dt * div_star[i];

  const LinearOperator op = pressure_operator(mesh, 1.0 / c2, dt * dt);
  const CGReport cg = conjugate_gradient(op, b, d, cg_options(prm));
  require_converged(cg, prm.cg_tol, "pressure wave solve");
  rep.cg_iterations = cg.iterations;
  rep.cg_residual = cg.relative_residual;

  std::vector<double> p_new(nu), kpn(nu), rho_new(nu);
  for (std::size_t i = 0; i < nu; ++i) p_new[i] = pn[i] + d[i];
  apply_negative_laplacian(mesh, p_new, kpn, scratch);
  // Conservative mass update rho^{n+1} = rho^n - dt div(m^{n+1}) with
  // div(m^{n+1}) = div(m*) + dt K p^{n+1}; p follows from the equation of state.
  const std::vector<double> rho_n = gather_unique(s.rho_node, mesh);
  for (std::size_t i = 0; i < nu; ++i) {
    rho_new[i] = rho_n[i] - dt * (div_star[i] + dt * kpn[i]);
    if (!(rho_new[i] > 0.0)) {
      std::ostringstream os;
      os << "non-positive density " << rho_new[i] << " at node " << mesh.unique_representative(static_cast<int>(i))
         << ", t = " << s.t + dt;
      throw NumericalError(os.str());
    }
  }

  ModelState& n = r.state;
  n.t = s.t + dt;
  n.step = s.step + 1;
  n.rho_node = scatter_unique(rho_new, mesh);
  n.p = NodeScalarField(mesh.num_nodes());
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) n.p[i] = c2 * n.rho_node[i];
  const NodeScalarField p_solved = scatter_unique(p_new, mesh);
  const CellVectorField g = gradient_primal(p_solved, mesh);
  n.m = CellVectorField(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) n.m[c] = pred.m[c] - dt * g[c];
  const CellScalarField rho_c_new = average_node_to_cell(n.rho_node, mesh);
  n.u = divide(n.m, rho_c_new);
  check_finite(n.u, "velocity");
  energy_bookkeeping(pred.u, divide(n.m, rho_c), rho_c, mesh, rep);
  return r;
}

StepResult step_incompressible_mhd(const ModelState& s, const Mesh& mesh, const ModelParams& prm) {
  if (!s.has_magnetic_field()) throw ConfigError("MHD state needs a magnetic field");
  StepResult r;
  StepReport& rep = r.report;
  const double dt = rep.dt = compute_time_step(s, mesh, prm);

  const NodeVectorField up = average_cell_to_node(s.u, mesh);
  const NodeVectorField bp = average_cell_to_node(s.B, mesh);
  NodeVectorField e(mesh.num_nodes());
  for (std::size_t p = 0; p < mesh.num_nodes(); ++p) e[p] = -1.0 * cross(up[p], bp[p]);
  const CellVectorField curl_e = curl_primal(e, mesh);

  const CellScalarField rho_c(mesh.num_cells(), prm.rho);
  const Predicted pred = momentum_predictor(s, mesh, prm, dt, rho_c, rep);
  ProjectionResult proj = pressure_projection(pred.m, s.p, mesh, dt, prm, s.t + dt);
  rep.cg_iterations = proj.report.iterations;
  rep.cg_residual = proj.report.relative_residual;

  ModelState& n = r.state;
  n.t = s.t + dt;
  n.step = s.step + 1;
  n.p = std::move(proj.p);
  n.m = std::move(proj.m);
  n.u = divide(n.m, rho_c);
  n.B = CellVectorField(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) n.B[c] = s.B[c] - dt * curl_e[c];
  check_finite(n.u, "velocity");
  check_finite(n.B, "magnetic field");
  energy_bookkeeping(pred.u, n.u, rho_c, mesh, rep);
  return r;
}

StepResult step_incompressible_gpr(const ModelState& s, const Mesh& mesh, const ModelParams& prm) {
  if (!s.has_distortion()) throw ConfigError("GPR state needs a distortion field");
  StepResult r;
  StepReport& rep = r.report;
  const double dt = rep.dt = compute_time_step(s, mesh, prm);
  const std::size_t nc = mesh.num_cells();

  // A^{n+1} = A - dt grad(A_p u_p) - dt T with
  // T_ik = u_m (d_m A_ik - d_k A_im), the dual gradients of the rows of A
  // averaged back to the cells. T is built from the dual curl of the rows
  // and vanishes identically while the rows stay curl-free.
  const NodeTensorField ap = average_cell_to_node(s.A, mesh);
  const NodeVectorField up = average_cell_to_node(s.u, mesh);
  NodeVectorField w(mesh.num_nodes());
  for (std::size_t p = 0; p < mesh.num_nodes(); ++p) w[p] = ap[p] * up[p];
  const CellTensorField grad_w = gradient_primal_vector(w, mesh);

  std::vector<CellTensorField> row_grad;  // row_grad[i][c](k, m) = d_m A_ik
  row_grad.reserve(3);
  for (int i = 0; i < 3; ++i) {
    CellVectorField row(nc);
    for (std::size_t c = 0; c < nc; ++c) row[c] = s.A[c].row(i);
    row_grad.push_back(average_node_to_cell(gradient_dual(row, mesh, prm.closure), mesh));
  }

  ModelState& n = r.state;
  n.A = CellTensorField(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const Vec3& u = s.u[c];
    const double uc[3] = {u.x, u.y, u.z};
    Mat3 t;
    for (int i = 0; i < 3; ++i) {
      const Mat3& g = row_grad[i][c];
      for (int k = 0; k < 3; ++k) {
        double v = 0.0;
        for (int m = 0; m < 3; ++m) v += uc[m] * (g(k, m) - g(m, k));
        t(i, k) = v;
      }
    }
    n.A[c] = s.A[c] - dt * grad_w[c] - dt * t;
  }

  const CellScalarField rho_c(nc, prm.rho);
  const Predicted pred = momentum_predictor(s, mesh, prm, dt, rho_c, rep);
  ProjectionResult proj = pressure_projection(pred.m, s.p, mesh, dt, prm, s.t + dt);
  rep.cg_iterations = proj.report.iterations;
  rep.cg_residual = proj.report.relative_residual;

  n.t = s.t + dt;
  n.step = s.step + 1;
  n.p = std::move(proj.p);
  n.m = std::move(proj.m);
  n.u = divide(n.m, rho_c);
  check_finite(n.u, "velocity");
  energy_bookkeeping(pred.u, n.u, rho_c, mesh, rep);
  return r;
}

StepResult step(const ModelState& s, const Mesh& mesh, const ModelParams& prm) {
  switch (prm.model) {
    case ModelKind::incompressible: return step_incompressible_euler(s, mesh, prm);
    case ModelKind::weakly_compressible: return step_weakly_compressible(s, mesh, prm);
    case ModelKind::mhd: return step_incompressible_mhd(s, mesh, prm);
    case ModelKind::gpr: return step_incompressible_gpr(s, mesh, prm);
  }
  throw ConfigError("unknown model");
}

}  // namespace fvstag
