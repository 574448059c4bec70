#include "fvstag/models.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "fvstag/parallel.hpp"

namespace fvstag {

std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::incompressible: return "incompressible";
    case ModelKind::weakly_compressible: return "weakly-compressible";
    case ModelKind::mhd: return "mhd";
    case ModelKind::gpr: return "gpr";
  }
  return "?";
}

std::string_view to_string(ViscosityMode v) {
  switch (v) {
    case ViscosityMode::none: return "none";
    case ViscosityMode::explicit_stress: return "explicit";
    case ViscosityMode::implicit_stress: return "implicit";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  if (name == "euler-incomp" || name == "ns-incomp" || name == "incompressible") return ModelKind::incompressible;
  if (name == "euler-wc" || name == "ns-wc" || name == "weakly-compressible") return ModelKind::weakly_compressible;
  if (name == "mhd" || name == "mhd-incomp") return ModelKind::mhd;
  if (name == "gpr" || name == "gpr-incomp") return ModelKind::gpr;
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

ViscosityMode parse_viscosity(std::string_view name) {
  if (name == "none") return ViscosityMode::none;
  if (name == "explicit") return ViscosityMode::explicit_stress;
  if (name == "implicit") return ViscosityMode::implicit_stress;
  throw ConfigError("unknown viscosity mode '" + std::string(name) + "'");
}

void ModelParams::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (model == ModelKind::weakly_compressible && !(c0 > 0.0)) throw ConfigError("c0 must be positive");
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  if (mu < 0.0) throw ConfigError("mu must be non-negative");
  if (cs < 0.0) throw ConfigError("cs must be non-negative");
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  if (dt_max && !(*dt_max > 0.0)) throw ConfigError("dt_max must be positive");
  if (!(cg_tol > 0.0)) throw ConfigError("cg tolerance must be positive");
  if (viscosity != ViscosityMode::none && !(mu > 0.0)) throw ConfigError("viscous mode requires mu > 0");
}

CellScalarField cell_density(const ModelState& s, const Mesh& mesh, const ModelParams& prm) {
  if (prm.model == ModelKind::weakly_compressible) return average_node_to_cell(s.rho_node, mesh);
  return CellScalarField(mesh.num_cells(), prm.rho);
}

double explicit_wavespeed(const ModelState& s, const ModelParams& prm, int c) {
  double lam = 2.0 * norm(s.u[c]);
  if (prm.model == ModelKind::mhd) lam += norm(s.B[c]) / std::sqrt(prm.rho);
  if (prm.model == ModelKind::gpr) lam += 2.0 * prm.cs;
  return lam;
}

double compute_time_step(const ModelState& s, const Mesh& mesh, const ModelParams& prm) {
  double floor = 0.0;
  if (prm.lambda_floor) {
    floor = *prm.lambda_floor;
  } else if (prm.model == ModelKind::weakly_compressible) {
    floor = 0.05 * prm.c0;
  } else {
    const Rect bb = mesh.bounding_box();
    floor = 1e-10 * std::max(bb.width(), bb.height()) / std::max(prm.t_end, 1e-300);
  }
  const auto h = mesh.incircle_diameter();
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double lam = std::max(explicit_wavespeed(s, prm, static_cast<int>(c)), floor);
    if (lam > 0.0) dt = std::min(dt, prm.cfl * h[c] / lam);
  }
  if (prm.viscosity == ViscosityMode::explicit_stress && prm.mu > 0.0) {
    double rho_min = prm.rho;
    if (prm.model == ModelKind::weakly_compressible) {
      rho_min = std::numeric_limits<double>::infinity();
      for (double r : s.rho_node) rho_min = std::min(rho_min, r);
    }
    const double nu = prm.mu / rho_min;
    const double hmin = mesh.min_incircle_diameter();
    dt = std::min(dt, prm.cfl * hmin * hmin / (4.0 * nu));
  }
  if (prm.dt_max) dt = std::min(dt, *prm.dt_max);
  // Split a remainder shorter than two steps evenly instead of ending on a
  // sliver step.
  const double rest = prm.t_end - s.t;
  if (rest > dt && rest < 2.0 * dt) dt = 0.5 * rest;
  dt = std::min(dt, rest);
  if (!(dt > 0.0)) {
    std::ostringstream os;
    os << "non-positive time step " << dt << " at t = " << s.t;
    throw ConfigError(os.str());
  }
  return dt;
}

// ---------------------------------------------------------------------------
// Convective predictor

namespace {

struct Sample {
  Vec3 m;
  Vec3 u;
  Vec3 b;
  Mat3 a;
};

Sample sample_cell(const ModelState& s, int c) {
  Sample q{s.m[c], s.u[c], {}, Mat3::identity()};
  if (s.has_magnetic_field()) q.b = s.B[c];
  if (s.has_distortion()) q.a = s.A[c];
  return q;
}

Sample reflect(Sample q, const Vec3& n) {
  q.m -= 2.0 * dot(q.m, n) * n;
  q.u -= 2.0 * dot(q.u, n) * n;
  return q;
}

Vec3 sample_flux(const ConvectiveFlux& f, const Sample& q, const Vec3& n) {
  Vec3 flux = dot(q.u, n) * q.m;
  if (f.model == ModelKind::mhd) flux += 0.5 * dot(q.b, q.b) * n - dot(q.b, n) * q.b;
  if (f.model == ModelKind::gpr) flux += gpr_stress(q.a, f.rho, f.cs) * n;
  return flux;
}

double sample_speed(const ConvectiveFlux& f, const Sample& q, const Vec3& n) {
  double lam = 2.0 * std::abs(dot(q.u, n));
  if (f.model == ModelKind::mhd) lam += std::abs(dot(q.b, n)) / std::sqrt(f.rho);
  if (f.model == ModelKind::gpr) lam += 2.0 * f.cs;
  return lam;
}

}  // namespace

ConvectiveFlux ConvectiveFlux::for_params(const ModelParams& prm) { return {prm.model, prm.rho, prm.cs}; }

Vec3 ConvectiveFlux::normal_flux(const ModelState& s, int c, const Vec3& n) const {
  return sample_flux(*this, sample_cell(s, c), n);
}

double ConvectiveFlux::wavespeed(const ModelState& s, int c, const Vec3& n) const {
  return sample_speed(*this, sample_cell(s, c), n);
}

CellVectorField convective_predictor(const ModelState& s, const Mesh& mesh, const ConvectiveFlux& flux, double dt,
                                     BoundaryClosure closure) {
  const auto edges = mesh.edges();
  std::vector<Vec3> edge_flux(edges.size());
  std::atomic<std::ptrdiff_t> bad_edge{-1};
  parallel_for(static_cast<std::ptrdiff_t>(edges.size()), [&](std::ptrdiff_t ei) {
    const Edge& e = edges[ei];
    const Vec3& n = e.normal;
    const Sample ql = sample_cell(s, e.left);
    Sample qr;
    if (e.right >= 0) {
      qr = sample_cell(s, e.right);
    } else if (closure == BoundaryClosure::wall) {
      qr = reflect(ql, n);
    } else {
      qr = ql;
    }
    const double smax = std::max(sample_speed(flux, ql, n), sample_speed(flux, qr, n));
    Vec3 f = 0.5 * (sample_flux(flux, ql, n) + sample_flux(flux, qr, n)) - 0.5 * smax * (qr.m - ql.m);
    if (!std::isfinite(f.x) || !std::isfinite(f.y) || !std::isfinite(f.z)) bad_edge.store(ei);
    edge_flux[ei] = e.length * f;
  });
  if (const std::ptrdiff_t ei = bad_edge.load(); ei >= 0) {
    std::ostringstream os;
    os << "non-finite Rusanov flux on edge " << ei << " (cells " << edges[ei].left << ", " << edges[ei].right << ")";
    throw NumericalError(os.str());
  }

  CellVectorField out(mesh.num_cells());
  const auto area = mesh.cell_area();
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_cells()), [&](std::ptrdiff_t ci) {
    const int c = static_cast<int>(ci);
    Vec3 acc;
    for (int k = 0; k < 3; ++k) {
      const int ei = mesh.cell_edge(c, k);
      const Edge& e = edges[ei];
      if (e.left == c && e.left_local == k)
        acc += edge_flux[ei];
      else
        acc -= edge_flux[ei];
    }
    out[c] = s.m[c] - (dt / area[c]) * acc;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Stresses

NodeTensorField viscous_stress_nodes(const CellVectorField& u, double mu, const Mesh& mesh, BoundaryClosure closure,
                                     bool full_deviatoric) {
  NodeTensorField g = gradient_dual(u, mesh, closure);
  for (Mat3& t : g) {
    const double div = t.trace();
    Mat3 s = t + t.transposed();
    if (full_deviatoric) s -= (2.0 / 3.0) * div * Mat3::identity();
    t = -mu * s;
  }
  return g;
}

Mat3 gpr_stress(const Mat3& a, double rho, double cs) {
  const Mat3 g = a.transposed() * a;
  const Mat3 dev = g - (g.trace() / 3.0) * Mat3::identity();
  return (rho * cs * cs) * (g * dev);
}

LinearOperator viscous_operator(const CellScalarField& rho_c, double dt, double mu, const Mesh& mesh,
                                bool full_deviatoric) {
  const std::size_t nc = mesh.num_cells();
  LinearOperator op;
  op.size = 2 * nc;
  op.weights.resize(2 * nc);
  const auto area = mesh.cell_area();
  for (std::size_t c = 0; c < nc; ++c) op.weights[2 * c] = op.weights[2 * c + 1] = area[c];
  op.apply = [&mesh, rho_c, dt, mu, full_deviatoric](std::span<const double> x, std::span<double> y) {
    const std::size_t n = mesh.num_cells();
    CellVectorField u(n);
    for (std::size_t c = 0; c < n; ++c) u[c] = {x[2 * c], x[2 * c + 1], 0.0};
    const NodeTensorField sigma = viscous_stress_nodes(u, mu, mesh, BoundaryClosure::natural, full_deviatoric);
    const CellVectorField div = divergence_primal_tensor(sigma, mesh);
    for (std::size_t c = 0; c < n; ++c) {
      y[2 * c] = rho_c[c] * x[2 * c] + dt * div[c].x;
      y[2 * c + 1] = rho_c[c] * x[2 * c + 1] + dt * div[c].y;
    }
  };
  return op;
}

CellVectorField implicit_viscous_solve(const CellVectorField& m_conv, const CellScalarField& rho_c, double dt,
                                       double mu, const Mesh& mesh, double tol, CGReport* report,
                                       const CellVectorField* initial_guess, bool full_deviatoric) {
  const std::size_t nc = mesh.num_cells();
  CellVectorField u(nc);
  if (mu == 0.0) {
    for (std::size_t c = 0; c < nc; ++c) u[c] = (1.0 / rho_c[c]) * m_conv[c];
    if (report) {
      *report = CGReport{};
      report->converged = true;
    }
    return u;
  }
  if (!mesh.fully_periodic()) throw ConfigError("implicit viscosity requires a fully periodic mesh");
  const LinearOperator op = viscous_operator(rho_c, dt, mu, mesh, full_deviatoric);
  std::vector<double> b(2 * nc), x(2 * nc);
  for (std::size_t c = 0; c < nc; ++c) {
    b[2 * c] = m_conv[c].x;
    b[2 * c + 1] = m_conv[c].y;
    const Vec3 g = initial_guess ? (*initial_guess)[c] : (1.0 / rho_c[c]) * m_conv[c];
    x[2 * c] = g.x;
    x[2 * c + 1] = g.y;
  }
  CGOptions opt;
  opt.tol = tol;
  const CGReport rep = conjugate_gradient(op, b, x, opt);
  if (report) *report = rep;
  if (!acceptable(rep, tol)) {
    std::ostringstream os;
    os << "implicit viscous solve did not converge (residual " << rep.relative_residual << " after "
       << rep.iterations << " iterations)";
    throw SolverError(os.str());
  }
  for (std::size_t c = 0; c < nc; ++c) u[c] = {x[2 * c], x[2 * c + 1], 0.0};
  return u;
}

// ---------------------------------------------------------------------------
// Diagnostics

double kinetic_energy(const CellVectorField& u, const CellScalarField& rho_c, const Mesh& mesh) {
  const auto area = mesh.cell_area();
  double e = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) e += 0.5 * rho_c[c] * area[c] * dot(u[c], u[c]);
  return e;
}

double kinetic_energy(const CellVectorField& u, double rho, const Mesh& mesh) {
  const auto area = mesh.cell_area();
  double e = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) e += 0.5 * rho * area[c] * dot(u[c], u[c]);
  return e;
}

double node_l2(const NodeScalarField& f, const Mesh& mesh) {
  double s = 0.0;
  for (std::size_t u = 0; u < mesh.num_unique_nodes(); ++u) {
    const double v = f[mesh.unique_representative(static_cast<int>(u))];
    s += mesh.dual_area_unique(static_cast<int>(u)) * v * v;
  }
  return std::sqrt(s);
}

double node_l2(const NodeVectorField& f, const Mesh& mesh) {
  double s = 0.0;
  for (std::size_t u = 0; u < mesh.num_unique_nodes(); ++u) {
    const Vec3& v = f[mesh.unique_representative(static_cast<int>(u))];
    s += mesh.dual_area_unique(static_cast<int>(u)) * dot(v, v);
  }
  return std::sqrt(s);
}

Diagnostics diagnostics(const ModelState& s, const Mesh& mesh, const ModelParams& prm) {
  Diagnostics d;
  const CellScalarField rho_c = cell_density(s, mesh, prm);
  d.ekin = kinetic_energy(s.u, rho_c, mesh);
  const auto area = mesh.cell_area();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) d.momentum += area[c] * s.m[c];
  if (prm.model == ModelKind::weakly_compressible) {
    for (std::size_t u = 0; u < mesh.num_unique_nodes(); ++u)
      d.mass += mesh.dual_area_unique(static_cast<int>(u)) * s.rho_node[mesh.unique_representative(static_cast<int>(u))];
  } else {
    d.mass = prm.rho * mesh.total_area();
  }
  d.div_u_l2 = node_l2(divergence_dual(s.u, mesh, prm.closure), mesh);
  if (s.has_magnetic_field()) {
    double em = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) em += 0.5 * area[c] * dot(s.B[c], s.B[c]);
    d.emag = em;
    d.div_b_l2 = node_l2(divergence_dual(s.B, mesh, prm.closure), mesh);
  }
  if (s.has_distortion()) {
    double sq = 0.0;
    for (const NodeVectorField& row : curl_dual_rows(s.A, mesh, prm.closure)) {
      const double n = node_l2(row, mesh);
      sq += n * n;
    }
    d.curl_a_l2 = std::sqrt(sq);
  }
  return d;
}

}  // namespace fvstag
