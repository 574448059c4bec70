#include "fvstag/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace fvstag {

namespace {

constexpr double kPi = std::numbers::pi;

Rect square(double a, double b) { return Rect{a, b, a, b}; }

// Gresho vortex azimuthal speed and pressure offset from p0.
double gresho_speed(double r) {
  if (r < 0.2) return 5.0 * r;
  if (r < 0.4) return 2.0 - 5.0 * r;
  return 0.0;
}

double gresho_pressure(double r, double p0) {
  if (r < 0.2) return p0 + 12.5 * r * r;
  if (r < 0.4) return p0 + 12.5 * r * r + 4.0 * (1.0 - 5.0 * r) + 4.0 * std::log(5.0 * r);
  return p0 - 2.0 + 4.0 * std::log(2.0);
}

double mhd_pressure(double r2) { return 1.0 + 0.5 * std::exp(1.0) - 0.5 * r2 * std::exp(1.0 - r2); }

}  // namespace

const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names{"taylor-green", "taylor-green-ns", "sod",
                                              "gresho",       "mhd-vortex",      "solid-rotor"};
  return names;
}

CaseSpec case_spec(const std::string& name) {
  CaseSpec s;
  s.name = name;
  if (name == "taylor-green") {
    s.domain = square(0.0, 2.0 * kPi);
    // The flow never rests, so the CFL rule needs no floor.
    s.lambda_floor = 1e-8;
  } else if (name == "taylor-green-ns") {
    s.domain = square(0.0, 2.0 * kPi);
    s.mu = 1.0;
    s.viscosity = ViscosityMode::explicit_stress;
    // The flow decays; without a floor the implicit variant takes ever larger
    // steps once it has died out.
    s.lambda_floor = 0.05;
  } else if (name == "sod") {
    s.domain = square(-1.0, 1.0);
    s.periodic_x = false;
    s.model = ModelKind::weakly_compressible;
    s.c0 = 1.0;
    // Starts at rest; the acoustic speed bounds the step so the first steps
    // resolve the wave fronts.
    s.lambda_floor = 1.0;
  } else if (name == "gresho") {
    s.domain = square(-0.5, 0.5);
    s.model = ModelKind::weakly_compressible;
    s.c0 = 10.0;
    // The explicit convective part of the compressible stepper goes unstable
    // on this case for CFL >= 0.8.
    s.cfl = 0.5;
  } else if (name == "mhd-vortex") {
    s.domain = square(-5.0, 5.0);
    s.model = ModelKind::mhd;
    // On the unperturbed lattice the coarsest pressure errors sit in a
    // pre-asymptotic regime; perturbed meshes behave like the unstructured ones.
    s.study_jitter = 0.2;
  } else if (name == "solid-rotor") {
    s.domain = square(-1.0, 1.0);
    s.model = ModelKind::gpr;
    s.cs = 0.25;
    s.radius = 0.2;
    // The sampled rotation is not discretely solenoidal.
    s.project_initial = true;
  } else {
    throw ConfigError("unknown case '" + name + "'");
  }
  return s;
}

Mesh make_case_mesh(const CaseSpec& spec, int nx, int ny, double jitter, std::uint64_t seed) {
  StructuredMeshOptions o;
  o.nx = nx;
  o.ny = ny;
  o.domain = spec.domain;
  o.periodic_x = spec.periodic_x;
  o.periodic_y = spec.periodic_y;
  o.jitter = jitter;
  o.seed = seed;
  return generate_structured_triangulation(o);
}

TaylorGreenValue taylor_green_exact(double x, double y, double t, double nu, double p0) {
  const double fu = std::exp(-2.0 * nu * t);
  const double fp = std::exp(-4.0 * nu * t);
  return {std::sin(x) * std::cos(y) * fu, -std::cos(x) * std::sin(y) * fu,
          p0 + 0.25 * (std::cos(2.0 * x) + std::cos(2.0 * y)) * fp};
}

ExactSolution exact_solution(const CaseSpec& spec, const ModelParams& prm) {
  if (spec.name == "taylor-green" || spec.name == "taylor-green-ns") {
    const double nu = prm.mu / prm.rho;
    const double p0 = prm.model == ModelKind::weakly_compressible ? prm.c0 * prm.c0 : -0.5;
    return [nu, p0](const Vec3& x, double t) {
      const TaylorGreenValue v = taylor_green_exact(x.x, x.y, t, nu, p0);
      return ExactValue{{v.u, v.v, 0.0}, v.p, {}};
    };
  }
  if (spec.name == "gresho") {
    const double p0 = prm.c0 * prm.c0;
    return [p0](const Vec3& x, double) {
      const double r = std::hypot(x.x, x.y);
      const double w = r > 0.0 ? gresho_speed(r) / r : 0.0;
      return ExactValue{{-w * x.y, w * x.x, 0.0}, gresho_pressure(r, p0), {}};
    };
  }
  if (spec.name == "mhd-vortex") {
    return [](const Vec3& x, double) {
      const double r2 = x.x * x.x + x.y * x.y;
      const double e = std::exp(0.5 * (1.0 - r2));
      return ExactValue{{-e * x.y, e * x.x, 0.0}, mhd_pressure(r2), {e * x.y, -e * x.x, 0.0}};
    };
  }
  return {};
}

ModelParams case_params(const CaseSpec& spec) {
  ModelParams p;
  p.model = spec.model;
  p.c0 = spec.c0;
  p.mu = spec.mu;
  p.cs = spec.cs;
  p.cfl = spec.cfl;
  p.viscosity = spec.viscosity;
  p.t_end = spec.t_end;
  p.closure = spec.closure;
  p.lambda_floor = spec.lambda_floor;
  if (spec.name == "solid-rotor") p.pin_value = [](double) { return 1.0; };
  return p;
}

void attach_exact_pin(const CaseSpec& spec, const Mesh& mesh, ModelParams& prm) {
  if (prm.model == ModelKind::weakly_compressible || prm.pin_value) return;
  const ExactSolution ex = exact_solution(spec, prm);
  if (!ex) return;
  const Vec3 x = mesh.nodes()[mesh.unique_representative(mesh.unique_index(prm.pin_node))];
  prm.pin_value = [ex, x](double t) { return ex(x, t).p; };
}

ModelState init_case(const CaseSpec& spec, const Mesh& mesh, const ModelParams& prm) {
  ModelState s;
  const std::size_t np = mesh.num_nodes();
  const std::size_t nc = mesh.num_cells();
  // Periodic copies carry unwrapped coordinates; sample every node at its
  // canonical copy so identified nodes hold equal values.
  std::vector<Vec3> nodes(np);
  for (std::size_t i = 0; i < np; ++i)
    nodes[i] = mesh.nodes()[mesh.unique_representative(mesh.unique_index(static_cast<int>(i)))];
  const auto bary = mesh.cell_barycenter();
  s.p = NodeScalarField(np);
  s.u = CellVectorField(nc);
  const bool wc = prm.model == ModelKind::weakly_compressible;
  const double c2 = prm.c0 * prm.c0;

  if (spec.name == "sod") {
    for (std::size_t i = 0; i < np; ++i) s.p[i] = c2 * (nodes[i].x <= 0.0 ? 1.0 : 0.125);
  } else if (spec.name == "solid-rotor") {
    for (std::size_t i = 0; i < np; ++i) s.p[i] = 1.0;
    for (std::size_t c = 0; c < nc; ++c) {
      const Vec3& x = bary[c];
      if (std::hypot(x.x, x.y) <= spec.radius) s.u[c] = {-x.y / spec.radius, x.x / spec.radius, 0.0};
    }
    s.A = CellTensorField(nc, Mat3::identity());
  } else {
    const ExactSolution ex = exact_solution(spec, prm);
    if (!ex) throw ConfigError("case '" + spec.name + "' has no initial data");
    for (std::size_t i = 0; i < np; ++i) s.p[i] = ex(nodes[i], 0.0).p;
    for (std::size_t c = 0; c < nc; ++c) s.u[c] = ex(bary[c], 0.0).u;
    if (spec.name == "mhd-vortex") {
      NodeVectorField a(np);
      for (std::size_t i = 0; i < np; ++i) {
        const double r2 = nodes[i].x * nodes[i].x + nodes[i].y * nodes[i].y;
        a[i] = {0.0, 0.0, -std::exp(0.5 * (1.0 - r2))};
      }
      s.B = curl_primal(a, mesh);
    }
  }

  if (wc) {
    s.rho_node = NodeScalarField(np);
    for (std::size_t i = 0; i < np; ++i) s.rho_node[i] = s.p[i] / c2;
  }
  const CellScalarField rho_c = cell_density(s, mesh, prm);
  s.m = CellVectorField(nc);
  for (std::size_t c = 0; c < nc; ++c) s.m[c] = rho_c[c] * s.u[c];
  return s;
}

ModelState initial_state(const CaseSpec& spec, const Mesh& mesh, const ModelParams& prm) {
  ModelState s = init_case(spec, mesh, prm);
  if (spec.project_initial) project_initial_velocity(s, mesh, prm);
  return s;
}

ErrorNorms error_norms(const ModelState& s, const ExactSolution& exact, const Mesh& mesh) {
  ErrorNorms e;
  const auto bary = mesh.cell_barycenter();
  const auto area = mesh.cell_area();
  e.has_b = s.has_magnetic_field();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const ExactValue v = exact(bary[c], s.t);
    e.u += area[c] * std::pow(s.u[c].x - v.u.x, 2);
    e.v += area[c] * std::pow(s.u[c].y - v.u.y, 2);
    if (e.has_b) {
      e.bx += area[c] * std::pow(s.B[c].x - v.b.x, 2);
      e.by += area[c] * std::pow(s.B[c].y - v.b.y, 2);
    }
  }
  const auto nodes = mesh.nodes();
  for (std::size_t u = 0; u < mesh.num_unique_nodes(); ++u) {
    const int rep = mesh.unique_representative(static_cast<int>(u));
    const double d = s.p[rep] - exact(nodes[rep], s.t).p;
    e.p += mesh.dual_area_unique(static_cast<int>(u)) * d * d;
  }
  e.u = std::sqrt(e.u);
  e.v = std::sqrt(e.v);
  e.p = std::sqrt(e.p);
  e.bx = std::sqrt(e.bx);
  e.by = std::sqrt(e.by);
  return e;
}

RiemannProfile riemann_reference_1d(double rho_l, double rho_r, double c0, double t, const std::vector<double>& samples,
                                    int cells, double x0, double x1) {
  const int n = std::max(cells, 2);
  const double dx = (x1 - x0) / n;
  const double c2 = c0 * c0;
  std::vector<double> rho(n), mom(n, 0.0);
  for (int i = 0; i < n; ++i) rho[i] = x0 + (i + 0.5) * dx <= 0.0 ? rho_l : rho_r;

  std::vector<double> f_rho(n + 1), f_mom(n + 1);
  double time = 0.0;
  while (time < t) {
    double smax = 0.0;
    for (int i = 0; i < n; ++i) smax = std::max(smax, std::abs(mom[i] / rho[i]) + c0);
    double dt = 0.5 * dx / smax;
    if (time + dt > t) dt = t - time;
    for (int f = 0; f <= n; ++f) {
      const int l = std::max(f - 1, 0);
      const int r = std::min(f, n - 1);
      const double ul = mom[l] / rho[l], ur = mom[r] / rho[r];
      const double s = std::max(std::abs(ul), std::abs(ur)) + c0;
      f_rho[f] = 0.5 * (mom[l] + mom[r]) - 0.5 * s * (rho[r] - rho[l]);
      f_mom[f] = 0.5 * (mom[l] * ul + c2 * rho[l] + mom[r] * ur + c2 * rho[r]) - 0.5 * s * (mom[r] - mom[l]);
    }
    for (int i = 0; i < n; ++i) {
      rho[i] -= dt / dx * (f_rho[i + 1] - f_rho[i]);
      mom[i] -= dt / dx * (f_mom[i + 1] - f_mom[i]);
    }
    time += dt;
  }

  RiemannProfile out;
  out.x = samples;
  out.rho.reserve(samples.size());
  out.mom.reserve(samples.size());
  for (double x : samples) {
    const int i = std::clamp(static_cast<int>(std::floor((x - x0) / dx)), 0, n - 1);
    out.rho.push_back(rho[i]);
    out.mom.push_back(mom[i]);
  }
  return out;
}

RunResult run(ModelState state, const Mesh& mesh, const ModelParams& prm_in, const RunOptions& opt) {
  prm_in.validate();
  ModelParams prm = prm_in;
  RunResult res;
  auto make_row = [&](const ModelState& s, const StepReport* rep) {
    TimeSeriesRow row;
    row.step = s.step;
    row.time = s.t;
    row.diag = diagnostics(s, mesh, prm);
    if (rep) {
      row.dt = rep->dt;
      row.cg_iters = rep->cg_iterations + rep->viscous_cg_iterations;
      row.ekin_star = rep->ekin_star;
      row.ekin_projected = rep->ekin_projected;
      row.projection_dissipation = rep->projection_dissipation;
    }
    return row;
  };

  {
    const TimeSeriesRow row0 = make_row(state, nullptr);
    if (opt.observer) opt.observer(state, row0);
    if (opt.record) res.rows.push_back(row0);
  }
  const double eps = 1e-12 * std::max(1.0, std::abs(prm.t_end));
  while (prm.t_end - state.t > eps) {
    if (opt.max_steps > 0 && state.step >= opt.max_steps) break;
    StepResult sr = step(state, mesh, prm);
    state = std::move(sr.state);
    if (prm.t_end - state.t <= eps) state.t = prm.t_end;
    const TimeSeriesRow row = make_row(state, &sr.report);
    res.total_cg_iterations += row.cg_iters;
    res.max_div_u = std::max(res.max_div_u, row.diag.div_u_l2);
    res.max_div_b = std::max(res.max_div_b, row.diag.div_b_l2);
    res.max_curl_a = std::max(res.max_curl_a, row.diag.curl_a_l2);
    res.viscous_cg_ok = res.viscous_cg_ok && sr.report.viscous_cg_converged;
    if (prm.model != ModelKind::weakly_compressible)
      res.max_energy_increase = std::max(res.max_energy_increase, sr.report.ekin_projected - sr.report.ekin_star);
    if (opt.observer) opt.observer(state, row);
    if (opt.record) res.rows.push_back(row);
  }
  res.state = std::move(state);
  return res;
}

void project_initial_velocity(ModelState& s, const Mesh& mesh, const ModelParams& prm) {
  const ProjectionResult pr = pressure_projection(s.m, NodeScalarField(mesh.num_nodes()), mesh, 1.0, [&] {
    ModelParams q = prm;
    q.pin_value = nullptr;
    return q;
  }(), s.t);
  const CellScalarField rho_c = cell_density(s, mesh, prm);
  s.m = pr.m;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) s.u[c] = (1.0 / rho_c[c]) * s.m[c];
}

double observed_order(double e_prev, double e_cur, int nx_prev, int nx_cur) {
  return std::log(e_prev / e_cur) / std::log(static_cast<double>(nx_cur) / nx_prev);
}

std::vector<ConvergenceRow> convergence_study(const CaseSpec& spec, const std::vector<int>& nxs,
                                              const ConvergenceOptions& opt) {
  if (nxs.size() < 2) throw ConfigError("convergence study needs at least two resolutions");
  std::vector<ConvergenceRow> rows;
  for (int nx : nxs) {
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh mesh = make_case_mesh(spec, nx, nx, opt.jitter, opt.seed);
    ModelParams prm = case_params(spec);
    if (opt.adjust) opt.adjust(prm);
    attach_exact_pin(spec, mesh, prm);
    const ExactSolution ex = exact_solution(spec, prm);
    if (!ex) throw ConfigError("case '" + spec.name + "' has no exact solution");
    ModelState s = initial_state(spec, mesh, prm);
    RunOptions ro;
    ro.record = false;
    const RunResult rr = run(std::move(s), mesh, prm, ro);
    ConvergenceRow row;
    row.nx = nx;
    row.err = error_norms(rr.state, ex, mesh);
    row.steps = rr.state.step;
    row.max_div_u = rr.max_div_u;
    row.max_div_b = rr.max_div_b;
    row.max_energy_increase = rr.max_energy_increase;
    row.viscous_cg_ok = rr.viscous_cg_ok;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!rows.empty()) {
      const ConvergenceRow& prev = rows.back();
      ErrorNorms o;
      o.u = observed_order(prev.err.u, row.err.u, prev.nx, nx);
      o.v = observed_order(prev.err.v, row.err.v, prev.nx, nx);
      o.p = observed_order(prev.err.p, row.err.p, prev.nx, nx);
      o.has_b = row.err.has_b;
      if (o.has_b) {
        o.bx = observed_order(prev.err.bx, row.err.bx, prev.nx, nx);
        o.by = observed_order(prev.err.by, row.err.by, prev.nx, nx);
      }
      row.order = o;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  const bool has_b = !rows.empty() && rows.front().err.has_b;
  os << "nx,L2_u,order_u,L2_v,order_v,L2_p,order_p";
  if (has_b) os << ",L2_Bx,order_Bx,L2_By,order_By";
  os << '\n';
  os << std::setprecision(6) << std::scientific;
  auto ord = [&](const ConvergenceRow& r, double ErrorNorms::*f) {
    std::ostringstream o;
    if (r.order)
      o << std::fixed << std::setprecision(3) << (*r.order).*f;
    else
      o << '-';
    return o.str();
  };
  for (const ConvergenceRow& r : rows) {
    os << r.nx << ',' << r.err.u << ',' << ord(r, &ErrorNorms::u) << ',' << r.err.v << ',' << ord(r, &ErrorNorms::v)
       << ',' << r.err.p << ',' << ord(r, &ErrorNorms::p);
    if (has_b) os << ',' << r.err.bx << ',' << ord(r, &ErrorNorms::bx) << ',' << r.err.by << ',' << ord(r, &ErrorNorms::by);
    os << '\n';
  }
  return os.str();
}

std::vector<Verdict> structure_report(const std::vector<TimeSeriesRow>& rows, const StructureLimits& lim, bool has_b,
                                      bool has_a) {
  double div_u = 0.0, div_b = 0.0, curl_a = 0.0, energy = -1e300;
  for (const TimeSeriesRow& r : rows) {
    if (r.step == 0) continue;
    div_u = std::max(div_u, r.diag.div_u_l2);
    div_b = std::max(div_b, r.diag.div_b_l2);
    curl_a = std::max(curl_a, r.diag.curl_a_l2);
    energy = std::max(energy, r.ekin_projected - r.ekin_star);
  }
  if (rows.size() < 2) energy = 0.0;
  std::vector<Verdict> v;
  v.push_back({"div_u_L2", div_u, lim.div_u, div_u <= lim.div_u});
  if (has_b) v.push_back({"div_B_L2", div_b, lim.div_b, div_b <= lim.div_b});
  if (has_a) v.push_back({"curl_A_L2", curl_a, lim.curl_a, curl_a <= lim.curl_a});
  v.push_back({"projection_energy_increase", energy, lim.energy_slack, energy <= lim.energy_slack});
  return v;
}

std::string structure_csv(const std::vector<Verdict>& v) {
  std::ostringstream os;
  os << "check,value,limit,verdict\n" << std::setprecision(6) << std::scientific;
  for (const Verdict& x : v) os << x.check << ',' << x.value << ',' << x.limit << ',' << (x.pass ? "pass" : "fail") << '\n';
  return os.str();
}

double loglog_slope(const std::vector<ApPoint>& pts) {
  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const ApPoint& p : pts) {
    const double x = std::log(p.c0), y = std::log(p.div_u);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ApSweep ap_sweep(int nx, const std::vector<double>& c0s, double jitter, std::uint64_t seed) {
  CaseSpec spec = case_spec("taylor-green");
  spec.model = ModelKind::weakly_compressible;
  const Mesh mesh = make_case_mesh(spec, nx, nx, jitter, seed);
  ApSweep out;
  for (double c0 : c0s) {
    spec.c0 = c0;
    const ModelParams prm = case_params(spec);
    RunOptions ro;
    ro.record = false;
    const RunResult rr = run(initial_state(spec, mesh, prm), mesh, prm, ro);
    out.points.push_back({c0, diagnostics(rr.state, mesh, prm).div_u_l2});
  }
  if (out.points.size() >= 2) out.slope = loglog_slope(out.points);
  return out;
}

SodComparison compare_sod(const ModelState& s, const Mesh& mesh, const CaseSpec& spec, int nx) {
  SodComparison cmp;
  const Rect d = spec.domain;
  const double dx = d.width() / (nx - 1);
  cmp.dx = dx;
  const auto nodes = mesh.nodes();

  // Nodal density averaged over each lattice column.
  std::vector<double> rho_sum(nx, 0.0), ref_sum(nx, 0.0), xs;
  std::vector<int> count(nx, 0);
  std::vector<int> col_of;
  for (std::size_t u = 0; u < mesh.num_unique_nodes(); ++u) xs.push_back(nodes[mesh.unique_representative(static_cast<int>(u))].x);
  const RiemannProfile ref_nodes = riemann_reference_1d(1.0, 0.125, spec.c0, s.t, xs, 20000, d.x0, d.x1);
  for (std::size_t u = 0; u < mesh.num_unique_nodes(); ++u) {
    const int rep = mesh.unique_representative(static_cast<int>(u));
    const int col = std::clamp(static_cast<int>(std::lround((nodes[rep].x - d.x0) / dx)), 0, nx - 1);
    rho_sum[col] += s.rho_node[rep];
    ref_sum[col] += ref_nodes.rho[u];
    ++count[col];
  }
  for (int i = 0; i < nx; ++i) {
    if (count[i] == 0) continue;
    cmp.x.push_back(d.x0 + i * dx);
    cmp.rho.push_back(rho_sum[i] / count[i]);
    cmp.rho_ref.push_back(ref_sum[i] / count[i]);
    // End columns carry half a cell of width.
    const double w = (i == 0 || i == nx - 1) ? 0.5 * dx : dx;
    cmp.l1_rho += w * std::abs(cmp.rho.back() - cmp.rho_ref.back());
  }

  // Cell momentum averaged over columns of cells.
  const auto bary = mesh.cell_barycenter();
  const auto area = mesh.cell_area();
  std::vector<double> bx;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) bx.push_back(bary[c].x);
  const RiemannProfile ref_cells = riemann_reference_1d(1.0, 0.125, spec.c0, s.t, bx, 20000, d.x0, d.x1);
  std::vector<double> m_sum(nx - 1, 0.0), mref_sum(nx - 1, 0.0), a_sum(nx - 1, 0.0);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int col = std::clamp(static_cast<int>(std::floor((bary[c].x - d.x0) / dx)), 0, nx - 2);
    m_sum[col] += area[c] * s.m[c].x;
    mref_sum[col] += area[c] * ref_cells.mom[c];
    a_sum[col] += area[c];
  }
  for (int i = 0; i < nx - 1; ++i)
    if (a_sum[i] > 0.0) cmp.l1_mom += dx * std::abs(m_sum[i] - mref_sum[i]) / a_sum[i];

  // Shock position: the rightmost crossing of the level halfway between the
  // post-shock plateau and the undisturbed right state.
  std::vector<double> fine_x;
  const int nf = 20000;
  for (int i = 0; i < nf; ++i) fine_x.push_back(d.x0 + (i + 0.5) * d.width() / nf);
  const RiemannProfile fine = riemann_reference_1d(1.0, 0.125, spec.c0, s.t, fine_x, nf, d.x0, d.x1);
  int jump = nf / 2;
  double best = 0.0;
  for (int i = nf / 2; i + 1 < nf; ++i) {
    const double g = fine.rho[i] - fine.rho[i + 1];
    if (g > best) {
      best = g;
      jump = i;
    }
  }
  const double plateau_x = fine_x[jump] - 0.05;
  const double plateau = fine.rho[std::clamp(static_cast<int>((plateau_x - d.x0) / d.width() * nf), 0, nf - 1)];
  const double level = 0.5 * (plateau + 0.125);
  auto crossing = [&](const std::vector<double>& x, const std::vector<double>& r) {
    for (std::size_t i = r.size() - 1; i > 0; --i) {
      if (r[i - 1] >= level && r[i] < level) return x[i - 1] + (r[i - 1] - level) / (r[i - 1] - r[i]) * (x[i] - x[i - 1]);
    }
    return x.front();
  };
  cmp.shock_x_ref = crossing(fine_x, fine.rho);
  cmp.shock_x = crossing(cmp.x, cmp.rho);
  return cmp;
}

double gresho_seam_jump(const Mesh& mesh, const NodeScalarField& p) {
  const auto nodes = mesh.nodes();
  const auto& tris = mesh.triangles();
  double worst = 0.0;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      const double ra = std::hypot(nodes[a].x, nodes[a].y);
      const double rb = std::hypot(nodes[b].x, nodes[b].y);
      for (double seam : {0.2, 0.4}) {
        if ((ra - seam) * (rb - seam) < 0.0) worst = std::max(worst, std::abs(p[a] - p[b]));
      }
    }
  }
  return worst;
}

}  // namespace fvstag
