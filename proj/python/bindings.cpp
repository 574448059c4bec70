#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fvstag/bench.hpp"
#include "fvstag/config.hpp"
#include "fvstag/io.hpp"
#include "fvstag/operators.hpp"
#include "fvstag/verify.hpp"

namespace py = pybind11;
using namespace fvstag;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array xy_array(std::span<const Vec3> v) {
  Array out({static_cast<py::ssize_t>(v.size()), py::ssize_t{2}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < v.size(); ++i) {
    a(i, 0) = v[i].x;
    a(i, 1) = v[i].y;
  }
  return out;
}

Array vec_array(std::span<const Vec3> v) {
  Array out({static_cast<py::ssize_t>(v.size()), py::ssize_t{3}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < v.size(); ++i) {
    a(i, 0) = v[i].x;
    a(i, 1) = v[i].y;
    a(i, 2) = v[i].z;
  }
  return out;
}

Array scalar_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

NodeScalarField node_field(const Mesh& m, const Array& phi) {
  if (phi.ndim() != 1 || static_cast<std::size_t>(phi.shape(0)) != m.num_nodes())
    throw py::value_error("expected one value per mesh node");
  return NodeScalarField(std::vector<double>(phi.data(), phi.data() + phi.size()));
}

CellVectorField cell_vectors(const Mesh& m, const Array& v) {
  if (v.ndim() != 2 || static_cast<std::size_t>(v.shape(0)) != m.num_cells() || v.shape(1) < 2 || v.shape(1) > 3)
    throw py::value_error("expected an (num_cells, 2) or (num_cells, 3) array");
  auto a = v.unchecked<2>();
  CellVectorField out(m.num_cells());
  for (std::size_t c = 0; c < m.num_cells(); ++c) out[c] = {a(c, 0), a(c, 1), v.shape(1) == 3 ? a(c, 2) : 0.0};
  return out;
}

py::dict norms_dict(const ErrorNorms& e) {
  py::dict d;
  d["u"] = e.u;
  d["v"] = e.v;
  d["p"] = e.p;
  if (e.has_b) {
    d["Bx"] = e.bx;
    d["By"] = e.by;
  }
  return d;
}

std::string setting_text(const py::handle& v) {
  if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "true" : "false";
  return py::str(v);
}

py::dict run_case(const std::string& name, const py::kwargs& settings) {
  RunConfig cfg;
  cfg.case_name = name;
  for (const auto& [k, v] : settings) cfg.set(py::str(k), setting_text(v));
  ResolvedRun r = resolve(cfg);
  const Mesh mesh = build_mesh(cfg, r);
  attach_exact_pin(r.spec, mesh, r.prm);

  RunResult res;
  {
    py::gil_scoped_release release;
    RunOptions opt;
    opt.record = false;
    res = run(initial_state(r.spec, mesh, r.prm), mesh, r.prm, opt);
  }
  const ModelState& s = res.state;
  py::dict out;
  out["case"] = r.spec.name;
  out["model"] = std::string(to_string(r.prm.model));
  out["steps"] = s.step;
  out["t"] = s.t;
  out["num_nodes"] = mesh.num_nodes();
  out["num_cells"] = mesh.num_cells();
  out["max_div_u"] = res.max_div_u;
  out["max_div_b"] = res.max_div_b;
  out["max_curl_a"] = res.max_curl_a;
  out["total_cg_iterations"] = res.total_cg_iterations;
  const Diagnostics d = diagnostics(s, mesh, r.prm);
  out["ekin"] = d.ekin;
  out["momentum"] = py::make_tuple(d.momentum.x, d.momentum.y);
  if (const ExactSolution ex = exact_solution(r.spec, r.prm)) out["errors"] = norms_dict(error_norms(s, ex, mesh));
  out["p"] = scalar_array(s.p.span());
  out["u"] = vec_array(s.u.span());
  if (s.has_magnetic_field()) out["B"] = vec_array(s.B.span());
  return out;
}

py::list convergence(const std::string& name, const std::vector<int>& nxs, std::optional<std::string> viscosity,
                     std::optional<double> jitter, std::uint64_t seed) {
  const CaseSpec spec = case_spec(name);
  ConvergenceOptions opt;
  opt.jitter = jitter.value_or(spec.study_jitter);
  opt.seed = seed;
  const std::optional<ViscosityMode> visc = viscosity ? std::optional(parse_viscosity(*viscosity)) : std::nullopt;
  opt.adjust = [visc](ModelParams& p) {
    if (visc) p.viscosity = *visc;
  };
  std::vector<ConvergenceRow> rows;
  {
    py::gil_scoped_release release;
    rows = convergence_study(spec, nxs, opt);
  }
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["nx"] = r.nx;
    d["errors"] = norms_dict(r.err);
    d["orders"] = r.order ? py::object(norms_dict(*r.order)) : py::none();
    d["steps"] = r.steps;
    d["max_div_u"] = r.max_div_u;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_fvstag, m) {
  m.doc() = "Vertex-staggered finite volume solvers on triangular meshes";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<IOError>(m, "IOError", PyExc_OSError);

  py::class_<Mesh>(m, "Mesh")
      .def_static(
          "structured",
          [](int nx, std::optional<int> ny, std::array<double, 4> domain, std::array<bool, 2> periodic,
             double jitter, std::uint64_t seed) {
            StructuredMeshOptions o;
            o.nx = nx;
            o.ny = ny.value_or(nx);
            o.domain = {domain[0], domain[1], domain[2], domain[3]};
            o.periodic_x = periodic[0];
            o.periodic_y = periodic[1];
            o.jitter = jitter;
            o.seed = seed;
            return generate_structured_triangulation(o);
          },
          py::arg("nx"), py::arg("ny") = py::none(), py::arg("domain") = std::array<double, 4>{0.0, 1.0, 0.0, 1.0},
          py::arg("periodic") = std::array<bool, 2>{false, false}, py::arg("jitter") = 0.0, py::arg("seed") = 1)
      .def_static("read", [](const std::string& path) { return read_mesh(path); }, py::arg("path"))
      .def("write", [](const Mesh& mesh, const std::string& path) { write_mesh(mesh, path); }, py::arg("path"))
      .def_property_readonly("num_nodes", &Mesh::num_nodes)
      .def_property_readonly("num_cells", &Mesh::num_cells)
      .def_property_readonly("num_unique_nodes", &Mesh::num_unique_nodes)
      .def_property_readonly("fully_periodic", &Mesh::fully_periodic)
      .def_property_readonly("total_area", &Mesh::total_area)
      .def_property_readonly("nodes", [](const Mesh& mesh) { return xy_array(mesh.nodes()); })
      .def_property_readonly("barycenters", [](const Mesh& mesh) { return xy_array(mesh.cell_barycenter()); })
      .def_property_readonly("cell_area", [](const Mesh& mesh) { return scalar_array(mesh.cell_area()); })
      .def_property_readonly("triangles", [](const Mesh& mesh) {
        py::array_t<int> out({static_cast<py::ssize_t>(mesh.num_cells()), py::ssize_t{3}});
        auto a = out.mutable_unchecked<2>();
        for (std::size_t c = 0; c < mesh.num_cells(); ++c)
          for (int k = 0; k < 3; ++k) a(c, k) = mesh.triangles()[c][k];
        return out;
      });

  m.def(
      "gradient_primal",
      [](const Mesh& mesh, const Array& phi) { return xy_array(gradient_primal(node_field(mesh, phi), mesh).span()); },
      py::arg("mesh"), py::arg("phi"), "Cell gradients of a node field, shape (num_cells, 2).");
  m.def(
      "divergence_dual",
      [](const Mesh& mesh, const Array& v) {
        return scalar_array(divergence_dual(cell_vectors(mesh, v), mesh).span());
      },
      py::arg("mesh"), py::arg("v"), "Node divergence of a cell vector field.");

  m.def("case_names", &case_names);
  m.def(
      "taylor_green_exact",
      [](double x, double y, double t, double nu, double p0) {
        const auto v = taylor_green_exact(x, y, t, nu, p0);
        return py::make_tuple(v.u, v.v, v.p);
      },
      py::arg("x"), py::arg("y"), py::arg("t"), py::arg("nu") = 0.0, py::arg("p0") = -0.5);
  m.def("run_case", &run_case, py::arg("case"),
        "Run a benchmark case to its final time. Keyword settings use the run config keys.");
  m.def("convergence", &convergence, py::arg("case"), py::arg("nx") = std::vector<int>{20, 40, 60, 80, 100},
        py::arg("viscosity") = py::none(), py::arg("jitter") = py::none(), py::arg("seed") = 1);
  m.def(
      "verify_operators",
      [](const std::vector<int>& sizes, const std::vector<double>& jitters, int fields, int probes,
         std::uint64_t seed) {
        const IdentityReport r = verify_operator_identities(sizes, jitters, fields, probes, seed);
        py::dict d;
        d["curl_grad"] = r.curl_grad;
        d["div_curl"] = r.div_curl;
        d["sbp"] = r.sbp;
        d["pass"] = r.pass();
        return d;
      },
      py::arg("sizes") = std::vector<int>{8, 16, 32}, py::arg("jitters") = std::vector<double>{0.0, 0.2},
      py::arg("fields") = 50, py::arg("probes") = 20, py::arg("seed") = 7);
}
