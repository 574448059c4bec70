#include "fvstag/io.hpp"

#include <cstdio>
#include <sstream>

namespace fvstag {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16g", v);
  return buf;
}

// Mesh files must reproduce coordinates bit for bit.
std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw IOError("cannot open " + path.string() + " for writing");
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out << "FVSTAG-MESH 1\n";
  out << mesh.num_nodes() << ' ' << mesh.num_cells() << ' ' << mesh.periodic_pairs().size() << '\n';
  for (const auto& x : mesh.nodes()) out << exact(x.x) << ' ' << exact(x.y) << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& [a, b] : mesh.periodic_pairs()) out << a << ' ' << b << '\n';
  return out.str();
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << format_mesh(mesh);
  if (!out) throw IOError("write failed: " + path.string());
}

RawMesh parse_mesh(const std::string& text) {
  // strip comments, then read whitespace separated tokens
  std::string body;
  std::istringstream lines(text);
  std::string line;
  bool header = false;
  while (std::getline(lines, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!header) {
      std::istringstream hs(line);
      std::string tag;
      int version = 0;
      hs >> tag >> version;
      if (tag != "FVSTAG-MESH" || version != 1) throw IOError("not an FVSTAG-MESH 1 file");
      header = true;
      continue;
    }
    body += line;
    body += '\n';
  }
  if (!header) throw IOError("empty mesh file");

  std::istringstream in(body);
  long np = -1, nc = -1, npairs = -1;
  if (!(in >> np >> nc >> npairs) || np < 0 || nc < 0 || npairs < 0) throw IOError("bad mesh counts");
  RawMesh raw;
  raw.nodes.resize(np);
  for (auto& x : raw.nodes)
    if (!(in >> x.x >> x.y)) throw IOError("truncated node list");
  raw.triangles.resize(nc);
  for (auto& t : raw.triangles) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw IOError("truncated triangle list");
    for (int v : t)
      if (v < 0 || v >= np) throw IOError("triangle references node " + std::to_string(v));
  }
  raw.periodic_pairs.resize(npairs);
  for (auto& [a, b] : raw.periodic_pairs) {
    if (!(in >> a >> b)) throw IOError("truncated periodic pair list");
    if (a < 0 || a >= np || b < 0 || b >= np) throw IOError("periodic pair out of range");
  }
  std::string extra;
  if (in >> extra) throw IOError("trailing data in mesh file");
  return raw;
}

RawMesh read_mesh_raw(const std::filesystem::path& path) { return parse_mesh(slurp(path)); }

Mesh read_mesh(const std::filesystem::path& path) { return Mesh::from_raw(read_mesh_raw(path)); }

std::string format_vtk(const Mesh& mesh, const ModelState& s, const std::string& title) {
  const auto np = mesh.num_nodes();
  const auto nc = mesh.num_cells();
  std::ostringstream out;
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << np << " double\n";
  for (const auto& x : mesh.nodes()) out << num(x.x) << ' ' << num(x.y) << " 0\n";
  out << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) out << "5\n";

  auto scalar = [&](const char* name, const NodeScalarField& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < f.size(); ++i) out << num(f[i]) << '\n';
  };
  auto vector = [&](const std::string& name, auto&& get) {
    out << "VECTORS " << name << " double\n";
    for (std::size_t c = 0; c < nc; ++c) {
      const Vec3 v = get(c);
      out << num(v.x) << ' ' << num(v.y) << ' ' << num(v.z) << '\n';
    }
  };

  if (s.p.size() == np) {
    out << "POINT_DATA " << np << '\n';
    scalar("p", s.p);
    if (s.rho_node.size() == np) scalar("rho", s.rho_node);
  }
  if (s.u.size() == nc) {
    out << "CELL_DATA " << nc << '\n';
    vector("u", [&](std::size_t c) { return s.u[c]; });
    if (s.B.size() == nc) vector("B", [&](std::size_t c) { return s.B[c]; });
    if (s.A.size() == nc)
      for (int r = 0; r < 3; ++r)
        vector("A" + std::to_string(r + 1), [&](std::size_t c) { return s.A[c].row(r); });
  }
  return out.str();
}

void write_vtk(const Mesh& mesh, const ModelState& s, const std::filesystem::path& path, const std::string& title) {
  auto out = open_out(path);
  out << format_vtk(mesh, s, title);
  if (!out) throw IOError("write failed: " + path.string());
}

SeriesColumns series_columns(const ModelParams& prm) {
  SeriesColumns c;
  c.emag = c.div_b = prm.model == ModelKind::mhd;
  c.curl_a = prm.model == ModelKind::gpr;
  return c;
}

std::string timeseries_header(const SeriesColumns& cols) {
  std::string active = "Ekin,mom_x,mom_y,div_u_L2";
  if (cols.emag) active += ",Emag";
  if (cols.div_b) active += ",div_B_L2";
  if (cols.curl_a) active += ",curl_A_L2";
  return "# active: " + active + "\nstep,time,dt,Ekin,Emag,mom_x,mom_y,div_u_L2,div_B_L2,curl_A_L2,cg_iters\n";
}

std::string timeseries_line(const TimeSeriesRow& r) {
  const auto& d = r.diag;
  std::ostringstream out;
  out << r.step << ',' << num(r.time) << ',' << num(r.dt) << ',' << num(d.ekin) << ',' << num(d.emag) << ','
      << num(d.momentum.x) << ',' << num(d.momentum.y) << ',' << num(d.div_u_l2) << ',' << num(d.div_b_l2) << ','
      << num(d.curl_a_l2) << ',' << r.cg_iters << '\n';
  return out.str();
}

TimeSeriesWriter::TimeSeriesWriter(const std::filesystem::path& path, const SeriesColumns& cols)
    : path_(path), out_(open_out(path)) {
  out_ << timeseries_header(cols);
}

void TimeSeriesWriter::append(const TimeSeriesRow& row) {
  out_ << timeseries_line(row);
  out_.flush();
  if (!out_) throw IOError("write failed: " + path_.string());
}

void write_timeseries(const std::filesystem::path& path, const std::vector<TimeSeriesRow>& rows,
                      const SeriesColumns& cols) {
  TimeSeriesWriter w(path, cols);
  for (const auto& r : rows) w.append(r);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IOError("write failed: " + path.string());
}

}  // namespace fvstag
