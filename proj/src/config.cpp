#include "fvstag/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fvstag/io.hpp"

namespace fvstag {

namespace {

std::string normalize(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) throw ConfigError("bad number for " + key + ": '" + v + "'");
  return out;
}

template <class I>
I to_int(const std::string& key, const std::string& v) {
  I out{};
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) throw ConfigError("bad integer for " + key + ": '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("bad flag for " + key + ": '" + v + "'");
}

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k{"case", "model",  "nx",          "ny",      "cfl",         "t_end",
                                          "c0",   "mu",     "cs",          "viscosity", "cg_tol",    "cg_max_iter",
                                          "jacobi", "jitter", "seed",      "out",     "write_every", "deterministic",
                                          "dt_max", "mesh"};
  return k;
}

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = normalize(trim(raw_key));
  const std::string v = trim(raw_value);
  if (key == "case") case_name = v;
  else if (key == "model") model = v;
  else if (key == "nx") nx = to_int<int>(key, v);
  else if (key == "ny") ny = to_int<int>(key, v);
  else if (key == "cfl") cfl = to_double(key, v);
  else if (key == "t_end") t_end = to_double(key, v);
  else if (key == "c0") c0 = to_double(key, v);
  else if (key == "mu") mu = to_double(key, v);
  else if (key == "cs") cs = to_double(key, v);
  else if (key == "viscosity") viscosity = v;
  else if (key == "cg_tol") cg_tol = to_double(key, v);
  else if (key == "cg_max_iter") cg_max_iter = to_int<std::size_t>(key, v);
  else if (key == "jacobi") jacobi = to_bool(key, v);
  else if (key == "jitter") jitter = to_double(key, v);
  else if (key == "seed") seed = to_int<std::uint64_t>(key, v);
  else if (key == "out") out = v;
  else if (key == "write_every") write_every = to_int<long>(key, v);
  else if (key == "deterministic") deterministic = to_bool(key, v);
  else if (key == "dt_max") dt_max = to_double(key, v);
  else if (key == "mesh") mesh = v;
  else throw ConfigError("unknown config key '" + raw_key + "'");
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

ResolvedRun resolve(const RunConfig& cfg) {
  ResolvedRun r;
  r.spec = case_spec(cfg.case_name);
  CaseSpec& s = r.spec;
  if (cfg.model) {
    s.model = parse_model(*cfg.model);
    if (cfg.model->starts_with("ns-")) {
      if (s.viscosity == ViscosityMode::none) s.viscosity = ViscosityMode::explicit_stress;
    } else if (cfg.model->starts_with("euler-")) {
      s.viscosity = ViscosityMode::none;
      s.mu = 0.0;
    }
  }
  if (cfg.viscosity) s.viscosity = parse_viscosity(*cfg.viscosity);
  if (cfg.cfl) s.cfl = *cfg.cfl;
  if (cfg.t_end) s.t_end = *cfg.t_end;
  if (cfg.c0) s.c0 = *cfg.c0;
  if (cfg.mu) s.mu = *cfg.mu;
  if (cfg.cs) s.cs = *cfg.cs;

  if (cfg.nx < 2) throw ConfigError("nx must be at least 2");
  r.nx = cfg.nx;
  r.ny = cfg.ny.value_or(cfg.nx);
  if (r.ny < 2) throw ConfigError("ny must be at least 2");
  if (!(cfg.jitter >= 0.0 && cfg.jitter <= 0.3)) throw ConfigError("jitter must lie in [0, 0.3]");
  if (cfg.write_every < 0) throw ConfigError("write_every must be non-negative");
  if (cfg.out.empty()) throw ConfigError("output directory must not be empty");

  r.prm = case_params(s);
  r.prm.cg_tol = cfg.cg_tol;
  r.prm.cg_max_iter = cfg.cg_max_iter;
  r.prm.jacobi = cfg.jacobi;
  r.prm.dt_max = cfg.dt_max;
  r.prm.validate();
  return r;
}

Mesh build_mesh(const RunConfig& cfg, const ResolvedRun& r) {
  if (cfg.mesh) {
    try {
      return read_mesh(*cfg.mesh);
    } catch (const IOError& e) {
      throw ConfigError(e.what());
    }
  }
  return make_case_mesh(r.spec, r.nx, r.ny, cfg.jitter, cfg.seed);
}

std::string echo_config(const RunConfig& cfg, const ResolvedRun& r) {
  const auto& p = r.prm;
  std::ostringstream o;
  o << "case=" << r.spec.name << '\n';
  o << "model=" << (cfg.model ? *cfg.model : std::string(to_string(p.model))) << '\n';
  o << "nx=" << r.nx << "\nny=" << r.ny << '\n';
  o << "cfl=" << num(p.cfl) << "\nt_end=" << num(p.t_end) << '\n';
  o << "c0=" << num(p.c0) << "\nmu=" << num(p.mu) << "\ncs=" << num(p.cs) << '\n';
  o << "viscosity=" << to_string(p.viscosity) << '\n';
  o << "cg_tol=" << num(p.cg_tol) << "\ncg_max_iter=" << p.cg_max_iter << '\n';
  o << "jacobi=" << (p.jacobi ? "true" : "false") << '\n';
  o << "jitter=" << num(cfg.jitter) << "\nseed=" << cfg.seed << '\n';
  o << "out=" << cfg.out << "\nwrite_every=" << cfg.write_every << '\n';
  o << "deterministic=" << (cfg.deterministic ? "true" : "false") << '\n';
  if (p.dt_max) o << "dt_max=" << num(*p.dt_max) << '\n';
  else o << "# dt_max unset\n";
  if (cfg.mesh) o << "mesh=" << *cfg.mesh << '\n';
  else o << "# mesh generated\n";
  o << "# lambda_floor=" << (p.lambda_floor ? num(*p.lambda_floor) : std::string("model default")) << '\n';
  return o.str();
}

}  // namespace fvstag
