#include "malab/scenario.hpp"

#include "malab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace malab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kDefaultsVersion = 1;

void position(const std::string& text, std::size_t byte, std::size_t& line, std::size_t& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ScenarioError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("key '") + key + "': " + e.what());
  }
}

Point get_point(const json& j, const char* key, const Point& fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = get<std::vector<double>>(j, key, {});
  if (v.empty() || v.size() > 4) throw ScenarioError(std::string("key '") + key + "': expected 1 to 4 coordinates");
  Point p = Point::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
  return p;
}

FieldSpec parse_field(const json& j, const std::string& where) {
  check_keys(j, where, {"name", "alpha", "gamma", "value", "weight", "center", "parts"});
  FieldSpec f;
  f.name = get<std::string>(j, "name", f.name);
  f.alpha = get<double>(j, "alpha", f.alpha);
  f.gamma = get<double>(j, "gamma", f.gamma);
  f.value = get<double>(j, "value", f.value);
  f.weight = get<double>(j, "weight", f.weight);
  f.center = get_point(j, "center", f.center);
  if (j.contains("parts")) {
    if (!j.at("parts").is_array()) throw ScenarioError(where + ".parts: expected an array");
    for (const auto& p : j.at("parts")) f.parts.push_back(parse_field(p, where + ".parts"));
  }
  return f;
}

json field_json(const FieldSpec& f) {
  json j{{"name", f.name},     {"alpha", f.alpha}, {"gamma", f.gamma},
         {"value", f.value},   {"weight", f.weight},
         {"center", std::vector<double>(f.center.data(), f.center.data() + 4)}};
  if (!f.parts.empty()) {
    json parts = json::array();
    for (const auto& p : f.parts) parts.push_back(field_json(p));
    j["parts"] = parts;
  }
  return j;
}

RadialSpec parse_radial(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "a", "w", "c", "depth", "eta"});
  RadialSpec r;
  r.kind = get<std::string>(j, "kind", r.kind);
  r.a = get<double>(j, "a", r.a);
  r.w = get<double>(j, "w", r.w);
  r.c = get<double>(j, "c", r.c);
  r.depth = get<double>(j, "depth", r.depth);
  r.eta = get<double>(j, "eta", r.eta);
  return r;
}

json radial_json(const RadialSpec& r) {
  return {{"kind", r.kind}, {"a", r.a}, {"w", r.w}, {"c", r.c}, {"depth", r.depth}, {"eta", r.eta}};
}

json scenario_json(const Scenario& s) {
  return {{"name", s.name},
          {"pipeline", s.pipeline},
          {"domain", {{"shape", s.domain.shape}, {"n", s.domain.n}, {"radius", s.domain.radius}, {"a", s.domain.a}, {"scale", s.domain.scale}}},
          {"resolution", s.resolution},
          {"pad", s.pad},
          {"subsolution", field_json(s.subsolution)},
          {"boundary", field_json(s.boundary)},
          {"measure", {{"kind", s.measure.kind}, {"density", s.measure.density}, {"factor", s.measure.factor}}},
          {"density", {{"kind", s.density.kind}, {"exponent", s.density.exponent}}},
          {"p", s.p},
          {"collar", s.collar},
          {"seed", s.seed},
          {"instances", s.instances},
          {"k", s.k},
          {"ladders", {{"deltas", s.deltas}, {"s_grid", s.s_grid}, {"eps_grid", s.eps_grid}, {"k_radii", s.k_radii},
                       {"k_center", s.k_center}, {"tau", s.tau}, {"probe_eps", s.probe_eps},
                       {"probe_resolution", s.probe_resolution}, {"probe_pad", s.probe_pad},
                       {"probe_rungs", s.probe_rungs}, {"delta0", s.delta0}, {"ladder_points", s.ladder_points}}},
          {"radial", s.radial},
          {"radial_v", radial_json(s.radial_v)},
          {"radial_phi", radial_json(s.radial_phi)},
          {"v_field", field_json(s.v_field)},
          {"dump", s.dump},
          {"format", s.format},
          {"solver", {{"tol_change", s.solver.tol_change}, {"tol_ma_rel", s.solver.tol_ma_rel},
                      {"max_sweeps", s.solver.max_sweeps}, {"omega", s.solver.omega},
                      {"sandwich_tol", s.solver.sandwich_tol}}}};
}

void validate(const Scenario& s) {
  static const std::set<std::string> pipelines{"solve",           "capacity",           "theorem-b",        "corollary-c",
                                               "verify:blocki",   "verify:cegrell",     "verify:sublevel_decay",
                                               "verify:volume_capacity", "verify:mass_est", "verify:phi_eps",
                                               "verify:stability", "verify:l1_l1"};
  if (!pipelines.count(s.pipeline)) throw ScenarioError("unknown pipeline '" + s.pipeline + "'");
  if (s.domain.n != 1 && s.domain.n != 2) throw ScenarioError("domain.n must be 1 or 2");
  if (s.domain.shape != "ball" && s.domain.shape != "ellipsoid") throw ScenarioError("domain.shape must be ball or ellipsoid");
  const int hi = s.domain.n == 1 ? 2049 : 40;
  if (s.resolution < 16 || s.resolution > hi)
    throw ScenarioError("resolution " + std::to_string(s.resolution) + " outside [16, " + std::to_string(hi) + "]");
  if (s.pad < 1 || s.pad > 64) throw ScenarioError("pad outside [1, 64]");
  static const std::set<std::string> formats{"all", "csv", "svg", "json"};
  if (!formats.count(s.format)) throw ScenarioError("format must be all, csv, svg or json");
  static const std::set<std::string> measures{"ma_phi", "scaled_ma_phi", "lebesgue", "zero"};
  if (!measures.count(s.measure.kind)) throw ScenarioError("unknown measure kind '" + s.measure.kind + "'");
  static const std::set<std::string> densities{"one", "rho_power", "half_plane"};
  if (!densities.count(s.density.kind)) throw ScenarioError("unknown density kind '" + s.density.kind + "'");
  if (s.instances < 1) throw ScenarioError("instances must be positive");
  // names must resolve against the catalogs
  try {
    make_subsolution(s.subsolution, s.domain);
    make_boundary_data(s.boundary, s.domain);
  } catch (const Error& e) {
    throw ScenarioError(e.what());
  }
  if (s.output_dir.empty()) throw ScenarioError("output directory is empty");
}

}  // namespace

json defaults_block() {
  const SolverOptions so;
  const HolderOptions ho;
  return {{"version", kDefaultsVersion},
          {"convention", "dd^c = 2i ddbar, (dd^c u)^n = 4^n n! det(u_{j kbar}) dV"},
          {"psd_tolerance", kPsdTolerance},
          {"psh_tolerance", "10 h"},
          {"sandwich_tolerance", "10 h"},
          {"inequality_tolerance", "10 h max(lhs, rhs)"},
          {"min_arm_fraction", kMinArmFraction},
          {"default_pad", kDefaultPad},
          {"solver", {{"tol_change", so.tol_change}, {"tol_ma_rel", so.tol_ma_rel}, {"max_sweeps", "2000 * nodes per axis"}, {"omega", so.omega}}},
          {"holder", {{"delta0", "0.2 inradius"}, {"ladder", "delta0 / 2^j, j = 1..5, delta >= 4h"},
                      {"min_ladder_points", ho.min_ladder_points}, {"fit_tolerance", ho.fit_tolerance},
                      {"lap_slope_min", ho.lap_slope_min}, {"probe_resolution", "n=1: 129, n=2: 20"},
                      {"probe_pad", "n=1: 12, n=2: 4"}, {"probe_eps", ho.probe_eps}, {"probe_rungs", ho.probe_rungs},
                      {"coupling", "eps = delta0 (delta / delta0)^kappa"}}},
          {"s_grid", {0.125, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0}},
          {"eps_grid", {0.4, 0.2, 0.1, 0.05}},
          {"k_radii", "0.1 .. 0.5 of the inradius"}};
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 0;
    std::size_t col = 0;
    position(text, e.byte == 0 ? 0 : e.byte - 1, line, col);
    throw ScenarioError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what(),
                        line, col);
  }
  check_keys(j, "scenario",
             {"name", "pipeline", "domain", "resolution", "pad", "subsolution", "boundary", "measure", "density", "p",
              "collar", "seed", "instances", "k", "ladders", "radial", "radial_v", "radial_phi", "v_field", "dump",
              "format", "output", "solver", "defaults"});
  Scenario s;
  s.name = get<std::string>(j, "name", s.name);
  s.pipeline = get<std::string>(j, "pipeline", s.pipeline);
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    check_keys(d, "domain", {"shape", "n", "radius", "a", "scale"});
    s.domain.shape = get<std::string>(d, "shape", s.domain.shape);
    s.domain.n = get<int>(d, "n", s.domain.n);
    s.domain.radius = get<double>(d, "radius", s.domain.radius);
    s.domain.scale = get<double>(d, "scale", s.domain.scale);
    if (d.contains("a")) {
      const auto a = get<std::vector<double>>(d, "a", {});
      if (a.size() != 2) throw ScenarioError("domain.a: expected two coefficients");
      s.domain.a = {a[0], a[1]};
    }
  }
  int res = s.domain.n == 1 ? 64 : 20;
  if (s.domain.n == 1 && s.pipeline == "theorem-b") res = TheoremBInput{}.resolution;
  if (s.domain.n == 1 && s.pipeline == "corollary-c") res = CorollaryInput{}.resolution;
  s.resolution = get<int>(j, "resolution", res);
  s.pad = get<int>(j, "pad", s.pad);
  if (j.contains("subsolution")) s.subsolution = parse_field(j.at("subsolution"), "subsolution");
  s.boundary.name = "zero";
  if (j.contains("boundary")) s.boundary = parse_field(j.at("boundary"), "boundary");
  if (j.contains("measure")) {
    const json& m = j.at("measure");
    check_keys(m, "measure", {"kind", "density", "factor"});
    s.measure.kind = get<std::string>(m, "kind", s.measure.kind);
    s.measure.density = get<double>(m, "density", s.measure.density);
    s.measure.factor = get<double>(m, "factor", s.measure.factor);
  }
  if (j.contains("density")) {
    const json& m = j.at("density");
    check_keys(m, "density", {"kind", "exponent"});
    s.density.kind = get<std::string>(m, "kind", s.density.kind);
    s.density.exponent = get<double>(m, "exponent", s.density.exponent);
  }
  s.p = get<double>(j, "p", s.p);
  s.collar = get<double>(j, "collar", s.collar);
  s.seed = get<std::uint64_t>(j, "seed", s.seed);
  s.instances = get<int>(j, "instances", s.instances);
  s.k = get<int>(j, "k", s.k);
  if (j.contains("ladders")) {
    const json& l = j.at("ladders");
    check_keys(l, "ladders", {"deltas", "s_grid", "eps_grid", "k_radii", "k_center", "tau", "probe_eps", "probe_resolution",
                              "probe_pad", "probe_rungs", "delta0", "ladder_points"});
    s.deltas = get<std::vector<double>>(l, "deltas", {});
    s.s_grid = get<std::vector<double>>(l, "s_grid", {});
    s.eps_grid = get<std::vector<double>>(l, "eps_grid", {});
    s.k_radii = get<std::vector<double>>(l, "k_radii", {});
    s.k_center = get<std::vector<double>>(l, "k_center", s.k_center);
    s.tau = get<double>(l, "tau", s.tau);
    s.probe_eps = get<double>(l, "probe_eps", s.probe_eps);
    s.probe_resolution = get<int>(l, "probe_resolution", s.probe_resolution);
    s.probe_pad = get<int>(l, "probe_pad", s.probe_pad);
    s.probe_rungs = get<int>(l, "probe_rungs", s.probe_rungs);
    s.delta0 = get<double>(l, "delta0", s.delta0);
    s.ladder_points = get<int>(l, "ladder_points", s.ladder_points);
  }
  s.radial = get<bool>(j, "radial", s.pipeline == "verify:sublevel_decay" && !j.contains("v_field"));
  if (j.contains("radial_v")) s.radial_v = parse_radial(j.at("radial_v"), "radial_v");
  if (j.contains("radial_phi")) s.radial_phi = parse_radial(j.at("radial_phi"), "radial_phi");
  if (j.contains("v_field")) s.v_field = parse_field(j.at("v_field"), "v_field");
  s.dump = get<bool>(j, "dump", s.pipeline == "solve");
  s.format = get<std::string>(j, "format", s.format);
  s.output_dir = get<std::string>(j, "output", s.output_dir);
  if (j.contains("solver")) {
    const json& o = j.at("solver");
    check_keys(o, "solver", {"tol_change", "tol_ma_rel", "max_sweeps", "omega", "sandwich_tol"});
    s.solver.tol_change = get<double>(o, "tol_change", s.solver.tol_change);
    s.solver.tol_ma_rel = get<double>(o, "tol_ma_rel", s.solver.tol_ma_rel);
    s.solver.max_sweeps = get<int>(o, "max_sweeps", s.solver.max_sweeps);
    s.solver.omega = get<double>(o, "omega", s.solver.omega);
    s.solver.sandwich_tol = get<double>(o, "sandwich_tol", s.solver.sandwich_tol);
  }
  if (j.contains("defaults") && get<int>(j.at("defaults"), "version", kDefaultsVersion) != kDefaultsVersion)
    throw ScenarioError("defaults block version mismatch (expected " + std::to_string(kDefaultsVersion) + ")");
  validate(s);
  return s;
}

Scenario load_scenario(const fs::path& file) {
  std::ifstream is(file);
  if (!is) throw ScenarioError("cannot read scenario " + file.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

struct Context {
  const Scenario& s;
  fs::path dir;
  RunResult result;
  bool solver_failed = false;
  bool failed = false;
  std::vector<std::string> failures;
  json reports = json::array();

  bool want_csv() const { return s.format == "all" || s.format == "csv"; }
  bool want_svg() const { return s.format == "all" || s.format == "svg"; }

  void emit(const InequalityReport& r) {
    if (want_csv()) {
      write_csv(r, dir);
      result.files.push_back(dir / (r.id + ".csv"));
      if (!r.instrument.columns.empty()) result.files.push_back(dir / (r.id + "_instrument.csv"));
    }
    if (want_svg()) {
      write_svg(r, dir);
      result.files.push_back(dir / (r.id + ".svg"));
    }
    reports.push_back(to_json(r));
    if (!r.pass) fail(r.id);
  }
  void fail(const std::string& what) {
    failed = true;
    failures.push_back(what);
  }
};

GridMeasure resolve_measure(const MeasureSpec& m, const GridFunction& phi, bool solver_facing) {
  const DomainPtr& d = phi.domain;
  if (m.kind == "zero") return zero_measure(d);
  if (m.kind == "lebesgue") return lebesgue_density(d, m.density);
  const GridMeasure base = solver_facing ? scheme_measure(phi) : ma_measure(phi);
  if (m.kind == "scaled_ma_phi") return m.factor * base;
  return base;
}

MeasureRecipe recipe(const MeasureSpec& m) {
  return [m](const DomainPtr&, const GridFunction& phi) { return resolve_measure(m, phi, true); };
}

Field density_field(const DensitySpec& f, const DomainSpec& dom) {
  if (f.kind == "one") return [](const Point&) { return 1.0; };
  if (f.kind == "half_plane") return [](const Point& p) { return p[0] > 0.0 ? 1.0 : 0.0; };
  const double e = f.exponent;
  return [dom, e](const Point& p) { return std::pow(-dom.rho(p), e); };
}

RadialProfile radial_profile(const RadialSpec& r) {
  const double c = r.c < 0.0 ? 1.0 / (2.0 * std::numbers::pi) : r.c;
  if (r.kind == "quad") return radial_quad(r.a);
  if (r.kind == "holder") return radial_holder(r.a, r.w);
  if (r.kind == "log_pole") return radial_log_pole(c, r.depth);
  if (r.kind == "smooth_pole") return radial_smooth_pole(c, r.eta);
  throw ScenarioError("unknown radial profile '" + r.kind + "'");
}

std::vector<double> or_default(const std::vector<double>& v, std::initializer_list<double> d) {
  return v.empty() ? std::vector<double>(d) : v;
}

HolderOptions holder_options(const Scenario& s) {
  HolderOptions o;
  o.deltas = s.deltas;
  o.delta0 = s.delta0;
  o.ladder_points = s.ladder_points;
  o.probe_resolution = s.probe_resolution;
  o.probe_pad = s.probe_pad;
  o.probe_eps = s.probe_eps;
  o.probe_rungs = s.probe_rungs;
  o.solver = s.solver;
  return o;
}

Point k_center(const Scenario& s) {
  Point c = Point::Zero();
  for (std::size_t i = 0; i < std::min<std::size_t>(4, s.k_center.size()); ++i) c[static_cast<Eigen::Index>(i)] = s.k_center[i];
  return c;
}

void emit_holder(Context& cx, const HolderReport& r) {
  if (cx.want_csv()) {
    write_csv(r, cx.dir);
    cx.result.files.push_back(cx.dir / "holder.csv");
    cx.result.files.push_back(cx.dir / "holder_detail.csv");
  }
  if (cx.want_svg()) {
    write_svg(r, cx.dir);
    cx.result.files.push_back(cx.dir / "holder.svg");
    cx.result.files.push_back(cx.dir / "lap.svg");
  }
  for (const auto& p : r.probes) {
    if (cx.want_csv()) {
      write_csv(p, cx.dir);
      cx.result.files.push_back(cx.dir / (p.id + ".csv"));
      if (!p.instrument.columns.empty()) cx.result.files.push_back(cx.dir / (p.id + "_instrument.csv"));
    }
    if (cx.want_svg()) {
      write_svg(p, cx.dir);
      cx.result.files.push_back(cx.dir / (p.id + ".svg"));
    }
  }
  cx.reports.push_back(to_json(r));
  if (!r.converged) cx.solver_failed = true;
  const std::pair<const char*, bool> checks[] = {{"dominated", r.dominated || r.id == "corollary_c"}, {"sandwich", r.sandwich_ok},
                                                 {"coupling", r.coupling_ok}, {"collar_bound", r.collar_bound_ok},
                                                 {"gluing", r.gluing_ok},     {"l1_gap", r.lap_ok},
                                                 {"exponent", r.exponent_ok}, {"alpha4_identity", r.alpha4_identity}};
  for (const auto& [name, ok] : checks)
    if (!ok) cx.fail(r.id + "." + name);
  for (const auto& p : r.probes)
    if (!p.pass) cx.fail(r.id + "." + p.id);
  if (!r.pass && cx.failures.empty()) cx.fail(r.id);
  if (cx.s.dump) {
    write_dump(r.u, cx.dir / "u");
    cx.result.files.push_back(cx.dir / "u.bin");
    cx.result.files.push_back(cx.dir / "u.json");
  }
}

json solve_json(const SolveReport& r) {
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"last_change", r.last_change},
          {"max_residual", r.max_residual},
          {"sandwich_checked", r.sandwich_checked},
          {"sandwich_ok", r.sandwich_ok},
          {"sandwich_violation", r.sandwich_violation},
          {"subsolution_dominated", r.subsolution_dominated},
          {"u_min", r.u.interior_min()},
          {"u_max", r.u.interior_max()}};
}

void run_solve(Context& cx, const DomainPtr& d, const GridFunction& phi, const CatalogField& psi) {
  const GridMeasure mu = resolve_measure(cx.s.measure, phi, true);
  const SolveReport r = solve_dirichlet(DirichletProblem{d, mu, psi.f, phi}, cx.s.solver);
  json j = solve_json(r);
  j["id"] = "solve";
  j["pass"] = r.converged && r.sandwich_ok;
  cx.reports.push_back(j);
  if (!r.converged) cx.solver_failed = true;
  if (!r.sandwich_ok) cx.fail("solve.sandwich");
  if (cx.s.dump) {
    write_dump(r.u, cx.dir / "u");
    cx.result.files.push_back(cx.dir / "u.bin");
    cx.result.files.push_back(cx.dir / "u.json");
  }
}

void run_capacity(Context& cx, const DomainPtr& d) {
  const std::vector<double> radii = or_default(cx.s.k_radii, {0.2, 0.3, 0.5});
  const Point c = k_center(cx.s);
  InequalityReport r;
  r.id = "capacity";
  r.parameter = "radius";
  r.instrument.columns = {"radius", "capacity", "closed_form", "relative_error", "nodes"};
  const bool concentric = d->spec().shape == "ball" && c.norm() == 0.0;
  bool converged = true;
  double prev = 0.0;
  bool monotone = true;
  for (double rad : radii) {
    const CapacityResult cr = capacity(ball_region(d, c, rad), cx.s.solver);
    converged = converged && cr.converged;
    const double exact = concentric ? ball_capacity(d->n(), rad, d->spec().radius) : cr.value;
    // n = 2 lattices at desk scale sit 10-15% below the closed form; only the slope is checked there
    r.add_point(rad, cr.value, exact, concentric ? (d->n() == 1 ? 0.05 : 0.2) * exact : 0.0);
    r.instrument.rows.push_back({rad, cr.value, exact, concentric ? cr.value / exact - 1.0 : 0.0, static_cast<double>(cr.k.count())});
    if (cr.value < prev) monotone = false;
    prev = cr.value;
  }
  if (radii.size() >= 2) {
    std::vector<double> inv;
    std::vector<double> caps;
    for (const auto& row : r.instrument.rows) {
      inv.push_back(std::log(d->spec().radius / row[0]));
      caps.push_back(row[1]);
    }
    r.add_constant("loglog_slope", fit_loglog(inv, caps).slope, "log cap on log log(R/r)");
  }
  r.add_constant("monotone", monotone ? 1.0 : 0.0, "cap increases with r");
  r.notes.push_back(concentric ? "rhs: closed form (2 pi / log(R/r))^n" : "rhs: no closed form, echoes the capacity");
  bool close = true;
  for (const auto& pt : r.points) close = close && std::abs(pt.slack) <= pt.tolerance;
  r.pass = converged && monotone && close;
  if (d->n() == 2 && radii.size() >= 2) r.pass = r.pass && std::abs(r.constant("loglog_slope") + 2.0) <= 0.2;
  if (!converged) cx.solver_failed = true;
  cx.emit(r);
}

void run_verify(Context& cx, const DomainPtr& d, const GridFunction& phi) {
  const Scenario& s = cx.s;
  const std::string id = s.pipeline.substr(7);
  const int n = d->n();
  if (id == "blocki") {
    cx.emit(blocki_suite(d, s.instances, s.seed));
  } else if (id == "cegrell") {
    cx.emit(cegrell_suite(d, s.instances, s.seed));
  } else if (id == "sublevel_decay") {
    const std::vector<double> sg = or_default(s.s_grid, {0.125, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
    if (s.radial) {
      cx.emit(sublevel_decay_radial(n, radial_profile(s.radial_v), radial_profile(s.radial_phi), sg));
    } else {
      const GridFunction v = sample(d, make_subsolution(s.v_field, d->spec()).f);
      cx.emit(sublevel_decay_scan(v, ma_measure(phi), sg));
    }
  } else if (id == "volume_capacity") {
    std::vector<RegionMask> fam;
    const std::vector<double> radii = or_default(s.k_radii, {0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5});
    for (double r : radii) fam.push_back(ball_region(d, k_center(s), r * d->inradius()));
    cx.emit(volume_capacity_scan(resolve_measure(s.measure, phi, false), fam, s.tau, s.solver));
  } else if (id == "mass_est") {
    cx.emit(mass_est_scan(phi, s.k, or_default(s.eps_grid, {0.4, 0.2, 0.1, 0.05})));
  } else if (id == "phi_eps") {
    cx.emit(phi_eps_scan(phi, resolve_measure(s.measure, phi, false), or_default(s.eps_grid, {0.4, 0.2, 0.1, 0.05})));
  } else {
    // stability and l1_l1 run on a solved instance
    const GridMeasure mu = resolve_measure(s.measure, phi, true);
    const CatalogField psi = make_boundary_data(s.boundary, d->spec());
    const SolveReport sr = solve_dirichlet(DirichletProblem{d, mu, psi.f, phi}, s.solver);
    if (!sr.converged) {
      cx.solver_failed = true;
      return;
    }
    const DomeLadder ladder = dome_ladder(sr.u, s.probe_eps, s.probe_rungs);
    const ProbeSetup ps{sr.u, mu, phi, s.probe_eps, n == 1 ? -1 : 1, s.solver};
    if (id == "stability") {
      cx.emit(stability_probe(ps, ladder));
    } else {
      cx.emit(l1_l1_probe(ps, ladder, std::min(make_subsolution(s.subsolution, d->spec()).holder_exponent, 0.5)));
    }
  }
}

}  // namespace

RunResult run_scenario(const Scenario& s) {
  validate(s);
  Context cx{s, fs::path(s.output_dir) / s.name, {}, false, false, {}, json::array()};
  std::error_code ec;
  fs::create_directories(cx.dir, ec);
  if (ec) throw IoError("cannot create " + cx.dir.string() + ": " + ec.message());
  const CatalogField sub = make_subsolution(s.subsolution, s.domain);
  const CatalogField psi = make_boundary_data(s.boundary, s.domain);
  try {
    if (s.pipeline == "theorem-b") {
      TheoremBInput in;
      in.domain = s.domain;
      in.resolution = s.resolution;
      in.pad = s.pad;
      in.phi = sub;
      in.psi = psi;
      in.measure = recipe(s.measure);
      in.options = holder_options(s);
      emit_holder(cx, theorem_b_pipeline(in));
    } else if (s.pipeline == "corollary-c") {
      CorollaryInput in;
      in.domain = s.domain;
      in.resolution = s.resolution;
      in.pad = s.pad;
      in.collar = s.collar;
      in.phi = sub;
      in.f = density_field(s.density, s.domain);
      in.f_label = s.density.kind;
      in.p = s.p;
      in.measure = recipe(s.measure);
      in.k_radii = s.k_radii;
      in.tau = s.tau;
      in.options = holder_options(s);
      emit_holder(cx, corollary_c_pipeline(in));
    } else {
      const DomainPtr d = build_domain(s.domain, s.resolution, s.pad);
      const GridFunction phi = sample(d, sub.f);
      if (s.pipeline == "solve") {
        run_solve(cx, d, phi, psi);
      } else if (s.pipeline == "capacity") {
        run_capacity(cx, d);
      } else {
        run_verify(cx, d, phi);
      }
    }
  } catch (const NotConverged& e) {
    cx.solver_failed = true;
    cx.failures.push_back(std::string("solver: ") + e.what());
  } catch (const IoError&) {
    throw;
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    cx.fail(std::string("error: ") + e.what());
  }

  cx.result.exit_code = cx.solver_failed ? kExitSolver : (cx.failed ? kExitInequality : kExitPass);
  json& sm = cx.result.summary;
  sm["scenario"] = s.name;
  sm["pipeline"] = s.pipeline;
  sm["exit_code"] = cx.result.exit_code;
  sm["pass"] = cx.result.exit_code == kExitPass;
  sm["failures"] = cx.failures;
  sm["reports"] = cx.reports;
  sm["config"] = scenario_json(s);
  sm["defaults"] = defaults_block();
  write_json(sm, cx.dir / "summary.json");
  cx.result.files.push_back(cx.dir / "summary.json");
  return cx.result;
}

}  // namespace malab
