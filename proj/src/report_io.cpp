#include "malab/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace malab {

namespace fs = std::filesystem;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& file, std::ios::openmode mode = std::ios::out) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  std::ofstream os(file, mode);
  if (!os) throw IoError("cannot write " + file.string());
  return os;
}

void close_checked(std::ofstream& os, const fs::path& file) {
  os.close();
  if (!os) throw IoError("write failed: " + file.string());
}

// JSON has no inf/nan; they become strings
nlohmann::json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

void write_table(const fs::path& file, const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows) {
  std::ofstream os = open_out(file);
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
  close_checked(os, file);
}

}  // namespace

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["parameter"] = r.parameter;
  j["pass"] = r.pass;
  j["worst_slack"] = num(r.worst_slack);
  j["violations"] = r.violations;
  j["strict_violations"] = r.strict_violations;
  j["points"] = r.points.size();
  nlohmann::json cs = nlohmann::json::object();
  for (const auto& c : r.constants) cs[c.name] = {{"value", num(c.value)}, {"provenance", c.provenance}};
  j["constants"] = cs;
  j["notes"] = r.notes;
  return j;
}

nlohmann::json to_json(const HolderReport& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["n"] = r.n;
  j["h"] = r.h;
  j["pass"] = r.pass;
  j["delta0"] = r.delta0;
  j["alpha"] = r.alpha;
  j["alpha_phi"] = r.alpha_phi;
  j["alpha_psi"] = r.alpha_psi;
  j["alpha2"] = r.alpha2;
  j["alpha3"] = r.alpha3;
  j["alpha3_tilde"] = r.alpha3_tilde;
  j["alpha4"] = r.alpha4;
  j["kappa"] = r.kappa;
  j["C1"] = r.C1;
  j["C2"] = r.C2;
  j["hopf_constant"] = r.hopf;
  j["empirical_exponent"] = r.empirical_exponent;
  j["exponent_fit_rms"] = r.exponent_fit.rms_residual;
  j["lap_slope"] = r.lap_fit.slope;
  j["lap_fit_rms"] = r.lap_fit.rms_residual;
  j["fit_tolerance"] = r.fit_tolerance;
  j["lap_slope_min"] = r.lap_slope_min;
  j["sandwich_violation"] = r.sandwich_violation;
  j["checks"] = {{"converged", r.converged},     {"dominated", r.dominated},   {"sandwich", r.sandwich_ok},
                 {"coupling", r.coupling_ok},    {"collar_bound", r.collar_bound_ok},   {"gluing", r.gluing_ok},
                 {"l1_gap", r.lap_ok},          {"exponent", r.exponent_ok}, {"alpha4_identity", r.alpha4_identity}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& w : r.rows)
    rows.push_back({{"delta", w.delta},
                    {"eps", w.eps},
                    {"sup_gap", w.sup_gap},
                    {"fit", w.fit},
                    {"l1_gap", w.l1_gap},
                    {"collar_gap", w.collar_gap},
                    {"collar_bound", w.collar_bound},
                    {"inner_gap", w.inner_gap},
                    {"glue_constant", w.glue_constant},
                    {"glue_min_eigenvalue", w.glue_min_eigenvalue},
                    {"glue_psh", w.glue_psh},
                    {"glue_equal_outside", w.glue_equal_outside},
                    {"glue_above", w.glue_above}});
  j["rows"] = rows;
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : r.probes) probes.push_back(to_json(p));
  j["probes"] = probes;
  j["notes"] = r.notes;
  return j;
}

void write_csv(const InequalityReport& r, const fs::path& dir) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : r.points) rows.push_back({p.parameter, p.lhs, p.rhs, p.slack, p.tolerance});
  write_table(dir / (r.id + ".csv"), {r.parameter, "lhs", "rhs", "slack", "tolerance"}, rows);
  if (!r.instrument.columns.empty()) write_table(dir / (r.id + "_instrument.csv"), r.instrument.columns, r.instrument.rows);
}

void write_csv(const HolderReport& r, const fs::path& dir) {
  std::vector<std::vector<double>> main;
  std::vector<std::vector<double>> detail;
  for (const auto& w : r.rows) {
    main.push_back({w.delta, w.eps, w.sup_gap, w.fit});
    detail.push_back({w.delta, w.eps, w.sup_gap, w.fit, w.l1_gap, w.collar_gap, w.collar_bound, w.inner_gap,
                      w.glue_constant, w.glue_min_eigenvalue, w.glue_psh ? 1.0 : 0.0, w.glue_equal_outside ? 1.0 : 0.0,
                      w.glue_above ? 1.0 : 0.0});
  }
  write_table(dir / "holder.csv", {"delta", "eps", "sup_gap", "fit"}, main);
  write_table(dir / "holder_detail.csv",
              {"delta", "eps", "sup_gap", "fit", "l1_gap", "collar_gap", "collar_bound", "inner_gap", "glue_constant",
               "glue_min_eigenvalue", "glue_psh", "glue_equal_outside", "glue_above"},
              detail);
}

namespace {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  bool line = false;
  std::string colour;
  std::string label;
};

bool all_positive(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double q) { return q > 0.0 && std::isfinite(q); });
}

void plot(const fs::path& file, const std::string& title, const std::string& xlabel, const std::string& ylabel,
          const std::vector<Series>& series) {
  bool logx = true;
  bool logy = true;
  for (const auto& s : series) {
    logx = logx && all_positive(s.x);
    logy = logy && all_positive(s.y);
  }
  auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy ? std::log10(v) : v; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(tx(s.x[i])) || !std::isfinite(ty(s.y[i]))) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double W = 640, H = 440, L = 80, R = 20, T = 40, B = 60;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double gx = L + (W - L - R) * k / 4.0;
    const double gy = H - B - (H - T - B) * k / 4.0;
    os << "<text x=\"" << gx << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
       << format_number(logx ? std::pow(10.0, fx) : fx).substr(0, 8) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
       << format_number(logy ? std::pow(10.0, fy) : fy).substr(0, 8) << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << xlabel << (logx ? " (log)" : "")
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << H / 2 << ")\">"
     << ylabel << (logy ? " (log)" : "") << "</text>\n";
  int legend = 0;
  for (const auto& s : series) {
    if (s.line) {
      os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) os << format_number(px(s.x[i])) << "," << format_number(py(s.y[i])) << " ";
      os << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        os << "<circle cx=\"" << format_number(px(s.x[i])) << "\" cy=\"" << format_number(py(s.y[i]))
           << "\" r=\"3\" fill=\"" << s.colour << "\"/>\n";
    }
    os << "<text x=\"" << L + 10 << "\" y=\"" << T + 16 + 14 * legend++ << "\" fill=\"" << s.colour << "\">" << s.label
       << "</text>\n";
  }
  os << "</svg>\n";
  std::ofstream out = open_out(file);
  out << os.str();
  close_checked(out, file);
}

}  // namespace

void write_svg(const InequalityReport& r, const fs::path& dir) {
  Series data{{}, {}, false, "#1f77b4", "lhs"};
  Series bound{{}, {}, true, "#d62728", "fitted bound"};
  std::vector<std::size_t> order(r.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.points[a].parameter < r.points[b].parameter; });
  for (std::size_t i : order) {
    data.x.push_back(r.points[i].parameter);
    data.y.push_back(r.points[i].lhs);
    bound.x.push_back(r.points[i].parameter);
    bound.y.push_back(r.points[i].rhs);
  }
  plot(dir / (r.id + ".svg"), r.id, r.parameter, "value", {data, bound});
}

void write_svg(const HolderReport& r, const fs::path& dir) {
  Series gap{{}, {}, false, "#1f77b4", "sup (hat u_delta - u)"};
  Series fit{{}, {}, true, "#d62728", "fit, slope " + format_number(r.empirical_exponent).substr(0, 6)};
  Series l1{{}, {}, false, "#2ca02c", "int |hat u_delta - u|"};
  Series lfit{{}, {}, true, "#9467bd", "fit, slope " + format_number(r.lap_fit.slope).substr(0, 6)};
  for (const auto& w : r.rows) {
    gap.x.push_back(w.delta);
    gap.y.push_back(w.sup_gap);
    fit.x.push_back(w.delta);
    fit.y.push_back(w.fit);
    l1.x.push_back(w.delta);
    l1.y.push_back(w.l1_gap);
    lfit.x.push_back(w.delta);
    lfit.y.push_back(std::exp(r.lap_fit.intercept) * std::pow(w.delta, r.lap_fit.slope));
  }
  plot(dir / "holder.svg", r.id + ": Hoelder gap", "delta", "gap", {gap, fit});
  plot(dir / "lap.svg", r.id + ": L1 gap", "delta", "gap", {l1, lfit});
}

void write_json(const nlohmann::json& j, const fs::path& file) {
  std::ofstream os = open_out(file);
  os << j.dump(2) << '\n';
  close_checked(os, file);
}

void write_dump(const GridFunction& f, const fs::path& stem) {
  const Lattice& lat = f.lattice();
  fs::path bin = stem;
  bin += ".bin";
  fs::path head = stem;
  head += ".json";
  {
    std::ofstream os = open_out(bin, std::ios::out | std::ios::binary);
    os.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(sizeof(double) * lat.size()));
    const auto& mask = f.domain->interior_mask();
    os.write(reinterpret_cast<const char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
    close_checked(os, bin);
  }
  nlohmann::json j;
  j["n"] = lat.n;
  j["nodes_per_axis"] = lat.m;
  j["axes"] = lat.dim();
  j["spacing"] = lat.h;
  j["origin"] = -lat.half_width();
  j["layout"] = "axes (x1, y1[, x2, y2]), first axis fastest";
  j["values"] = {{"dtype", "float64-le"}, {"offset", 0}, {"count", lat.size()}};
  j["interior_mask"] = {{"dtype", "uint8"}, {"offset", sizeof(double) * lat.size()}, {"count", lat.size()}};
  j["convention"] = "dd^c = 2i ddbar; (dd^c u)^n = 4^n n! det(u_{j kbar}) dV";
  j["domain"] = {{"shape", f.domain->spec().shape}, {"radius", f.domain->spec().radius},
                 {"a", f.domain->spec().a}, {"scale", f.domain->spec().scale}};
  write_json(j, head);
}

Dump read_dump(const fs::path& stem) {
  fs::path bin = stem;
  bin += ".bin";
  fs::path head = stem;
  head += ".json";
  std::ifstream hs(head);
  if (!hs) throw IoError("cannot read " + head.string());
  const nlohmann::json j = nlohmann::json::parse(hs);
  Dump d;
  d.n = j.at("n").get<int>();
  d.m = j.at("nodes_per_axis").get<int>();
  d.h = j.at("spacing").get<double>();
  const std::size_t count = j.at("values").at("count").get<std::size_t>();
  std::ifstream bs(bin, std::ios::binary);
  if (!bs) throw IoError("cannot read " + bin.string());
  d.values.resize(static_cast<Eigen::Index>(count));
  d.interior.resize(count);
  bs.read(reinterpret_cast<char*>(d.values.data()), static_cast<std::streamsize>(sizeof(double) * count));
  bs.read(reinterpret_cast<char*>(d.interior.data()), static_cast<std::streamsize>(count));
  if (!bs) throw IoError("truncated dump " + bin.string());
  return d;
}

}  // namespace malab
