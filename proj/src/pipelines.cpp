#include "malab/pipelines.hpp"

#include "malab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace malab {

double theoretical_alpha4(int n, double alpha, double alpha2, double alpha3, double alpha3_tilde) {
  return alpha * alpha2 * alpha3 * alpha3_tilde / (2.0 * n + 1.0 + alpha);
}

std::vector<double> default_delta_ladder(const GridDomain& d, double delta0, int points) {
  std::vector<double> out;
  for (int j = 1; j <= points; ++j) {
    const double delta = std::ldexp(delta0, -j);
    if (delta < 4.0 * d.h()) break;
    out.push_back(delta);
  }
  return out;
}

DomainSpec enlarge(const DomainSpec& spec, double collar) {
  if (!(collar > 0.0)) throw Error("enlarge: collar must be positive");
  DomainSpec out = spec;
  out.radius = spec.radius * (1.0 + collar);
  return out;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

/// Everything the scans need from one resolution.
struct Stage {
  DomainPtr d;
  GridFunction u;
  GridFunction env;   // boundary envelope
  GridFunction sub;   // subsolution with zero trace
  GridMeasure mu;     // measure solved for
  GridMeasure base;   // measure of the L1-L1 probe
  GridFunction phi;   // subsolution of `base`
  SolveReport solve;
  std::vector<std::string> notes;
};

struct ProbeResult {
  double alpha2 = 1.0;
  double alpha3 = 1.0;
  double alpha3_tilde = 1.0;
  std::vector<InequalityReport> reports;
  bool pass = true;
  std::vector<std::string> notes;
};

int probe_resolution(const HolderOptions& o, int n) { return o.probe_resolution > 0 ? o.probe_resolution : (n == 1 ? 129 : 20); }
int probe_pad(const HolderOptions& o, int n) { return o.probe_pad >= 0 ? o.probe_pad : (n == 1 ? 12 : 4); }

ProbeResult run_probes(const Stage& s, const HolderOptions& o, double alpha, bool lp_fit) {
  ProbeResult out;
  const int n = s.d->n();
  if (!(s.mu.total() > 0.0)) {
    out.notes.push_back("zero measure: stability and L1-L1 bounds are vacuous, alpha2 = alpha3 = 1");
    return out;
  }
  const DomeLadder ladder = dome_ladder(s.u, o.probe_eps, o.probe_rungs);
  const int growth = o.growth_rungs >= 0 ? o.growth_rungs : (n == 1 ? -1 : 1);
  const ProbeSetup st{s.u, s.mu, s.sub, o.probe_eps, growth, o.solver};
  InequalityReport stab = stability_probe(st, ladder);
  out.alpha2 = stab.constant("alpha2");
  out.pass = out.pass && stab.pass;
  out.reports.push_back(std::move(stab));
  const ProbeSetup sl{s.u, s.base, s.phi, o.probe_eps, growth, o.solver};
  InequalityReport l1 = l1_l1_probe(sl, ladder, alpha);
  out.alpha3 = l1.constant("alpha3");
  out.pass = out.pass && l1.pass;
  out.reports.push_back(std::move(l1));

  if (lp_fit) {
    // int (v - u) f dmu <= C |v - u|_{L1(dmu)}^{alpha3_tilde}
    InequalityReport r;
    r.id = "lp_property";
    r.parameter = "height";
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& v : ladder.v) {
      const GridFunction diff = v - s.u;
      double a = 0.0;
      double b = 0.0;
      for (std::size_t i : s.d->interior_nodes()) {
        const auto k = static_cast<Eigen::Index>(i);
        a += std::abs(diff[i]) * s.base.weights[k];
        b += diff[i] * s.mu.weights[k];
      }
      x.push_back(a);
      y.push_back(b);
    }
    const PowerBound pb = fit_power_bound(x, y);
    r.add_constant("alpha3_tilde", pb.exponent, "log-log least squares of int (v-u) f dmu on |v-u|_{L1(dmu)}, clamped to (0,1]");
    r.add_constant("alpha3_tilde_raw_slope", pb.fit.slope, "unclamped slope");
    r.add_constant("alpha3_tilde_fit_rms", pb.fit.rms_residual, "residual of the fit");
    r.add_constant("C", pb.constant, "one-sided constant");
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double rhs = pb.constant * std::pow(x[j], pb.exponent);
      r.add_point(ladder.heights[j], y[j], rhs, 1e-12 * rhs);
    }
    r.pass = r.violations == 0 && pb.exponent > 0.0 && pb.exponent <= 1.0;
    out.alpha3_tilde = pb.exponent;
    out.pass = out.pass && r.pass;
    out.reports.push_back(std::move(r));
  }
  return out;
}

/// The delta scan on the main stage; fills rows, fits and the invariant flags.
void holder_scan(HolderReport& rep, const Stage& s, const std::vector<double>& deltas, double tol) {
  const DomainPtr& d = s.d;
  const GridFunction& u = s.u;
  const double a = rep.alpha;
  rep.rows.assign(deltas.size(), HolderRow{});
  std::vector<std::vector<std::string>> row_notes(deltas.size());
  parallel_chunks(deltas.size(), 1, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      HolderRow& row = rep.rows[j];
      row.delta = deltas[j];
      row.eps = rep.delta0 * std::pow(row.delta / rep.delta0, rep.kappa);
      const RegionalFunction sup = sup_convolution(u, row.delta);
      const RegionalFunction avg = ball_average(u, row.delta);
      const RegionMask inner = shrink(d, row.eps);
      std::vector<std::size_t> ring;
      for (std::size_t i : avg.region.nodes()) {
        const auto k = static_cast<Eigen::Index>(i);
        const double g = avg.f.values[k] - u.values[k];
        row.sup_gap = std::max(row.sup_gap, g);
        row.l1_gap += std::abs(g);
        if (inner.contains(i)) {
          row.inner_gap = std::max(row.inner_gap, g);
        } else {
          ring.push_back(i);
          row.collar_gap = std::max(row.collar_gap, sup.f.values[k] - u.values[k]);
        }
      }
      row.l1_gap *= d->lattice().cell_volume();
      row.collar_bound = rep.C1 * std::pow(row.delta, a) + rep.C2 * std::pow(row.eps, a);

      // gluing max(hat u_delta - C eps^a, u) on Omega_eps, u elsewhere
      const double ea = std::pow(row.eps, a);
      auto glue = [&](double c) {
        GridFunction t = u;
        for (std::size_t i : inner.nodes()) {
          const auto k = static_cast<Eigen::Index>(i);
          t.values[k] = std::max(avg.f.values[k] - c * ea, u.values[k]);
        }
        return t;
      };
      row.glue_constant = rep.C1 + rep.C2;
      GridFunction ut = glue(row.glue_constant);
      PshCheck pc = check_psh(ut);
      if (!pc.ok) {
        // smallest C keeping the max equal to u on the ring around Omega_eps
        double need = row.glue_constant;
        for (std::size_t i : ring) {
          const auto k = static_cast<Eigen::Index>(i);
          need = std::max(need, (avg.f.values[k] - u.values[k]) / ea);
        }
        for (std::size_t i : inner.nodes()) {
          const auto k = static_cast<Eigen::Index>(i);
          if (d->dist(i) <= row.eps + 2.0 * d->h()) need = std::max(need, (avg.f.values[k] - u.values[k]) / ea);
        }
        row_notes[j].push_back("delta = " + fmt(row.delta) + ": gluing not PSH with C = " + fmt(row.glue_constant) +
                               " (lambda_min " + fmt(pc.worst_eigenvalue) + "), raised to " + fmt(need));
        row.glue_constant = need * (1.0 + 1e-12);
        ut = glue(row.glue_constant);
        pc = check_psh(ut);
      }
      row.glue_psh = pc.ok;
      row.glue_min_eigenvalue = pc.worst_eigenvalue;
      row.glue_equal_outside = true;
      row.glue_above = true;
      for (std::size_t i : d->interior_nodes()) {
        const auto k = static_cast<Eigen::Index>(i);
        if (!inner.contains(i) && ut.values[k] != u.values[k]) row.glue_equal_outside = false;
        if (ut.values[k] < u.values[k]) row.glue_above = false;
      }
    }
  });
  for (auto& v : row_notes) rep.notes.insert(rep.notes.end(), v.begin(), v.end());

  rep.coupling_ok = true;
  rep.collar_bound_ok = true;
  rep.gluing_ok = true;
  for (const auto& r : rep.rows) {
    if (!(r.delta <= r.eps && r.eps < rep.delta0)) rep.coupling_ok = false;
    if (r.collar_gap > r.collar_bound + tol) rep.collar_bound_ok = false;
    if (!(r.glue_psh && r.glue_equal_outside && r.glue_above)) rep.gluing_ok = false;
  }

  std::vector<double> x;
  std::vector<double> g;
  std::vector<double> l1;
  for (const auto& r : rep.rows) {
    x.push_back(r.delta);
    g.push_back(r.sup_gap);
    l1.push_back(r.l1_gap);
  }
  const bool gaps_vanish = std::all_of(g.begin(), g.end(), [](double q) { return q <= 0.0; });
  if (gaps_vanish) {
    rep.notes.push_back("hat u_delta = u on every Omega_delta: exponent taken as 1");
    rep.empirical_exponent = 1.0;
    rep.exponent_fit = LineFit{1.0, 0.0, 0.0, x.size()};
  } else if (std::any_of(g.begin(), g.end(), [](double q) { return q <= 0.0; })) {
    throw Error("holder scan: mixed zero and positive gaps; refine the grid");
  } else {
    rep.exponent_fit = fit_loglog(x, g);
    rep.empirical_exponent = rep.exponent_fit.slope;
    for (auto& r : rep.rows)
      r.fit = std::exp(rep.exponent_fit.intercept) * std::pow(r.delta, rep.exponent_fit.slope);
  }
  if (std::all_of(l1.begin(), l1.end(), [](double q) { return q > 0.0; })) {
    rep.lap_fit = fit_loglog(x, l1);
    rep.lap_ok = rep.lap_fit.slope >= rep.lap_slope_min;
  } else {
    rep.lap_ok = std::all_of(l1.begin(), l1.end(), [](double q) { return q <= 0.0; });
    rep.lap_fit = LineFit{1.0, 0.0, 0.0, x.size()};
    rep.notes.push_back("L1 gaps vanish on part of the ladder");
  }
  rep.exponent_ok = rep.empirical_exponent >= rep.alpha4 - rep.fit_tolerance;
}

void finish_constants(HolderReport& rep, int n) {
  rep.alpha4 = theoretical_alpha4(n, rep.alpha, rep.alpha2, rep.alpha3, rep.alpha3_tilde);
  rep.kappa = rep.alpha2 * rep.alpha3 * rep.alpha3_tilde / (2.0 * n + 1.0 + rep.alpha);
  rep.alpha4_identity = rep.alpha4 == rep.alpha * rep.kappa && rep.alpha4 > 0.0 && rep.alpha4 <= 1.0;
}

std::vector<double> ladder_for(const GridDomain& d, const HolderOptions& o, double delta0) {
  std::vector<double> deltas = o.deltas.empty() ? default_delta_ladder(d, delta0, o.ladder_points) : o.deltas;
  if (static_cast<int>(deltas.size()) < o.min_ladder_points)
    throw Error("holder scan: " + std::to_string(deltas.size()) + " admissible deltas (need " +
                std::to_string(o.min_ladder_points) + "); raise the resolution");
  for (double delta : deltas)
    if (!(delta >= d.h() && delta < delta0)) throw Error("holder scan: delta " + fmt(delta) + " outside [h, delta0)");
  std::sort(deltas.begin(), deltas.end(), std::greater<double>());
  return deltas;
}

double tolerance(const GridDomain& d, const SolverOptions& opt) { return opt.sandwich_tol < 0.0 ? 10.0 * d.h() : opt.sandwich_tol; }

Stage theorem_b_stage(const TheoremBInput& in, int res, int pad) {
  Stage s;
  s.d = build_domain(in.domain, res, pad);
  s.phi = sample(s.d, in.phi.f);
  s.sub = s.phi;
  s.mu = in.measure ? in.measure(s.d, s.phi) : scheme_measure(s.phi);
  s.base = s.mu;
  s.solve = solve_dirichlet(DirichletProblem{s.d, s.mu, in.psi.f, s.phi}, in.options.solver);
  s.u = s.solve.u;
  s.env = s.solve.envelope;
  return s;
}

}  // namespace

HolderReport theorem_b_pipeline(const TheoremBInput& in) {
  const auto t0 = std::chrono::steady_clock::now();
  const HolderOptions& o = in.options;
  const int n = in.domain.n;
  HolderReport rep;
  rep.id = "theorem_b";
  rep.n = n;
  rep.fit_tolerance = o.fit_tolerance;
  rep.lap_slope_min = o.lap_slope_min;
  if (!in.phi.zero_trace) rep.notes.push_back("subsolution " + in.phi.label + " is not declared zero on the boundary");
  rep.alpha_phi = in.phi.holder_exponent;
  rep.alpha_psi = in.psi.holder_exponent;
  rep.alpha = std::min(rep.alpha_phi, 0.5 * rep.alpha_psi);

  const Stage probe = theorem_b_stage(in, probe_resolution(o, n), probe_pad(o, n));
  ProbeResult pr = run_probes(probe, o, rep.alpha, false);
  rep.alpha2 = pr.alpha2;
  rep.alpha3 = pr.alpha3;
  rep.probes = std::move(pr.reports);
  rep.notes.insert(rep.notes.end(), pr.notes.begin(), pr.notes.end());
  finish_constants(rep, n);

  const Stage s = theorem_b_stage(in, in.resolution, in.pad);
  rep.h = s.d->h();
  rep.delta0 = o.delta0 > 0.0 ? o.delta0 : 0.2 * s.d->inradius();
  rep.converged = s.solve.converged;
  rep.dominated = s.solve.subsolution_dominated;
  rep.sandwich_ok = s.solve.sandwich_ok;
  rep.sandwich_violation = s.solve.sandwich_violation;
    rep.hopf = hopf_constant(*s.d);
  rep.C1 = holder_seminorm(s.env, rep.alpha).value;
  rep.C2 = holder_seminorm(s.phi, rep.alpha).value;
  const std::vector<double> deltas = ladder_for(*s.d, o, rep.delta0);
  holder_scan(rep, s, deltas, tolerance(*s.d, o.solver));
  rep.u = s.u;

  rep.pass = rep.converged && rep.dominated && rep.sandwich_ok && rep.coupling_ok && rep.collar_bound_ok &&
             rep.gluing_ok && rep.lap_ok && rep.exponent_ok && rep.alpha4_identity && pr.pass;
  if (!rep.converged) rep.notes.push_back("solver did not converge");
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

struct CorollaryStage {
  Stage s;
  SolveReport outer;      // v on the enlarged domain
  double lp_norm = 0.0;   // (int f^p dmu)^{1/p}
};

CorollaryStage corollary_stage(const CorollaryInput& in, int res, int pad) {
  CorollaryStage c;
  Stage& s = c.s;
  s.d = build_domain(in.domain, res, pad);
  const GridDomain& d = *s.d;
  const Lattice& lat = d.lattice();
  const int n = d.n();
  s.phi = sample(s.d, in.phi.f);
  s.base = in.measure ? in.measure(s.d, s.phi) : scheme_measure(s.phi);

  // f mu on Omega; Lp check
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lat.size()));
  double fp = 0.0;
  for (std::size_t i : d.interior_nodes()) {
    const auto k = static_cast<Eigen::Index>(i);
    const double fv = in.f(lat.coord(i));
    if (!std::isfinite(fv) || fv < 0.0) throw Error("corollary_c: density " + in.f_label + " is negative or not finite at an interior node");
    w[k] = fv * s.base.weights[k];
    fp += std::pow(fv, in.p) * s.base.weights[k];
  }
  if (!std::isfinite(fp)) throw Error("corollary_c: f is not in L^p(dmu) on the grid");
  c.lp_norm = std::pow(fp, 1.0 / in.p);
  s.mu = GridMeasure(s.d, w);

  // enlarged domain on the same node positions
  const DomainSpec big = enlarge(in.domain, in.collar);
  const int extra = static_cast<int>(std::ceil((big.extent() - in.domain.extent()) / lat.h)) + std::max(pad, 2);
  const Lattice blat(n, lat.m + 2 * extra, lat.h);
  const DomainPtr bd = build_domain(big, blat);
  auto lift = [&](std::size_t i) {
    auto mi = lat.multi(i);
    for (int k = 0; k < lat.dim(); ++k) mi[k] += extra;
    return blat.index(mi);
  };
  Eigen::VectorXd bw = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(blat.size()));
  for (std::size_t i : d.interior_nodes()) {
    const std::size_t j = lift(i);
    if (!bd->interior(j)) throw Error("corollary_c: collar construction failed (node of Omega outside the enlarged domain)");
    bw[static_cast<Eigen::Index>(j)] = w[static_cast<Eigen::Index>(i)];
  }
  const Field zero = [](const Point&) { return 0.0; };
  c.outer = solve_dirichlet(DirichletProblem{bd, GridMeasure(bd, bw), zero, std::nullopt}, in.options.solver);
  const GridFunction& vb = c.outer.u;

  // v on Omega, maximal extension h of -v, subsolution v + h with zero trace
  Eigen::VectorXd vv(static_cast<Eigen::Index>(lat.size()));
  for (std::size_t i = 0; i < lat.size(); ++i) vv[static_cast<Eigen::Index>(i)] = vb[lift(i)];
  const Field minus_v = [bvals = vb.values, blat](const Point& p) { return -blat.interpolate(bvals, p); };
  const SolveReport hr = envelope_report(s.d, minus_v, in.options.solver);
  if (!hr.converged) s.notes.push_back("maximal extension of -v did not converge");
  s.sub = GridFunction(s.d, vv + hr.u.values, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.crossings().size())));
  s.solve = solve_dirichlet(DirichletProblem{s.d, s.mu, zero, s.sub}, in.options.solver);
  s.u = s.solve.u;
  s.env = s.solve.envelope;
  return c;
}

/// Exponent of sup over {dist <= e} of |g| on a dyadic ladder of e, clamped to (0, 1].
double boundary_exponent(const GridFunction& g, const std::vector<double>& es, LineFit* fit) {
  std::vector<double> x;
  std::vector<double> y;
  for (double e : es) {
    double m = 0.0;
    for (std::size_t i : g.domain->interior_nodes())
      if (g.domain->dist(i) <= e) m = std::max(m, std::abs(g[i]));
    if (m > 0.0) {
      x.push_back(e);
      y.push_back(m);
    }
  }
  if (x.size() < 2) return 1.0;
  const LineFit lf = fit_loglog(x, y);
  if (fit) *fit = lf;
  return std::clamp(lf.slope, 1e-3, 1.0);
}

}  // namespace

HolderReport corollary_c_pipeline(const CorollaryInput& in) {
  const auto t0 = std::chrono::steady_clock::now();
  const HolderOptions& o = in.options;
  const int n = in.domain.n;
  if (!(in.p > 1.0)) throw Error("corollary_c: p must exceed 1");
  if (!in.f) throw Error("corollary_c: missing density");
  HolderReport rep;
  rep.id = "corollary_c";
  rep.n = n;
  rep.fit_tolerance = o.fit_tolerance;
  rep.lap_slope_min = o.lap_slope_min;

  const CorollaryStage pc = corollary_stage(in, probe_resolution(o, n), probe_pad(o, n));
  const Stage& ps = pc.s;

  // capacity scan of f mu against C(tau) cap^{1+tau}
  std::vector<double> radii = in.k_radii;
  if (radii.empty())
    for (double r : {0.1, 0.2, 0.3, 0.4, 0.5}) radii.push_back(r * ps.d->inradius());
  std::vector<RegionMask> family;
  for (double r : radii) family.push_back(ball_region(ps.d, Point::Zero(), r));
  InequalityReport vc = volume_capacity_scan(ps.mu, family, in.tau, o.solver);
  vc.id = "volume_capacity_f";
  vc.add_constant("p", in.p, "input");
  vc.add_constant("lp_norm", pc.lp_norm, "(int f^p dmu)^{1/p} on the probe grid");
  // the target of this scan is the power form; the exponential fit is informational
  std::size_t power_violations = 0;
  for (const auto& row : vc.instrument.rows)
    if (row[1] > row[3] * (1.0 + 1e-12)) ++power_violations;
  const bool vc_pass = power_violations == 0 && vc.constant("C_tau") < std::numeric_limits<double>::infinity();

  const SolveReport& ho = pc.outer;
  if (!ho.converged) rep.notes.push_back("probe grid: enlarged-domain solve did not converge");
  const double es0 = 0.2 * ps.d->inradius();
  std::vector<double> es;
  for (int j = 0; j < 5; ++j) es.push_back(std::ldexp(es0, -j));
  rep.alpha_psi = 1.0;

  const CorollaryStage mc = corollary_stage(in, in.resolution, in.pad);
  const Stage& s = mc.s;
  LineFit bf;
  rep.alpha_phi = boundary_exponent(s.sub, es, &bf);
  rep.alpha = std::min(rep.alpha_phi, 0.5 * rep.alpha_psi);
  rep.notes.push_back("boundary exponent of v + h fitted on dist <= e, e = " + fmt(es.back()) + ".." + fmt(es.front()) +
                      ": slope " + fmt(bf.slope));

  ProbeResult pr = run_probes(ps, o, rep.alpha, true);
  rep.alpha2 = pr.alpha2;
  rep.alpha3 = pr.alpha3;
  rep.alpha3_tilde = pr.alpha3_tilde;
  rep.probes.push_back(std::move(vc));
  for (auto& r : pr.reports) rep.probes.push_back(std::move(r));
  rep.notes.insert(rep.notes.end(), pr.notes.begin(), pr.notes.end());
  rep.notes.insert(rep.notes.end(), ps.notes.begin(), ps.notes.end());
  rep.notes.insert(rep.notes.end(), s.notes.begin(), s.notes.end());
  finish_constants(rep, n);

  rep.h = s.d->h();
  rep.delta0 = o.delta0 > 0.0 ? o.delta0 : 0.2 * s.d->inradius();
  rep.converged = s.solve.converged && mc.outer.converged;
  rep.dominated = s.solve.subsolution_dominated;
  if (!rep.dominated) rep.notes.push_back("f mu exceeds the scheme operator of v + h at some node (cut-arm transfer)");
  rep.sandwich_ok = s.solve.sandwich_ok;
  rep.sandwich_violation = s.solve.sandwich_violation;
  rep.hopf = hopf_constant(*s.d);
  rep.C1 = 0.0;
  rep.C2 = holder_seminorm(s.sub, rep.alpha).value;
  const std::vector<double> deltas = ladder_for(*s.d, o, rep.delta0);
  holder_scan(rep, s, deltas, tolerance(*s.d, o.solver));
  rep.u = s.u;

  rep.pass = rep.converged && rep.sandwich_ok && rep.coupling_ok && rep.collar_bound_ok && rep.gluing_ok && rep.lap_ok &&
             rep.exponent_ok && rep.alpha4_identity && pr.pass && vc_pass && rep.empirical_exponent > 0.0;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace malab
