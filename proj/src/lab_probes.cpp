#include "malab/fit.hpp"
#include "malab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace malab {

namespace {

// Largest mollifier radius the lattice supports around the closed domain.
double collar_width(const GridDomain& d) {
  const Lattice& lat = d.lattice();
  int r = lat.m;
  auto visit = [&](std::size_t idx) {
    const auto mi = lat.multi(idx);
    for (int k = 0; k < lat.dim(); ++k) r = std::min({r, mi[k], lat.m - 1 - mi[k]});
  };
  for (std::size_t i : d.interior_nodes()) visit(i);
  for (const auto& c : d.crossings()) visit(c.node);
  return r * lat.h;
}

RegionMask positive_set(const GridFunction& diff, double level) {
  const DomainPtr& d = diff.domain;
  RegionMask m{d, std::vector<std::uint8_t>(d->lattice().size(), 0), RegionKind::FunctionSublevel};
  for (std::size_t i : d->interior_nodes())
    if (diff[i] > level) m.mask[i] = 1;
  return m;
}

double weighted_sum(const Eigen::VectorXd& g, const Eigen::VectorXd& w, const GridDomain& d, bool positive_part) {
  double s = 0.0;
  for (std::size_t i : d.interior_nodes()) {
    const auto k = static_cast<Eigen::Index>(i);
    s += (positive_part ? std::max(g[k], 0.0) : g[k]) * w[k];
  }
  return s;
}

void check_support(const GridFunction& diff, double eps) {
  const RegionMask inner = shrink(diff.domain, eps);
  for (std::size_t i : diff.domain->interior_nodes())
    if (!inner.contains(i) && std::abs(diff[i]) > 0.0)
      throw Error("probe: perturbation support leaves Omega_eps");
}

}  // namespace

DomeLadder dome_ladder(const GridFunction& u, double eps, int rungs) {
  const DomainPtr& d = u.domain;
  const Lattice& lat = d->lattice();
  const int n = d->n();
  if (rungs < 2) throw Error("dome_ladder: need at least two rungs");
  const RegionMask inner = shrink(d, eps);
  if (inner.empty()) throw Error("dome_ladder: Omega_eps is empty");
  std::size_t centre = 0;
  double depth = -1.0;
  for (std::size_t i : inner.nodes()) {
    if (d->dist(i) > depth) {
      depth = d->dist(i);
      centre = i;
    }
  }
  DomeLadder out;
  out.center = lat.coord(centre);
  const double r0 = 0.5 * (depth - eps);
  if (r0 < 2.0 * lat.h) throw Error("dome_ladder: Omega_eps too thin for a dome");
  double lam = std::numeric_limits<double>::infinity();
  for (std::size_t i : d->interior_nodes()) {
    if ((lat.coord(i) - out.center).head(2 * n).norm() <= r0 + lat.h)
      lam = std::min(lam, lambda_min(complex_hessian(*d, u.values, u.trace, i), n));
  }
  if (!(lam > 0.0)) throw Error("dome_ladder: u is not strictly PSH around the dome centre");
  out.curvature = 0.5 * lam;
  out.support_radius = r0;
  const double c0 = out.curvature * r0 * r0;
  const Point a = out.center;
  for (int j = 0; j < rungs; ++j) {
    const double c = c0 * std::ldexp(1.0, -j);
    if (std::sqrt(c / out.curvature) < 2.0 * lat.h) break;
    const double m = out.curvature;
    const GridFunction bump = sample(d, [a, c, m, n](const Point& p) { return c - m * (p - a).head(2 * n).squaredNorm(); });
    out.v.push_back(max(u, u + bump));
    out.heights.push_back(c);
  }
  if (out.v.size() < 2) throw Error("dome_ladder: grid too coarse for two rungs");
  return out;
}

InequalityReport stability_probe(const ProbeSetup& s, const DomeLadder& ladder) {
  const DomainPtr& d = s.u.domain;
  const int n = d->n();
  InequalityReport r;
  r.id = "stability";
  r.parameter = "height";
  std::vector<double> x;
  std::vector<double> y;
  int non_psh = 0;
  for (const auto& v : ladder.v) {
    const GridFunction diff = v - s.u;
    check_support(diff, s.eps);
    if (!check_psh(v).ok) ++non_psh;
    x.push_back(weighted_sum(diff.values, s.mu.weights, *d, true));
    y.push_back(diff.interior_max());
  }
  if (non_psh) r.notes.push_back(std::to_string(non_psh) + " rungs fail the discrete PSH check");
  const PowerBound pb = fit_power_bound(x, y);
  const double scale = std::pow(s.eps, n);
  r.add_constant("alpha2", pb.exponent, "log-log least squares of sup(v-u) on int max(v-u,0) dmu, clamped to (0,1]");
  r.add_constant("alpha2_raw_slope", pb.fit.slope, "unclamped slope");
  r.add_constant("alpha2_fit_rms", pb.fit.rms_residual, "residual of the alpha2 fit");
  r.add_constant("C", pb.constant * scale, "one-sided constant of (C / eps^n) x^alpha2");
  r.add_constant("eps", s.eps, "input");
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double rhs = pb.constant * std::pow(x[j], pb.exponent);
    r.add_point(ladder.heights[j], y[j], rhs, 1e-12 * rhs);
  }

  // capacity-growth chain at s = t = |s0| / 4
  const double c0 = hopf_constant(*d);
  const GridFunction pe = regularize_subsolution(s.phi, c0 * s.eps);
  const GridMeasure ma_pe = ma_measure_unchecked(pe);
  const double tol = 10.0 * d->h();
  const int tau = 1;
  r.instrument.columns = {"height", "t", "cap_U_s", "cap_U_s_t", "t^n cap_U_s", "mu_U_s_t", "ma_phi_eps_U_s_t"};
  const std::size_t growth = s.growth_rungs < 0 ? ladder.v.size()
                                                : std::min<std::size_t>(ladder.v.size(), static_cast<std::size_t>(s.growth_rungs));
  bool chain_ok = true;
  std::vector<double> caps;
  std::vector<double> tops;
  for (std::size_t j = 0; j < growth; ++j) {
    const GridFunction diff = ladder.v[j] - s.u;
    const double sup = diff.interior_max();
    const double t = sup / 4.0;
    // U(s) = {u < v + s0 + s} = {v - u > sup - s}
    const RegionMask us = positive_set(diff, sup - t);
    const RegionMask ust = positive_set(diff, sup - 2.0 * t);
    const CapacityResult cs = capacity(us, s.solver);
    const CapacityResult cst = capacity(ust, s.solver);
    const double left = std::pow(t, n) * cs.value;
    const double mid = s.mu.on(ust);
    const double top = ma_pe.on(ust);
    if (left > mid + tol * std::max(left, mid)) {
      chain_ok = false;
      r.notes.push_back("comparison link fails at rung " + std::to_string(j));
    }
    if (mid > top + tol * std::max(mid, top)) {
      chain_ok = false;
      r.notes.push_back("domination link fails at rung " + std::to_string(j));
    }
    caps.push_back(cst.value);
    tops.push_back(top);
    r.instrument.rows.push_back({ladder.heights[j], t, cs.value, cst.value, left, mid, top});
  }
  if (!caps.empty()) {
    std::vector<double> g;
    for (double c : caps) g.push_back(std::pow(c, 1.0 + tau) / std::pow(c0 * s.eps, n));
    r.add_constant("C_tau", envelope_constant(tops, g), "one-sided constant of (C(tau)/(c0 eps)^n) cap(U(s+t))^{1+tau}, tau = 1");
  }
  r.add_constant("capacity_growth_ok", chain_ok ? 1.0 : 0.0, "t^n cap(U(s)) <= mu(U(s+t)) <= (dd^c phi_{c0 eps})^n (U(s+t))");
  r.pass = r.violations == 0 && chain_ok && pb.exponent > 0.0 && pb.exponent <= 1.0;
  return r;
}

InequalityReport l1_l1_probe(const ProbeSetup& s, const DomeLadder& ladder, double alpha) {
  const DomainPtr& d = s.u.domain;
  const int n = d->n();
  InequalityReport r;
  r.id = "l1_l1";
  r.parameter = "height";
  const RegionMask all = full_interior(d);
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> absdiff_norms;
  for (const auto& v : ladder.v) {
    const GridFunction diff = v - s.u;
    check_support(diff, s.eps);
    const GridFunction ad = map(diff, [](double q) { return std::abs(q); });
    x.push_back(integrate_volume(ad, all));
    y.push_back(weighted_sum(ad.values, s.mu.weights, *d, false));
  }
  const PowerBound pb = fit_power_bound(x, y);
  const double scale = std::pow(s.eps, n + 1);
  r.add_constant("alpha3", pb.exponent, "log-log least squares of int|v-u| dmu on int|v-u| dV, clamped to (0,1]");
  r.add_constant("alpha3_raw_slope", pb.fit.slope, "unclamped slope");
  r.add_constant("alpha3_fit_rms", pb.fit.rms_residual, "residual of the alpha3 fit");
  r.add_constant("C", pb.constant * scale, "one-sided constant of (C / eps^{n+1}) x^alpha3");
  r.add_constant("eps", s.eps, "input");
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double rhs = pb.constant * std::pow(x[j], pb.exponent);
    r.add_point(ladder.heights[j], y[j], rhs, 1e-12 * rhs);
  }

  // induction instrument: I_1, I_2 at each level k with S = (dd^c phi_eps)^k ^ beta^{n-k-1}
  const GridFunction pe = regularize_subsolution(s.phi, s.eps);
  const double tmax = collar_width(*d);
  const double h = d->h();
  r.instrument.columns = {"height", "k", "tau_k", "t", "l1_norm", "lhs", "I1", "I2"};
  int clamped = 0;
  for (std::size_t j = 0; j < ladder.v.size(); ++j) {
    const GridFunction diff = ladder.v[j] - s.u;
    double tau_k = 1.0;
    for (int k = 0; k < n; ++k) {
      double t = std::pow(x[j], tau_k / 3.0);
      if (t > tmax || t < h) {
        ++clamped;
        t = std::clamp(t, h, tmax);
      }
      const GridFunction moll = mollify(pe, t, alpha).f;
      std::vector<GridFunction> f1{moll};
      std::vector<GridFunction> f2{moll - pe};
      std::vector<GridFunction> f0{pe};
      for (int q = 0; q < k; ++q) {
        f1.push_back(pe);
        f2.push_back(pe);
        f0.push_back(pe);
      }
      const double lhs = weighted_sum(diff.values, mixed_measure(f0, false).weights, *d, false);
      const double i1 = std::abs(weighted_sum(diff.values, mixed_measure(f1, false).weights, *d, false));
      const double i2 = std::abs(weighted_sum(diff.values, signed_mixed_weights(f2), *d, false));
      r.instrument.rows.push_back({ladder.heights[j], static_cast<double>(k), tau_k, t, x[j], lhs, i1, i2});
      tau_k = alpha * tau_k / 3.0;
    }
  }
  if (clamped) r.notes.push_back(std::to_string(clamped) + " mollifier radii clamped to [h, collar]");
  r.pass = r.violations == 0 && pb.exponent > 0.0 && pb.exponent <= 1.0;
  return r;
}

}  // namespace malab
