#include "malab/fit.hpp"
#include "malab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace malab {

namespace {

InequalityReport sublevel_report(int n, const std::vector<double>& s_in, const std::vector<double>& nu_in) {
  InequalityReport r;
  r.id = "sublevel_decay";
  r.parameter = "s";
  std::vector<double> s;
  std::vector<double> nu;
  for (std::size_t i = 0; i < s_in.size(); ++i) {
    if (!(nu_in[i] > 0.0)) {
      r.notes.push_back("scan truncated at s = " + std::to_string(s_in[i]) + " (empty sublevel)");
      break;
    }
    s.push_back(s_in[i]);
    nu.push_back(nu_in[i]);
  }
  if (s.size() < 2) {
    r.notes.push_back("fewer than two nonempty sublevels");
    return r;
  }
  const LineFit poly = fit_loglog(s, nu);
  std::vector<double> gp;
  for (double x : s) gp.push_back(std::pow(x, -n));
  r.add_constant("poly_exponent", poly.slope, "log-log least squares of nu(v < -s) on s, all s");
  r.add_constant("poly_fit_rms", poly.rms_residual, "residual of the log-log fit");
  r.add_constant("poly_C", envelope_constant(nu, gp), "one-sided constant of C / s^n");

  std::vector<double> s2;
  std::vector<double> nu2;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= 2.0) {
      s2.push_back(s[i]);
      nu2.push_back(nu[i]);
    }
  }
  double alpha1 = 0.0;
  bool tau_ok = true;
  if (s2.size() >= 2) {
    const LineFit ex = fit_semilog(s2, nu2);
    const double tau = -ex.slope;
    r.add_constant("tau", tau, "semilog least squares of nu(v < -s) on s, s >= 2");
    r.add_constant("tau_fit_rms", ex.rms_residual, "residual of the semilog fit");
    alpha1 = tau / 2.0;
    tau_ok = tau > 0.0;
    r.add_constant("alpha1", alpha1, "tau / 2");
  } else {
    r.notes.push_back("no two nonempty sublevels with s >= 2: combined bound uses alpha1 = 0");
  }
  std::vector<double> g;
  for (double x : s) g.push_back(std::exp(-alpha1 * x) * std::pow(x, -n));
  const double c = envelope_constant(nu, g);
  r.add_constant("C", c, "one-sided constant of C e^{-alpha1 s} / s^n");
  for (std::size_t i = 0; i < s.size(); ++i) r.add_point(s[i], nu[i], c * g[i], 1e-12 * c * g[i]);
  r.pass = tau_ok && r.violations == 0;
  return r;
}

}  // namespace

InequalityReport sublevel_decay_scan(const GridFunction& v, const GridMeasure& nu, std::span<const double> s_grid) {
  const int n = v.domain->n();
  std::vector<double> s(s_grid.begin(), s_grid.end());
  std::vector<double> mass;
  for (double x : s) {
    double m = 0.0;
    for (std::size_t i : v.domain->interior_nodes())
      if (v[i] < -x) m += nu.weights[static_cast<Eigen::Index>(i)];
    mass.push_back(m);
  }
  InequalityReport r = sublevel_report(n, s, mass);
  const E0Report mem = is_in_E0_prime(v);
  r.add_constant("v_mass", mem.mass, "total MA mass of v");
  if (!mem.member) {
    r.notes.push_back("precondition: v not in E0' (" + mem.failed + ")");
    r.pass = false;
  }
  return r;
}

InequalityReport sublevel_decay_radial(int n, const RadialProfile& v, const RadialProfile& phi,
                                       std::span<const double> s_grid) {
  std::vector<double> s(s_grid.begin(), s_grid.end());
  std::vector<double> mass;
  for (double x : s) mass.push_back(radial_sublevel_mass(n, v, phi, x));
  InequalityReport r = sublevel_report(n, s, mass);
  // total mass of v: the limit of the ball mass at the boundary
  const double vm = radial_ball_mass(n, v, 1.0);
  r.add_constant("v_mass", vm, "closed-form total MA mass of v");
  if (vm > 1.0 + 1e-12) {
    r.notes.push_back("precondition: v not in E0' (mass)");
    r.pass = false;
  }
  return r;
}

InequalityReport volume_capacity_fit(int n, std::span<const double> caps, std::span<const double> masses,
                                     double tau) {
  if (caps.size() != masses.size()) throw Error("volume_capacity_fit: size mismatch");
  InequalityReport r;
  r.id = "volume_capacity";
  r.parameter = "cap";
  r.add_constant("tau", tau, "input");
  std::set<double> distinct(caps.begin(), caps.end());
  if (std::all_of(masses.begin(), masses.end(), [](double m) { return m == 0.0; })) {
    for (std::size_t i = 0; i < caps.size(); ++i) r.add_point(caps[i], 0.0, 0.0);
    r.add_constant("alpha0", 1.0, "zero measure: any constants");
    r.add_constant("C", 0.0, "zero measure");
    r.add_constant("C_tau", 0.0, "zero measure");
    r.notes.push_back("zero measure");
    r.pass = true;
    return r;
  }
  if (distinct.size() < 3) throw Error("volume_capacity_fit: degenerate fit (fewer than 3 distinct capacities)");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (!(caps[i] > 0.0)) throw Error("volume_capacity_fit: capacities must be positive");
    if (masses[i] > 0.0) {
      x.push_back(std::pow(caps[i], -1.0 / n));
      y.push_back(std::log(masses[i] / caps[i]));
    }
  }
  if (x.size() < 3) throw Error("volume_capacity_fit: degenerate fit (fewer than 3 charged sets)");
  const LineFit lf = fit_line(x, y);
  const double alpha0 = -lf.slope;
  r.add_constant("alpha0", alpha0, "least squares of log(mu(K)/cap(K)) on cap(K)^{-1/n}");
  r.add_constant("alpha0_fit_rms", lf.rms_residual, "residual of the alpha0 fit");
  std::vector<double> g;
  std::vector<double> gp;
  for (double c : caps) {
    g.push_back(c * std::exp(-alpha0 * std::pow(c, -1.0 / n)));
    gp.push_back(std::pow(c, 1.0 + tau));
  }
  const double cc = envelope_constant(masses, g);
  const double ct = envelope_constant(masses, gp);
  r.add_constant("C", cc, "one-sided constant of C cap exp(-alpha0 cap^{-1/n})");
  r.add_constant("C_tau", ct, "one-sided constant of C(tau) cap^{1+tau}");
  std::vector<double> pc;
  std::vector<double> pm;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (masses[i] > 0.0) {
      pc.push_back(caps[i]);
      pm.push_back(masses[i]);
    }
  }
  r.add_constant("power_slope", fit_loglog(pc, pm).slope, "log-log least squares of mu(K) on cap(K)");
  r.instrument.columns = {"cap", "mass", "exp_rhs", "power_rhs"};
  for (std::size_t i = 0; i < caps.size(); ++i) {
    r.add_point(caps[i], masses[i], cc * g[i], 1e-12 * cc * g[i]);
    r.instrument.rows.push_back({caps[i], masses[i], cc * g[i], ct * gp[i]});
  }
  r.pass = alpha0 > 0.0 && r.violations == 0;
  return r;
}

InequalityReport volume_capacity_scan(const GridMeasure& mu, std::span<const RegionMask> family, double tau,
                                      const SolverOptions& opt) {
  std::vector<double> caps;
  std::vector<double> masses;
  bool converged = true;
  for (const auto& k : family) {
    const CapacityResult c = capacity(k, opt);
    converged = converged && c.converged;
    caps.push_back(c.value);
    masses.push_back(mu.on(k));
  }
  InequalityReport r = volume_capacity_fit(mu.domain->n(), caps, masses, tau);
  if (!converged) {
    r.notes.push_back("a relative extremal solve did not converge");
    r.pass = false;
  }
  return r;
}

InequalityReport mass_est_scan(const GridFunction& v, int k, std::span<const double> eps_grid) {
  const DomainPtr& d = v.domain;
  if (k < 1 || k > d->n()) throw Error("mass_est_scan: k must lie in [1, n]");
  InequalityReport r;
  r.id = "mass_est";
  r.parameter = "eps";
  std::vector<GridFunction> args(static_cast<std::size_t>(k), v);
  const GridMeasure m = mixed_measure(args);
  const double vn = std::pow(v.sup_norm(), k);
  std::vector<double> e;
  std::vector<double> lhs;
  std::vector<double> g;
  for (double eps : eps_grid) {
    const double mass = m.on(shrink(d, eps));
    if (!(mass > 0.0)) {
      r.notes.push_back("empty or massless Omega_eps at eps = " + std::to_string(eps));
      continue;
    }
    e.push_back(eps);
    lhs.push_back(mass);
    g.push_back(vn * std::pow(eps, -k));
  }
  if (e.size() < 2) throw Error("mass_est_scan: fewer than two usable eps values");
  const LineFit lf = fit_loglog(e, lhs);
  const double c = envelope_constant(lhs, g);
  r.add_constant("k", k, "input");
  r.add_constant("slope", lf.slope, "log-log least squares of the Omega_eps mass on eps");
  r.add_constant("slope_fit_rms", lf.rms_residual, "residual of the slope fit");
  r.add_constant("C", c, "one-sided constant of C |v|^k / eps^k");
  for (std::size_t i = 0; i < e.size(); ++i) r.add_point(e[i], lhs[i], c * g[i], 1e-12 * c * g[i]);
  r.pass = lf.slope >= -k && r.violations == 0;
  return r;
}

InequalityReport phi_eps_scan(const GridFunction& phi, const GridMeasure& mu, std::span<const double> eps_grid) {
  const DomainPtr& d = phi.domain;
  const int n = d->n();
  InequalityReport r;
  r.id = "phi_eps_mass";
  r.parameter = "eps";
  const double a = subsolution_bound(phi);
  r.instrument.columns = {"eps", "total_mass", "dominated", "worst_excess"};
  std::vector<double> e;
  std::vector<double> lhs;
  std::vector<double> g;
  bool dominated = true;
  bool psh = true;
  for (double eps : eps_grid) {
    const GridFunction pe = regularize_subsolution(phi, eps);
    if (!check_psh(pe).ok) {
      psh = false;
      r.notes.push_back("phi_eps not discretely PSH at eps = " + std::to_string(eps));
    }
    const double total = ma_measure_unchecked(pe).total();
    const DominationReport dr = dominated_by(mu.restricted(rho_sublevel(d, eps)), pe);
    dominated = dominated && dr.dominated;
    e.push_back(eps);
    lhs.push_back(total);
    g.push_back(std::pow(a / eps, n));
    r.instrument.rows.push_back({eps, total, dr.dominated ? 1.0 : 0.0, dr.worst_excess});
  }
  if (e.size() < 2) throw Error("phi_eps_scan: need at least two eps values");
  const LineFit lf = fit_loglog(e, lhs);
  const double c = envelope_constant(lhs, g);
  r.add_constant("A", a, "1 + |phi|_inf");
  r.add_constant("slope", lf.slope, "log-log least squares of the phi_eps total mass on eps");
  r.add_constant("C", c, "one-sided constant of C A^n / eps^n");
  r.add_constant("dominated", dominated ? 1.0 : 0.0, "1_{D_eps} mu <= (dd^c phi_eps)^n node by node");
  for (std::size_t i = 0; i < e.size(); ++i) r.add_point(e[i], lhs[i], c * g[i], 1e-12 * c * g[i]);
  r.pass = psh && dominated && lf.slope >= -n && r.violations == 0;
  return r;
}

}  // namespace malab
