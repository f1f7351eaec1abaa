#include "malab/solver.hpp"

#include "malab/hessian.hpp"
#include "malab/linear.hpp"
#include "malab/parallel.hpp"
#include "malab/psh.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace malab {

namespace {

constexpr std::size_t kGrain = 2048;

int colour_of(const Lattice& lat, std::size_t idx) {
  const auto mi = lat.multi(idx);
  if (lat.n == 1) return (mi[0] + mi[1]) % 2;
  // weights (1,2,3,4) mod 7: every stencil offset has a nonzero class
  return (mi[0] + 2 * mi[1] + 3 * mi[2] + 4 * mi[3]) % 7;
}

std::vector<std::vector<std::size_t>> colour_classes(const GridDomain& d, const std::vector<std::uint8_t>* fixed) {
  const int colours = d.n() == 1 ? 2 : 7;
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(colours));
  for (std::size_t i : d.interior_nodes())
    if (!(fixed && (*fixed)[i])) out[static_cast<std::size_t>(colour_of(d.lattice(), i))].push_back(i);
  return out;
}

// Largest t <= min(upper, lambda-threshold) with det(B - tC) = dprime and B - tC >= 0.
double pointwise_value(const HessianSplit& s, double dprime, int n) {
  if (n == 1) {
    const double c = s.coef(0, 0).real();
    return (s.base(0, 0).real() - dprime) / c;
  }
  const CHessian& b = s.base;
  const CHessian& c = s.coef;
  const double qa = hermitian_det(c, 2);
  const double qb = c(0, 0).real() * b(1, 1).real() + c(1, 1).real() * b(0, 0).real() -
                    2.0 * (b(0, 1) * std::conj(c(0, 1))).real();
  const double qc = hermitian_det(b, 2) - dprime;
  const double disc = std::sqrt(std::max(qb * qb - 4.0 * qa * qc, 0.0));
  if (qb > 0.0) return 2.0 * qc / (qb + disc);
  return (qb - disc) / (2.0 * qa);
}

double oscillation(const GridFunction& u) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i : u.domain->interior_nodes()) {
    lo = std::min(lo, u[i]);
    hi = std::max(hi, u[i]);
  }
  return hi > lo ? hi - lo : 0.0;
}

int default_sweeps(const GridDomain& d) { return 2000 * d.lattice().m; }

double sandwich_tolerance(const GridDomain& d, const SolverOptions& opt) {
  return opt.sandwich_tol < 0.0 ? 10.0 * d.h() : opt.sandwich_tol;
}

}  // namespace

SweepResult pointwise_sweeps(GridFunction& u, const Eigen::VectorXd& target,
                             const std::vector<std::uint8_t>* fixed, double upper,
                             const SolverOptions& opt) {
  const GridDomain& d = *u.domain;
  const int n = d.n();
  const double scale = ma_constant(n) * d.lattice().cell_volume();
  const auto classes = colour_classes(d, fixed);
  const int max_sweeps = opt.max_sweeps > 0 ? opt.max_sweeps : default_sweeps(d);
  const double omega = n == 1 ? 1.0 : opt.omega;
  double mean = 0.0;
  for (std::size_t i : d.interior_nodes()) mean += std::max(target[static_cast<Eigen::Index>(i)], 0.0);
  mean /= static_cast<double>(std::max<std::size_t>(d.interior_nodes().size(), 1));
  const double tol_ma = opt.tol_ma_rel * std::max(mean, scale);
  auto residual_ok = [&] {
    for (const auto& cls : classes)
      for (std::size_t i : cls) {
        const CHessian hm = complex_hessian(d, u.values, u.trace, i);
        if (std::abs(scale * projected_det(hm, n) - target[static_cast<Eigen::Index>(i)]) > tol_ma) return false;
      }
    return true;
  };
  SweepResult res;
  std::vector<double> chunk_change;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0;
    for (const auto& cls : classes) {
      chunk_change.assign(chunk_count(cls.size(), kGrain), 0.0);
      parallel_chunks(cls.size(), kGrain, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        double local = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
          const std::size_t i = cls[k];
          const auto s = hessian_split(d, u.values, u.trace, i);
          const double dprime = std::max(target[static_cast<Eigen::Index>(i)], 0.0) / scale;
          const double t = pointwise_value(s, dprime, n);
          // PSD threshold: largest admissible value for zero target
          const double cap = n == 1 ? std::numeric_limits<double>::infinity() : pointwise_value(s, 0.0, n);
          const double old = u.values[static_cast<Eigen::Index>(i)];
          double v = old + omega * (t - old);
          v = std::min({v, cap, upper});
          local = std::max(local, std::abs(v - old));
          u.values[static_cast<Eigen::Index>(i)] = v;
        }
        chunk_change[c] = local;
      });
      for (double c : chunk_change) change = std::max(change, c);
    }
    res.sweeps = sweep;
    res.last_change = change;
    if (!std::isfinite(change)) throw NotConverged("pointwise_sweeps: iterate diverged");
    const double spread = std::max(1.0, oscillation(u));
    if (change <= opt.tol_change * spread || (change <= 1e-6 * spread && sweep % 10 == 0 && residual_ok())) {
      res.converged = true;
      break;
    }
  }
  return res;
}

Eigen::VectorXd ma_residual(const GridFunction& u, const Eigen::VectorXd& target) {
  const Eigen::VectorXd w = scheme_weights(u);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(w.size());
  for (std::size_t i : u.domain->interior_nodes()) {
    const auto k = static_cast<Eigen::Index>(i);
    r[k] = std::abs(w[k] - target[k]);
  }
  return r;
}

namespace {

// psi + A rho with A large enough for a PSH start below the envelope.
GridFunction psh_lift(const DomainPtr& d, const GridFunction& psi) {
  double worst = 0.0;
  for (std::size_t i : d->interior_nodes())
    worst = std::min(worst, lambda_min(complex_hessian(*d, psi.values, psi.trace, i), d->n()));
  const double a = -worst + 1e-3;
  GridFunction rho(d, d->rho(), Eigen::VectorXd::Zero(psi.trace.size()));
  return psi + a * rho;
}

SolveReport run(const DomainPtr& d, const GridMeasure& mu, const GridFunction& start, const SolverOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  if (d->n() == 1) {
    rep.u = solve_poisson(start, mu.weights);
    rep.iterations = 1;
    rep.converged = true;
  } else {
    rep.u = start;
    const auto sw = pointwise_sweeps(rep.u, mu.weights, nullptr, std::numeric_limits<double>::infinity(), opt);
    rep.iterations = sw.sweeps;
    rep.last_change = sw.last_change;
    rep.converged = sw.converged;
  }
  rep.residual = ma_residual(rep.u, mu.weights);
  rep.max_residual = rep.residual.size() ? rep.residual.maxCoeff() : 0.0;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

SolveReport envelope_report(const DomainPtr& d, const Field& psi, const SolverOptions& opt) {
  const GridFunction ps = sample(d, psi);
  SolveReport rep = run(d, zero_measure(d), d->n() == 1 ? ps : psh_lift(d, ps), opt);
  rep.envelope = rep.u;
  return rep;
}

GridFunction maximal_envelope(const DomainPtr& d, const Field& psi, const SolverOptions& opt) {
  auto rep = envelope_report(d, psi, opt);
  if (!rep.converged) throw NotConverged("maximal_envelope: no convergence after " + std::to_string(rep.iterations) + " sweeps");
  return std::move(rep.u);
}

SolveReport solve_dirichlet(const DirichletProblem& prob, const SolverOptions& opt) {
  const DomainPtr& d = prob.domain;
  if (prob.mu.domain != d) throw Error("solve_dirichlet: measure lives on a different domain");
  if ((prob.mu.weights.array() < 0.0).any()) throw Error("solve_dirichlet: measure must be nonnegative");
  if (prob.phi && prob.phi->domain != d) throw Error("solve_dirichlet: subsolution lives on a different domain");

  const SolveReport env = envelope_report(d, prob.psi, opt);
  GridFunction start = env.u;
  if (prob.phi) {
    start = start + *prob.phi;
  } else if (d->n() == 2) {
    // A rho with 32 A^2 h^4 above every target weight dominates mu
    const double wmax = prob.mu.weights.maxCoeff();
    const double a = std::sqrt(wmax / (ma_constant(2) * d->lattice().cell_volume())) + 1.0;
    start = start + a * GridFunction(d, d->rho(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d->crossings().size())));
  }
  SolveReport rep = run(d, prob.mu, start, opt);
  rep.iterations += env.iterations;
  rep.envelope = env.u;
  if (prob.phi) {
    rep.sandwich_checked = true;
    const Eigen::VectorXd sw = scheme_weights(*prob.phi);
    const double eps_dom = 1e-9 * std::max(1.0, sw.cwiseAbs().maxCoeff());
    for (std::size_t i : d->interior_nodes())
      if (prob.mu.weights[static_cast<Eigen::Index>(i)] > sw[static_cast<Eigen::Index>(i)] + eps_dom)
        rep.subsolution_dominated = false;
    double worst = 0.0;
    for (std::size_t i : d->interior_nodes()) {
      const double lo = env.u[i] + (*prob.phi)[i] - rep.u[i];
      const double hi = rep.u[i] - env.u[i];
      worst = std::max({worst, lo, hi});
    }
    rep.sandwich_violation = worst;
    rep.sandwich_ok = worst <= sandwich_tolerance(*d, opt);
  }
  return rep;
}

ComparisonReport comparison_check(const GridFunction& u, const GridFunction& v) {
  if (u.domain != v.domain) throw Error("comparison_check: functions on different domains");
  const GridDomain& d = *u.domain;
  const GridMeasure mu = scheme_measure(u);
  const GridMeasure mv = scheme_measure(v);
  ComparisonReport r;
  const double mass_tol = 1e-9 * std::max(mu.weights.cwiseAbs().maxCoeff(), mv.weights.cwiseAbs().maxCoeff());
  for (std::size_t i : d.interior_nodes()) {
    const auto k = static_cast<Eigen::Index>(i);
    r.mass_deficit = std::max(r.mass_deficit, mv.weights[k] - mu.weights[k]);
    const double diff = u[i] - v[i];
    if (diff > r.worst_violation) {
      r.worst_violation = diff;
      r.worst_node = i;
    }
  }
  if (u.trace.size()) r.boundary_excess = std::max(0.0, (u.trace - v.trace).maxCoeff());
  r.premises = r.mass_deficit <= mass_tol && r.boundary_excess <= 1e-12;
  r.ordered = r.worst_violation <= 1e-12 * std::max(1.0, u.sup_norm());
  return r;
}

}  // namespace malab
