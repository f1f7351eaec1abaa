#pragma once

#include "malab/capacity.hpp"
#include "malab/psh.hpp"
#include "malab/radial.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace malab {

/// Fitted or measured constant with the fit that produced it.
struct Constant {
  std::string name;
  double value = 0.0;
  std::string provenance;
};

/// slack = rhs - lhs; a point passes when slack >= -tolerance.
struct InequalityPoint {
  double parameter = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
};

/// Free-form numeric table attached to a report (instrument logs, chain steps).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct InequalityReport {
  std::string id;
  std::string parameter = "index";
  std::vector<InequalityPoint> points;
  std::vector<Constant> constants;
  std::vector<std::string> notes;
  Table instrument;
  bool pass = false;
  double worst_slack = 0.0;      // min over points of slack / max(1, |rhs|)
  std::size_t violations = 0;    // points with slack < -tolerance
  std::size_t strict_violations = 0;  // points with slack < 0

  void add_point(double parameter, double lhs, double rhs, double tolerance = 0.0);
  void add_constant(const std::string& name, double value, const std::string& provenance);
  /// Value of a named constant; throws if absent.
  double constant(const std::string& name) const;
  bool has_constant(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Blocki and Cegrell

/// int (h - v)^k dd^c v_1 ^ ... ^ dd^c v_n <= k! |v_1| ... |v_k| int (dd^c v)^k ^ dd^c v_{k+1} ^ ... ^ dd^c v_n.
/// Hypotheses (v_i <= 0, v <= h, h - v -> 0 on the boundary) are checked and reported.
/// Tolerance: tol_h * h * max(lhs, rhs); tol_h < 0 selects 10.
InequalityReport verify_blocki(std::span<const GridFunction> vs, const GridFunction& v,
                               const GridFunction& h, int k, double tol_h = -1.0);

/// int dd^c v_1 ^ ... ^ dd^c v_n <= prod (int (dd^c v_i)^n)^{1/n} for v_i in E0.
InequalityReport verify_cegrell(std::span<const GridFunction> vs, double tol_h = -1.0);

/// Random bounded PSH function, <= 0 with zero trace, drawn from a closed-form family
/// (scaled rho, -(-rho)^a, truncated logarithmic poles, and two-term sums of these).
GridFunction random_e0_function(const DomainPtr& d, std::mt19937_64& rng, std::string* label = nullptr);

/// `instances` random admissible tuples; each instance is one point of the report.
InequalityReport blocki_suite(const DomainPtr& d, int instances, std::uint64_t seed);
InequalityReport cegrell_suite(const DomainPtr& d, int instances, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sublevel decay and volume-capacity

/// nu({v < -s}) over s_grid on the lattice. Polynomial fit C/s^n over all s with nonzero
/// mass, exponential fit C e^{-tau s} over s >= 2, and the combined bound
/// C e^{-alpha1 s} / s^n with alpha1 = tau / 2 (or the polynomial bound when no s >= 2
/// has mass). Empty sublevels end the scan.
InequalityReport sublevel_decay_scan(const GridFunction& v, const GridMeasure& nu,
                                     std::span<const double> s_grid);
/// Same scan on radial profiles over the unit ball (closed-form masses).
InequalityReport sublevel_decay_radial(int n, const RadialProfile& v, const RadialProfile& phi,
                                       std::span<const double> s_grid);

/// Fits log(mu(K)/cap(K)) = log C - alpha0 cap(K)^{-1/n}; C is the one-sided envelope.
/// Also reports C(tau) for mu(K) <= C(tau) cap(K)^{1+tau}.
InequalityReport volume_capacity_fit(int n, std::span<const double> caps, std::span<const double> masses,
                                     double tau = 1.0);
/// Computes cap(K) and mu(K) for each K and runs volume_capacity_fit.
InequalityReport volume_capacity_scan(const GridMeasure& mu, std::span<const RegionMask> family,
                                      double tau = 1.0, const SolverOptions& opt = {});

// ---------------------------------------------------------------------------
// Mass bounds

/// int_{Omega_eps} (dd^c v)^k ^ beta^{n-k} against C |v|^k / eps^k; passes when the
/// log-log slope in eps is >= -k.
InequalityReport mass_est_scan(const GridFunction& v, int k, std::span<const double> eps_grid);

/// Total mass of phi_eps = max(phi - eps, A rho / eps) against C A^n / eps^n (slope >= -n),
/// and 1_{D_eps} mu <= (dd^c phi_eps)^n cell by cell.
InequalityReport phi_eps_scan(const GridFunction& phi, const GridMeasure& mu,
                              std::span<const double> eps_grid);

// ---------------------------------------------------------------------------
// Stability and L1-L1 probes

/// v_j = max(u, u + c_j - m |z - a|^2) with c_j = c_0 / 2^j: bounded PSH perturbations
/// supported in a ball around a inside Omega_eps. m is half the smallest Hessian
/// eigenvalue of u on the support.
struct DomeLadder {
  std::vector<GridFunction> v;
  std::vector<double> heights;
  Point center = Point::Zero();
  double curvature = 0.0;
  double support_radius = 0.0;  // of the first rung
};
DomeLadder dome_ladder(const GridFunction& u, double eps, int rungs = 6);

struct ProbeSetup {
  GridFunction u;    // solution of (dd^c u)^n = mu
  GridMeasure mu;
  GridFunction phi;  // subsolution with zero trace
  double eps = 0.1;
  int growth_rungs = -1;  // rungs with the capacity-growth chain (< 0: all)
  SolverOptions solver;
};

/// sup(v - u) <= (C / eps^n) (int max(v - u, 0) dmu)^{alpha2}; alpha2 fitted on the ladder.
/// The capacity-growth chain at s = t = |s0| / 4 goes to the instrument table:
/// t^n cap(U(s)) <= mu(U(s+t)) <= (dd^c phi_{c0 eps})^n (U(s+t)) and the fitted C(tau)
/// of the last link (tau = 1).
InequalityReport stability_probe(const ProbeSetup& setup, const DomeLadder& ladder);

/// int |v - u| dmu <= (C / eps^{n+1}) (int |v - u| dV)^{alpha3}; alpha3 fitted on the ladder.
/// The instrument table records I_1, I_2 of the induction step for k = 0..n-1 at
/// t = |v - u|_1^{tau_k / 3}, tau_0 = 1, tau_{k+1} = alpha tau_k / 3.
InequalityReport l1_l1_probe(const ProbeSetup& setup, const DomeLadder& ladder, double alpha);

}  // namespace malab
