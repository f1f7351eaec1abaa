#pragma once

#include "malab/grid_function.hpp"
#include "malab/hessian.hpp"

#include <span>
#include <string>
#include <vector>

namespace malab {

/// Default discrete-PSH tolerance: lambda_min of the complex Hessian >= -10 h.
double default_psh_tolerance(const GridDomain& d);

struct PshCheck {
  bool ok = true;
  double worst_eigenvalue = 0.0;
  std::size_t worst_node = 0;
  std::size_t violations = 0;
};

/// Smallest complex-Hessian eigenvalue over the region (interior if null).
PshCheck check_psh(const GridFunction& f, double tol, const RegionMask* region = nullptr);
PshCheck check_psh(const GridFunction& f);

struct NotPsh : Error {
  NotPsh(const std::string& what, std::size_t node_, double ev)
      : Error(what), node(node_), eigenvalue(ev) {}
  std::size_t node;
  double eigenvalue;
};

/// Per-node complex Hessians over the lattice (zero off the interior).
std::vector<CHessian> hessian_field(const GridFunction& f);

/// Discrete (dd^c f)^n. Each lattice cell averages the complex Hessians of its interior
/// corners and carries 4^n n! det(PSD part of the average) times its interior share of
/// h^{2n}; the cell mass is split evenly among those corners. Constant-Hessian fields
/// get exactly 4^n n! det h^{2n} per interior node.
/// Throws NotPsh when a node is below the PSH tolerance.
GridMeasure ma_measure(const GridFunction& f);
/// Same without the PSH precondition (used for diagnostics of non-PSH fields).
GridMeasure ma_measure_unchecked(const GridFunction& f);
/// Node-wise weights 4^n n! det(PSD part of H) h^{2n}: the operator the solver inverts.
Eigen::VectorXd scheme_weights(const GridFunction& f);
/// scheme_weights as a measure: the right-hand side for which f itself solves the
/// discrete Dirichlet problem. Used for mu = (dd^c phi)^n inputs to the solver.
GridMeasure scheme_measure(const GridFunction& f);

/// dd^c f_1 ^ ... ^ dd^c f_k ^ beta^{n-k} with the same cell averaging (PSD-projected averages).
GridMeasure mixed_measure(std::span<const GridFunction> fns, bool check_psh_input = true);
double mixed_mass(std::span<const GridFunction> fns, const RegionMask& region);
/// Signed per-node weights without projection; the arguments need not be PSH.
Eigen::VectorXd signed_mixed_weights(std::span<const GridFunction> fns);

struct DominationReport {
  bool dominated = true;
  std::size_t worst_node = 0;
  double worst_excess = 0.0;  // max of mu(cell) - ma(f)(cell)
};

/// mu(cell) <= (dd^c f)^n(cell) + eps_dom on every interior node.
DominationReport dominated_by(const GridMeasure& mu, const GridFunction& f, double eps_dom = -1.0);

/// Field known on a region only; values outside the region are the input's.
struct RegionalFunction {
  GridFunction f;
  RegionMask region;
};

/// u_delta(z) = max of u over lattice nodes with |zeta| <= delta, on shrink(delta).
RegionalFunction sup_convolution(const GridFunction& u, double delta);
/// Average of u over lattice nodes with |zeta| <= delta, on shrink(delta).
RegionalFunction ball_average(const GridFunction& u, double delta);
/// Number of lattice offsets in the closed ball of radius delta.
std::size_t ball_offset_count(const Lattice& lat, double delta);

struct MollifyResult {
  GridFunction f;
  double holder_constant = 0.0;          // max |phi*chi_t - phi| / t^alpha over the interior
  double second_derivative_constant = 0.0;  // max |complex Hessian entry| t^2 / ||phi||_inf
  double sup_difference = 0.0;           // max |phi*chi_t - phi| over the interior
};

/// Radial bump chi(r) = exp(-1/(1 - r^2)) on the unit ball.
double mollifier_profile(double r);
/// phi * chi_t with discrete unit-mass weights. The lattice must hold the field on a
/// collar of width t around the closed domain.
MollifyResult mollify(const GridFunction& phi, double t, double alpha = 1.0);

/// phi_eps = max(phi - eps, A rho / eps) with A = 1 + ||phi||_inf.
GridFunction regularize_subsolution(const GridFunction& phi, double eps);
double subsolution_bound(const GridFunction& phi);

struct HolderSeminormResult {
  double alpha = 1.0;
  double value = 0.0;
  Point witness_a = Point::Zero();
  Point witness_b = Point::Zero();
  std::size_t pairs = 0;
};

/// max |f(x) - f(y)| / |x - y|^alpha over a deterministic pair set: dyadic lattice
/// displacements along axes and diagonals up to 0.25 diam, every node with its cut
/// arms and nearest crossing, plus a fixed pseudo-random sample of far pairs.
HolderSeminormResult holder_seminorm(const GridFunction& f, double alpha);

struct E0Report {
  bool member = false;
  bool psh = false;
  bool nonpositive = false;
  bool zero_trace = false;
  bool mass_ok = false;
  double mass = 0.0;
  std::string failed;  // comma separated clause names
};

/// Membership in E0' (PSH, <= 0, zero boundary values, total MA mass <= 1).
E0Report is_in_E0_prime(const GridFunction& v, double mass_eps = 1e-9);
/// Membership in E0 (finite mass is automatic on the grid).
E0Report is_in_E0(const GridFunction& v);

}  // namespace malab
