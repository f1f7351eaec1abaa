#pragma once

#include "malab/grid_function.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace malab {

struct SolverOptions {
  double tol_change = 1e-9;  // sup-change stop, relative to max(1, osc of the iterate)
  double tol_ma_rel = 1e-6;  // per-cell residual stop, relative to the mean target cell mass
  int max_sweeps = 0;        // 0: 2000 * nodes per axis
  double omega = 1.5;        // over-relaxation of the pointwise update (n = 2)
  double sandwich_tol = -1;  // < 0: 10 h
};

/// Pointwise nonlinear Gauss-Seidel for n = 2 on the free interior nodes.
/// Each node is set to the largest value t <= upper whose Hessian stays PSD with
/// 32 det(H(t)) h^4 = target. Nodes in `fixed` are left alone. Sweeps visit a
/// 7-colouring of the stencil so colour classes are independent.
/// Stops on sup-change, or once the change is small and every cell residual is below
/// tol_ma_rel times the mean target mass (floored at the mass of |z|^2 per cell), which
/// is what ends degenerate (zero-density) solves.
struct SweepResult {
  int sweeps = 0;
  double last_change = 0.0;
  bool converged = false;
};
SweepResult pointwise_sweeps(GridFunction& u, const Eigen::VectorXd& target,
                             const std::vector<std::uint8_t>* fixed, double upper,
                             const SolverOptions& opt);

struct DirichletProblem {
  DomainPtr domain;
  GridMeasure mu;
  Field psi;                          // boundary data, sampled on crossings and the exterior
  std::optional<GridFunction> phi;    // subsolution with mu <= (dd^c phi)^n, phi = 0 on the boundary
};

struct SolveReport {
  GridFunction u;
  GridFunction envelope;     // maximal envelope of the boundary data
  Eigen::VectorXd residual;  // per node |scheme_weights(u) - mu|
  double max_residual = 0.0;
  int iterations = 0;
  double last_change = 0.0;
  bool converged = false;
  bool sandwich_checked = false;
  bool subsolution_dominated = true;  // mu <= scheme_weights(phi) node by node
  bool sandwich_ok = true;
  double sandwich_violation = 0.0;  // max of (env + phi - u) and (u - env), clipped at 0
  double seconds = 0.0;
};

struct NotConverged : Error {
  using Error::Error;
};

/// Largest discrete-PSH function with trace psi (homogeneous equation).
GridFunction maximal_envelope(const DomainPtr& d, const Field& psi, const SolverOptions& opt = {});
/// Same with the report (residual, sweeps).
SolveReport envelope_report(const DomainPtr& d, const Field& psi, const SolverOptions& opt = {});

/// (dd^c u)^n = mu with trace psi. n = 1 is a sparse linear solve; n = 2 runs
/// pointwise_sweeps from env(psi) + phi (or env(psi) + A rho).
SolveReport solve_dirichlet(const DirichletProblem& prob, const SolverOptions& opt = {});

/// Node-wise residual of the scheme operator (scheme_weights) against target weights.
Eigen::VectorXd ma_residual(const GridFunction& u, const Eigen::VectorXd& target);

/// Premises use the scheme operator, for which the discrete comparison principle holds.
struct ComparisonReport {
  bool premises = false;        // MA(u) >= MA(v) per node and u <= v on the boundary
  bool ordered = false;         // u <= v on the interior
  double mass_deficit = 0.0;    // max of MA(v) - MA(u)
  double boundary_excess = 0.0; // max of trace(u - v)
  double worst_violation = 0.0; // max of u - v over interior nodes (clipped at 0)
  std::size_t worst_node = 0;
};

ComparisonReport comparison_check(const GridFunction& u, const GridFunction& v);

}  // namespace malab
