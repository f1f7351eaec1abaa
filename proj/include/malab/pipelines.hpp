#pragma once

#include "malab/catalog.hpp"
#include "malab/fit.hpp"
#include "malab/lab.hpp"

#include <functional>
#include <string>
#include <vector>

namespace malab {

/// Builds mu on a domain from the sampled subsolution.
using MeasureRecipe = std::function<GridMeasure(const DomainPtr&, const GridFunction& phi)>;

/// Knobs shared by the theorem-b and corollary-c pipelines. Negative values select defaults.
struct HolderOptions {
  std::vector<double> deltas;  // empty: delta0 / 2^j, j = 1..ladder_points, kept while delta >= 4h
  double delta0 = -1.0;        // 0.2 * inradius
  int ladder_points = 5;
  int min_ladder_points = 4;
  int probe_resolution = -1;   // n = 1: 129, n = 2: 20
  int probe_pad = -1;          // n = 1: 12, n = 2: 4
  double probe_eps = 0.1;
  int probe_rungs = 6;
  int growth_rungs = -1;       // capacity-growth rungs (< 0: all for n = 1, one for n = 2)
  double fit_tolerance = 0.05; // empirical exponent may fall this far below alpha4
  double lap_slope_min = 0.9;
  SolverOptions solver;
};

struct HolderRow {
  double delta = 0.0;
  double eps = 0.0;
  double sup_gap = 0.0;        // sup over Omega_delta of (hat u_delta - u)
  double fit = 0.0;            // fitted C delta^slope
  double l1_gap = 0.0;         // int over Omega_delta of |hat u_delta - u| dV
  double collar_gap = 0.0;     // max of u_delta - u on closure(Omega_delta) minus Omega_eps
  double collar_bound = 0.0;   // C1 delta^alpha + C2 eps^alpha
  double inner_gap = 0.0;      // sup over Omega_eps of (hat u_delta - u)
  double glue_constant = 0.0;  // C used in max(hat u_delta - C eps^alpha, u)
  double glue_min_eigenvalue = 0.0;
  bool glue_psh = false;
  bool glue_equal_outside = false;
  bool glue_above = false;
};

struct HolderReport {
  std::string id = "theorem_b";
  int n = 1;
  double h = 0.0;
  std::vector<HolderRow> rows;
  double delta0 = 0.0;
  double alpha = 0.0;          // boundary exponent
  double alpha_phi = 0.0;
  double alpha_psi = 0.0;
  double alpha2 = 1.0;
  double alpha3 = 1.0;
  double alpha3_tilde = 1.0;   // L^p degradation (corollary-c only)
  double alpha4 = 0.0;
  double kappa = 0.0;          // eps = delta0 (delta / delta0)^kappa
  double C1 = 0.0;             // Hoelder seminorm of the boundary envelope
  double C2 = 0.0;             // Hoelder seminorm of the subsolution
  double hopf = 0.0;
  LineFit exponent_fit;        // log sup_gap on log delta
  double empirical_exponent = 0.0;
  LineFit lap_fit;             // log l1_gap on log delta
  double fit_tolerance = 0.05;
  double lap_slope_min = 0.9;
  double sandwich_violation = 0.0;
  double seconds = 0.0;         // wall time of the pipeline (not part of the emitted reports)

  bool converged = false;
  bool dominated = false;
  bool sandwich_ok = false;
  bool coupling_ok = false;
  bool collar_bound_ok = false;
  bool gluing_ok = false;
  bool lap_ok = false;
  bool exponent_ok = false;
  bool alpha4_identity = false;
  bool pass = false;

  std::vector<InequalityReport> probes;  // stability, l1_l1 and pipeline-specific scans
  std::vector<std::string> notes;
  GridFunction u;
};

/// alpha alpha2 alpha3 alpha3_tilde / (2n + 1 + alpha).
double theoretical_alpha4(int n, double alpha, double alpha2, double alpha3, double alpha3_tilde = 1.0);

/// Default delta ladder for a domain: delta0 / 2^j, j = 1..points, stopping below 4h.
std::vector<double> default_delta_ladder(const GridDomain& d, double delta0, int points);

struct TheoremBInput {
  DomainSpec domain;
  int resolution = 1281;
  int pad = kDefaultPad;
  CatalogField phi;       // subsolution, zero trace
  CatalogField psi;       // boundary data
  MeasureRecipe measure;  // null: scheme_measure(phi)
  HolderOptions options;
};

/// Solve, probe alpha2 and alpha3 on a coarser grid, then scan delta: couple eps(delta),
/// build hat u_delta and u_delta, check the boundary estimate on closure(Omega_delta) minus
/// Omega_eps, glue max(hat u_delta - C eps^alpha, u) on Omega_eps, check the L1 gap and fit
/// the empirical exponent.
HolderReport theorem_b_pipeline(const TheoremBInput& in);

struct CorollaryInput {
  DomainSpec domain;
  int resolution = 641;
  int pad = kDefaultPad;
  double collar = 0.25;   // the enlarged domain has radius (1 + collar) times the original
  CatalogField phi;       // subsolution on the enlarged domain
  Field f;                // density, >= 0
  std::string f_label = "f";
  double p = 2.0;
  MeasureRecipe measure;  // null: scheme_measure(phi)
  std::vector<double> k_radii;  // nested balls for the capacity scan (empty: 0.1..0.5 of the inradius)
  double tau = 1.0;
  HolderOptions options;
};

/// Enlarged catalog domain with the same shape.
DomainSpec enlarge(const DomainSpec& spec, double collar);

/// Capacity scan of f mu against C(tau) cap^{1+tau}; solve on the enlarged domain with
/// 1_Omega f mu and zero data, take the maximal extension h of -v on the boundary, check
/// v + h <= u <= 0, fit alpha3_tilde and run the theorem-b scan with v + h as subsolution.
HolderReport corollary_c_pipeline(const CorollaryInput& in);

}  // namespace malab
