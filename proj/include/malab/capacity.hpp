#pragma once

#include "malab/solver.hpp"

namespace malab {

struct CapacityResult {
  RegionMask k;
  GridFunction extremal;   // h_K*
  double value = 0.0;      // total MA mass of h_K*
  double residual = 0.0;   // last sup-change of the sweeps (0 for the direct n = 1 solve)
  int iterations = 0;
  bool converged = false;
  bool minus_one_on_k = false;
};

/// Largest discrete-PSH function <= 0 with value -1 on K and trace 0.
/// n = 1: harmonic in the complement of K (linear solve). n = 2: obstacle sweeps.
/// Throws if K is empty or touches the boundary.
CapacityResult relative_extremal(const RegionMask& k, const SolverOptions& opt = {});

/// cap(K) = total MA mass of h_K*.
CapacityResult capacity(const RegionMask& k, const SolverOptions& opt = {});

/// Closed forms for concentric balls: cap(B_r, B_R) = (2 pi / log(R/r))^n.
double ball_capacity(int n, double r, double outer = 1.0);

/// Definition-based lower bound: max over a deterministic admissible family w (0 <= w <= 1,
/// PSH) of the MA mass of w on the cell closure of K. The family cycles through rescaled defining functions
/// and truncated logarithmic poles centred at K's centroid; `extremal`, if given, adds
/// h_K* + 1 as the first member.
double capacity_sup_oracle(const RegionMask& k, int budget, const GridFunction* extremal = nullptr);

}  // namespace malab
