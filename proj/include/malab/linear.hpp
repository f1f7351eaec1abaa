#pragma once

#include "malab/grid_function.hpp"

#include <cstdint>
#include <vector>

namespace malab {

/// Linear Dirichlet solve for n = 1, where the discrete MA weight is h^2 Lap_h u.
/// Finds u with h^2 Lap_h u = target on the free interior nodes; nodes flagged in
/// `fixed` keep the values of `initial`, and cut arms read `initial.trace`.
/// Exterior values are copied from `initial`.
GridFunction solve_poisson(const GridFunction& initial, const Eigen::VectorXd& target,
                           const std::vector<std::uint8_t>* fixed = nullptr);

/// Max-norm of h^2 Lap_h u - target over free interior nodes.
double poisson_residual(const GridFunction& u, const Eigen::VectorXd& target,
                        const std::vector<std::uint8_t>* fixed = nullptr);

}  // namespace malab
