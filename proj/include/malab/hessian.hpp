#pragma once

#include "malab/geometry.hpp"

#include <Eigen/Core>

#include <complex>
#include <span>

namespace malab {

/// Complex Hessian [d^2 u / dz_j dzbar_k]; for n = 1 only entry (0,0) is used.
using CHessian = Eigen::Matrix2cd;

/// (dd^c u)^n = ma_constant(n) * det(complex Hessian) dV, with dd^c = 2i d dbar.
double ma_constant(int n);

/// The complex Hessian at a node is affine in the node's own value:
///   H(u0) = base - u0 * coef.
/// Arms cut by the boundary use the crossing position and the trace value there
/// (non-uniform three-point second differences).
struct HessianSplit {
  CHessian base = CHessian::Zero();
  CHessian coef = CHessian::Zero();
};

HessianSplit hessian_split(const GridDomain& d, const Eigen::VectorXd& values,
                           const Eigen::VectorXd& trace, std::size_t node);

CHessian complex_hessian(const GridDomain& d, const Eigen::VectorXd& values,
                         const Eigen::VectorXd& trace, std::size_t node);

/// Ascending eigenvalues of the leading n x n block.
Eigen::Vector2d hermitian_eigenvalues(const CHessian& hm, int n);
double lambda_min(const CHessian& hm, int n);
double hermitian_det(const CHessian& hm, int n);
/// Product of the positive parts of the eigenvalues.
double projected_det(const CHessian& hm, int n);
CHessian psd_project(const CHessian& hm, int n);

/// Polarised determinant D(H_1, ..., H_n), normalised so that D(H, ..., H) = det H.
double mixed_discriminant(std::span<const CHessian> hs, int n);

}  // namespace malab
