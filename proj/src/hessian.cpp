#include "malab/hessian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace malab {

double ma_constant(int n) { return n == 1 ? 4.0 : 32.0; }

namespace {

// Second difference along direction d as c0 - u0 * c1.
struct Directional {
  double c0 = 0.0;
  double c1 = 0.0;
};

CHessian assemble(const std::array<double, 12>& dd, int n) {
  CHessian hm = CHessian::Zero();
  if (n == 1) {
    hm(0, 0) = 0.25 * (dd[0] + dd[1]);
    return hm;
  }
  const double u02 = 0.25 * (dd[4] - dd[5]);
  const double u13 = 0.25 * (dd[6] - dd[7]);
  const double u03 = 0.25 * (dd[8] - dd[9]);
  const double u12 = 0.25 * (dd[10] - dd[11]);
  const std::complex<double> c(0.25 * (u02 + u13), 0.25 * (u03 - u12));
  hm(0, 0) = 0.25 * (dd[0] + dd[1]);
  hm(1, 1) = 0.25 * (dd[2] + dd[3]);
  hm(0, 1) = c;
  hm(1, 0) = std::conj(c);
  return hm;
}

}  // namespace

HessianSplit hessian_split(const GridDomain& d, const Eigen::VectorXd& values,
                           const Eigen::VectorXd& trace, std::size_t node) {
  const Lattice& lat = d.lattice();
  const auto& dirs = hessian_directions(lat.n);
  const auto* arms = d.arms(node);
  const double inv_h2 = 1.0 / (lat.h * lat.h);
  std::array<double, 12> c0{}, c1{};
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const std::ptrdiff_t off = lat.offset_of(dirs[k]);
    double tp = 1.0, tm = 1.0, up, um;
    std::int32_t cp = -1, cm = -1;
    if (arms) {
      cp = (*arms)[2 * k];
      cm = (*arms)[2 * k + 1];
    }
    if (cp >= 0) {
      tp = d.crossings()[static_cast<std::size_t>(cp)].theta;
      up = trace[cp];
    } else {
      up = values[static_cast<Eigen::Index>(node + off)];
    }
    if (cm >= 0) {
      tm = d.crossings()[static_cast<std::size_t>(cm)].theta;
      um = trace[cm];
    } else {
      um = values[static_cast<Eigen::Index>(node - off)];
    }
    const double w = 2.0 * inv_h2 / (tp + tm);
    c0[k] = w * (up / tp + um / tm);
    c1[k] = w * (1.0 / tp + 1.0 / tm);
  }
  HessianSplit s;
  s.base = assemble(c0, lat.n);
  s.coef = assemble(c1, lat.n);
  return s;
}

CHessian complex_hessian(const GridDomain& d, const Eigen::VectorXd& values,
                         const Eigen::VectorXd& trace, std::size_t node) {
  const auto s = hessian_split(d, values, trace, node);
  return s.base - values[static_cast<Eigen::Index>(node)] * s.coef;
}

Eigen::Vector2d hermitian_eigenvalues(const CHessian& hm, int n) {
  if (n == 1) return Eigen::Vector2d(hm(0, 0).real(), hm(0, 0).real());
  const double a = hm(0, 0).real();
  const double b = hm(1, 1).real();
  const double c2 = std::norm(hm(0, 1));
  const double mid = 0.5 * (a + b);
  const double rad = std::sqrt(0.25 * (a - b) * (a - b) + c2);
  return Eigen::Vector2d(mid - rad, mid + rad);
}

double lambda_min(const CHessian& hm, int n) { return hermitian_eigenvalues(hm, n)[0]; }

double hermitian_det(const CHessian& hm, int n) {
  if (n == 1) return hm(0, 0).real();
  return hm(0, 0).real() * hm(1, 1).real() - std::norm(hm(0, 1));
}

double projected_det(const CHessian& hm, int n) {
  const auto ev = hermitian_eigenvalues(hm, n);
  if (n == 1) return std::max(ev[0], 0.0);
  return std::max(ev[0], 0.0) * std::max(ev[1], 0.0);
}

CHessian psd_project(const CHessian& hm, int n) {
  if (n == 1) {
    CHessian r = CHessian::Zero();
    r(0, 0) = std::max(hm(0, 0).real(), 0.0);
    return r;
  }
  const auto ev = hermitian_eigenvalues(hm, n);
  if (ev[0] >= 0.0) return hm;
  if (ev[1] <= 0.0) return CHessian::Zero();
  Eigen::SelfAdjointEigenSolver<CHessian> es(hm);
  const Eigen::Vector2cd v = es.eigenvectors().col(1);
  return es.eigenvalues()[1] * (v * v.adjoint());
}

double mixed_discriminant(std::span<const CHessian> hs, int n) {
  if (n == 1) return hs[0](0, 0).real();
  const CHessian& a = hs[0];
  const CHessian& b = hs[1];
  return 0.5 * (a(0, 0).real() * b(1, 1).real() + a(1, 1).real() * b(0, 0).real()) -
         (a(0, 1) * std::conj(b(0, 1))).real();
}

}  // namespace malab
