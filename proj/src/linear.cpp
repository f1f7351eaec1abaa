#include "malab/linear.hpp"

#include "malab/hessian.hpp"

#include <Eigen/SparseCore>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>

namespace malab {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

// unknowns above which a near-solution initial guess is refined iteratively
constexpr Eigen::Index kDirectLimit = 200000;

bool is_free(const GridDomain& d, const std::vector<std::uint8_t>* fixed, std::size_t i) {
  return d.interior(i) && !(fixed && (*fixed)[i]);
}

}  // namespace

GridFunction solve_poisson(const GridFunction& initial, const Eigen::VectorXd& target,
                           const std::vector<std::uint8_t>* fixed) {
  const GridDomain& d = *initial.domain;
  if (d.n() != 1) throw Error("solve_poisson: only defined for n = 1");
  const Lattice& lat = d.lattice();
  const auto& dirs = hessian_directions(1);

  std::vector<std::int64_t> unknown(lat.size(), -1);
  std::vector<std::size_t> nodes;
  for (std::size_t i : d.interior_nodes())
    if (is_free(d, fixed, i)) {
      unknown[i] = static_cast<std::int64_t>(nodes.size());
      nodes.push_back(i);
    }
  GridFunction out = initial;
  if (nodes.empty()) return out;

  const auto nu = static_cast<Eigen::Index>(nodes.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nodes.size() * 5);
  Eigen::VectorXd rhs(nu);
  for (Eigen::Index r = 0; r < nu; ++r) {
    const std::size_t i = nodes[static_cast<std::size_t>(r)];
    const auto* arms = d.arms(i);
    double b = target[static_cast<Eigen::Index>(i)];
    double diag = 0.0;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const std::ptrdiff_t off = lat.offset_of(dirs[k]);
      const std::int32_t cut[2] = {arms ? (*arms)[2 * k] : -1, arms ? (*arms)[2 * k + 1] : -1};
      const double th[2] = {cut[0] >= 0 ? d.crossings()[static_cast<std::size_t>(cut[0])].theta : 1.0,
                            cut[1] >= 0 ? d.crossings()[static_cast<std::size_t>(cut[1])].theta : 1.0};
      const double w = 2.0 / (th[0] + th[1]);
      for (int s = 0; s < 2; ++s) {
        const double c = w / th[s];
        diag -= c;
        if (cut[s] >= 0) {
          b -= c * initial.trace[cut[s]];
          continue;
        }
        const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + (s == 0 ? off : -off));
        if (unknown[j] >= 0) {
          trips.emplace_back(r, unknown[j], c);
        } else {
          b -= c * initial[j];
        }
      }
    }
    trips.emplace_back(r, r, diag);
    rhs[r] = b;
  }
  SparseMatrix a(nu, nu);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();

  Eigen::VectorXd x;
  bool solved = false;
  if (nu > kDirectLimit) {
    // refinement mode: only taken when the initial values already nearly solve the system
    Eigen::VectorXd guess(nu);
    for (Eigen::Index r = 0; r < nu; ++r) guess[r] = initial[nodes[static_cast<std::size_t>(r)]];
    const double res0 = (rhs - a * guess).norm();
    if (res0 <= 1e-10 * rhs.norm()) {
      x = guess;
      solved = true;
    } else if (res0 <= 1e-6 * rhs.norm()) {
      Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> it;
      it.preconditioner().setDroptol(1e-4);
      it.preconditioner().setFillfactor(4);
      it.setTolerance(1e-12);
      it.setMaxIterations(200);
      it.compute(a);
      if (it.info() == Eigen::Success) {
        x = it.solveWithGuess(rhs, guess);
        solved = it.info() == Eigen::Success && x.allFinite();
      }
    }
  }
  if (!solved) {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw Error("solve_poisson: factorization failed");
    x = lu.solve(rhs);
  }
  if (!x.allFinite()) throw Error("solve_poisson: linear solve failed");
  for (Eigen::Index r = 0; r < nu; ++r) out.values[static_cast<Eigen::Index>(nodes[static_cast<std::size_t>(r)])] = x[r];
  return out;
}

double poisson_residual(const GridFunction& u, const Eigen::VectorXd& target,
                        const std::vector<std::uint8_t>* fixed) {
  const GridDomain& d = *u.domain;
  const double h2 = d.h() * d.h();
  double r = 0.0;
  for (std::size_t i : d.interior_nodes()) {
    if (!is_free(d, fixed, i)) continue;
    const CHessian hm = complex_hessian(d, u.values, u.trace, i);
    r = std::max(r, std::abs(4.0 * hm(0, 0).real() * h2 - target[static_cast<Eigen::Index>(i)]));
  }
  return r;
}

}  // namespace malab
