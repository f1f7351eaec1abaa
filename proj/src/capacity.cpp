#include "malab/capacity.hpp"

#include "malab/linear.hpp"
#include "malab/psh.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace malab {

namespace {

void validate(const RegionMask& k) {
  if (k.empty()) throw Error("capacity: K is empty");
  if (!compactly_inside(k)) throw Error("capacity: K touches the boundary");
}

}  // namespace

CapacityResult relative_extremal(const RegionMask& k, const SolverOptions& opt) {
  validate(k);
  const DomainPtr& d = k.domain;
  CapacityResult res;
  res.k = k;
  GridFunction start = constant(d, -1.0);
  start.trace.setZero();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(start.values.size());
  if (d->n() == 1) {
    res.extremal = solve_poisson(start, zero, &k.mask);
    res.converged = true;
    res.iterations = 1;
  } else {
    res.extremal = start;
    const auto sw = pointwise_sweeps(res.extremal, zero, &k.mask, 0.0, opt);
    res.converged = sw.converged;
    res.iterations = sw.sweeps;
    res.residual = sw.last_change;
  }
  res.minus_one_on_k = true;
  for (std::size_t i = 0; i < k.mask.size(); ++i)
    if (k.mask[i] && res.extremal[i] != -1.0) res.minus_one_on_k = false;
  return res;
}

CapacityResult capacity(const RegionMask& k, const SolverOptions& opt) {
  CapacityResult res = relative_extremal(k, opt);
  res.value = ma_measure_unchecked(res.extremal).total();
  return res;
}

double ball_capacity(int n, double r, double outer) {
  if (!(r > 0.0 && r < outer)) throw Error("ball_capacity: need 0 < r < outer");
  return std::pow(2.0 * std::numbers::pi / std::log(outer / r), n);
}

double capacity_sup_oracle(const RegionMask& k, int budget, const GridFunction* extremal) {
  if (budget < 1) throw Error("capacity_sup_oracle: budget must be at least 1");
  validate(k);
  const DomainPtr& d = k.domain;
  const Lattice& lat = d->lattice();
  const int dim = lat.dim();
  double best = 0.0;
  const RegionMask closed = cell_closure(k);
  auto mass_on_k = [&](const GridFunction& w) {
    best = std::max(best, ma_measure_unchecked(w).on(closed));
  };
  int used = 0;
  if (extremal && budget > 0) {
    mass_on_k(*extremal + 1.0);
    ++used;
  }
  // centroid of K and the reach of the closed domain from it
  Point c = Point::Zero();
  const auto nodes = k.nodes();
  for (auto i : nodes) c += lat.coord(i);
  c /= static_cast<double>(nodes.size());
  double reach = 0.0;
  for (const auto& x : d->crossings()) reach = std::max(reach, (x.x - c).head(dim).norm());
  double kin = std::numeric_limits<double>::infinity();  // distance from c to the nearest node outside K
  for (auto i : d->interior_nodes())
    if (!k.contains(i)) kin = std::min(kin, (lat.coord(i) - c).head(dim).norm());
  const double span = std::abs(d->min_rho());
  const GridFunction rho(d, d->rho(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d->crossings().size())));
  for (int j = 0; used < budget; ++j, ++used) {
    if (j % 2 == 0) {
      // w = max(a rho / |min rho|, -1) + 1, a = 1, 2, 4, ...
      const double a = std::ldexp(1.0, j / 2);
      mass_on_k(max((a / span) * rho, constant(d, -1.0)) + 1.0);
    } else {
      // w = max(log(|z - c| / reach) / log(reach / r), -1) + 1 with the pole's kink inside K
      const double r = std::max(kin, lat.h) * std::pow(0.8, j / 2);
      const double s = 1.0 / std::log(reach / r);
      GridFunction w = sample(d, [c, reach, s, dim](const Point& p) {
        const double q = (p - c).head(dim).norm();
        return q <= 0.0 ? 0.0 : std::max(s * std::log(q / reach), -1.0) + 1.0;
      });
      w.trace = w.trace.cwiseMin(1.0);
      mass_on_k(w);
    }
  }
  return best;
}

}  // namespace malab
