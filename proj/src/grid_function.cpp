#include "malab/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace malab {

namespace {

void require_same(const GridFunction& a, const GridFunction& b) {
  if (a.domain != b.domain) throw Error("grid function: operands live on different domains");
}

}  // namespace

GridFunction::GridFunction(DomainPtr d, Eigen::VectorXd v, Eigen::VectorXd t)
    : domain(std::move(d)), values(std::move(v)), trace(std::move(t)) {
  if (values.size() != static_cast<Eigen::Index>(domain->lattice().size()))
    throw Error("grid function: value vector does not match lattice");
  if (trace.size() != static_cast<Eigen::Index>(domain->crossings().size()))
    throw Error("grid function: trace vector does not match crossings");
}

double GridFunction::sup_norm() const {
  double s = trace.size() ? trace.cwiseAbs().maxCoeff() : 0.0;
  for (std::size_t i : domain->interior_nodes()) s = std::max(s, std::abs((*this)[i]));
  return s;
}

double GridFunction::interior_min() const {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i : domain->interior_nodes()) s = std::min(s, (*this)[i]);
  return s;
}

double GridFunction::interior_max() const {
  double s = -std::numeric_limits<double>::infinity();
  for (std::size_t i : domain->interior_nodes()) s = std::max(s, (*this)[i]);
  return s;
}

GridMeasure::GridMeasure(DomainPtr d, Eigen::VectorXd w) : domain(std::move(d)), weights(std::move(w)) {
  if (weights.size() != static_cast<Eigen::Index>(domain->lattice().size()))
    throw Error("grid measure: weight vector does not match lattice");
}

double GridMeasure::on(const RegionMask& r) const {
  double s = 0.0;
  for (std::size_t i = 0; i < r.mask.size(); ++i)
    if (r.mask[i]) s += weights[static_cast<Eigen::Index>(i)];
  return s;
}

GridMeasure GridMeasure::restricted(const RegionMask& r) const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(weights.size());
  for (std::size_t i = 0; i < r.mask.size(); ++i)
    if (r.mask[i]) w[static_cast<Eigen::Index>(i)] = weights[static_cast<Eigen::Index>(i)];
  return GridMeasure(domain, std::move(w));
}

GridFunction sample(const DomainPtr& d, const Field& f) {
  const Lattice& lat = d->lattice();
  Eigen::VectorXd v(static_cast<Eigen::Index>(lat.size()));
  for (std::size_t i = 0; i < lat.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(lat.coord(i));
  Eigen::VectorXd t(static_cast<Eigen::Index>(d->crossings().size()));
  for (std::size_t c = 0; c < d->crossings().size(); ++c)
    t[static_cast<Eigen::Index>(c)] = f(d->crossings()[c].x);
  return GridFunction(d, std::move(v), std::move(t));
}

GridFunction constant(const DomainPtr& d, double c) {
  return GridFunction(d, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d->lattice().size()), c),
                      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d->crossings().size()), c));
}

GridFunction with_interpolated_trace(const DomainPtr& d, const GridFunction& f) {
  if (!f.lattice().same_as(d->lattice())) throw Error("grid function: lattice mismatch");
  Eigen::VectorXd t(static_cast<Eigen::Index>(d->crossings().size()));
  for (std::size_t c = 0; c < d->crossings().size(); ++c)
    t[static_cast<Eigen::Index>(c)] = d->lattice().interpolate(f.values, d->crossings()[c].x);
  return GridFunction(d, f.values, std::move(t));
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  require_same(a, b);
  return GridFunction(a.domain, a.values + b.values, a.trace + b.trace);
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  require_same(a, b);
  return GridFunction(a.domain, a.values - b.values, a.trace - b.trace);
}

GridFunction operator*(double s, const GridFunction& a) {
  return GridFunction(a.domain, s * a.values, s * a.trace);
}

GridFunction operator+(const GridFunction& a, double c) {
  return GridFunction(a.domain, a.values.array() + c, a.trace.array() + c);
}

GridFunction max(const GridFunction& a, const GridFunction& b) {
  require_same(a, b);
  return GridFunction(a.domain, a.values.cwiseMax(b.values), a.trace.cwiseMax(b.trace));
}

GridFunction min(const GridFunction& a, const GridFunction& b) {
  require_same(a, b);
  return GridFunction(a.domain, a.values.cwiseMin(b.values), a.trace.cwiseMin(b.trace));
}

GridFunction map(const GridFunction& a, const std::function<double(double)>& g) {
  return GridFunction(a.domain, a.values.unaryExpr(g), a.trace.unaryExpr(g));
}

GridMeasure operator*(double s, const GridMeasure& m) { return GridMeasure(m.domain, s * m.weights); }

GridMeasure operator+(const GridMeasure& a, const GridMeasure& b) {
  if (a.domain != b.domain) throw Error("grid measure: operands live on different domains");
  return GridMeasure(a.domain, a.weights + b.weights);
}

GridMeasure weighted(const GridMeasure& mu, const GridFunction& f) {
  if (mu.domain != f.domain) throw Error("grid measure: density lives on a different domain");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mu.weights.size());
  for (std::size_t i : mu.domain->interior_nodes()) {
    const auto k = static_cast<Eigen::Index>(i);
    if (f.values[k] < 0.0) throw Error("grid measure: density must be nonnegative");
    w[k] = f.values[k] * mu.weights[k];
  }
  return GridMeasure(mu.domain, std::move(w));
}

GridMeasure lebesgue_density(const DomainPtr& d, double density) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d->lattice().size()));
  const double cell = d->lattice().cell_volume();
  for (std::size_t i : d->interior_nodes()) w[static_cast<Eigen::Index>(i)] = density * cell;
  return GridMeasure(d, std::move(w));
}

GridMeasure zero_measure(const DomainPtr& d) {
  return GridMeasure(d, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d->lattice().size())));
}

double integrate(const GridFunction& f, const GridMeasure& mu) {
  double s = 0.0;
  for (std::size_t i : mu.domain->interior_nodes()) s += f[i] * mu.weights[static_cast<Eigen::Index>(i)];
  return s;
}

double integrate_volume(const GridFunction& f, const RegionMask& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.mask.size(); ++i)
    if (r.mask[i]) s += f[i];
  return s * f.lattice().cell_volume();
}

}  // namespace malab
