#pragma once

#include "malab/geometry.hpp"

#include <functional>

namespace malab {

/// Closed-form scalar field on R^{2n}.
using Field = std::function<double(const Point&)>;

/// Real field sampled on every lattice node (exterior nodes carry the field's
/// extension) together with its boundary trace at the domain's crossings.
struct GridFunction {
  DomainPtr domain;
  Eigen::VectorXd values;
  Eigen::VectorXd trace;

  GridFunction() = default;
  GridFunction(DomainPtr d, Eigen::VectorXd v, Eigen::VectorXd t);

  const Lattice& lattice() const { return domain->lattice(); }
  double operator[](std::size_t idx) const { return values[static_cast<Eigen::Index>(idx)]; }

  /// sup over interior nodes and trace.
  double sup_norm() const;
  double interior_min() const;
  double interior_max() const;
};

/// Nonnegative weight per lattice node (zero off the interior).
struct GridMeasure {
  DomainPtr domain;
  Eigen::VectorXd weights;

  GridMeasure() = default;
  GridMeasure(DomainPtr d, Eigen::VectorXd w);

  double total() const { return weights.sum(); }
  double on(const RegionMask& r) const;
  GridMeasure restricted(const RegionMask& r) const;
};

GridFunction sample(const DomainPtr& d, const Field& f);
GridFunction constant(const DomainPtr& d, double c);
/// Same values; trace rebuilt by interpolating the lattice values at the crossings.
GridFunction with_interpolated_trace(const DomainPtr& d, const GridFunction& f);

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& a);
GridFunction operator+(const GridFunction& a, double c);
GridFunction max(const GridFunction& a, const GridFunction& b);
GridFunction min(const GridFunction& a, const GridFunction& b);
/// Applies g node-wise to values and trace.
GridFunction map(const GridFunction& a, const std::function<double(double)>& g);

GridMeasure operator*(double s, const GridMeasure& m);
GridMeasure operator+(const GridMeasure& a, const GridMeasure& b);
/// Density-weighted measure f * mu.
GridMeasure weighted(const GridMeasure& mu, const GridFunction& f);
/// Measure with constant density per unit R^{2n}-volume on the interior.
GridMeasure lebesgue_density(const DomainPtr& d, double density);
GridMeasure zero_measure(const DomainPtr& d);

/// Integral of f against the measure over interior nodes.
double integrate(const GridFunction& f, const GridMeasure& mu);
/// Riemann sum of f dV over the region.
double integrate_volume(const GridFunction& f, const RegionMask& r);

}  // namespace malab
