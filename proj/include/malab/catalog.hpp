#pragma once

#include "malab/grid_function.hpp"

#include <string>
#include <vector>

namespace malab {

/// Named closed-form field with the bookkeeping the pipelines need.
struct CatalogField {
  Field f;
  std::string label;
  double holder_exponent = 1.0;  // exponent the field is Hoelder with on the closed domain
  bool zero_trace = false;       // vanishes identically on the boundary
};

/// Catalog request as written in scenario files.
///   subsolutions: quad | holder(alpha) | cone(center, alpha) | max(parts) | sum(parts)
///   boundary data: zero | constant(value) | re_z | re_z2 | cos2theta | abs_power(center, gamma)
/// `weight` multiplies the resulting field.
struct FieldSpec {
  std::string name = "quad";
  double alpha = 0.5;
  double gamma = 0.5;
  double value = 0.0;
  double weight = 1.0;
  Point center = Point::Zero();
  std::vector<FieldSpec> parts;
};

CatalogField make_subsolution(const FieldSpec& spec, const DomainSpec& domain);
CatalogField make_boundary_data(const FieldSpec& spec, const DomainSpec& domain);

/// |z|^2 on R^{2n}.
Field norm_squared(int n);

}  // namespace malab
