#include "malab/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace malab {

namespace {

double dist_to(const Point& p, const Point& c, int n) { return (p - c).head(2 * n).norm(); }

}  // namespace

Field norm_squared(int n) {
  return [n](const Point& p) { return p.head(2 * n).squaredNorm(); };
}

CatalogField make_subsolution(const FieldSpec& spec, const DomainSpec& dom) {
  CatalogField out;
  const double w = spec.weight;
  if (w < 0.0) throw Error("catalog: subsolution weight must be nonnegative");
  if (spec.name == "quad") {
    out.f = [dom, w](const Point& p) { return w * dom.rho(p); };
    out.label = "quad";
    out.holder_exponent = 1.0;
    out.zero_trace = true;
  } else if (spec.name == "holder") {
    const double a = spec.alpha;
    if (!(a > 0.0 && a <= 1.0)) throw Error("catalog: holder exponent must lie in (0, 1]");
    // zero extension across the boundary
    out.f = [dom, a, w](const Point& p) { return -w * std::pow(std::max(-dom.rho(p), 0.0), a); };
    out.label = "holder(" + std::to_string(a) + ")";
    out.holder_exponent = a;
    out.zero_trace = true;
  } else if (spec.name == "cone") {
    const double a = spec.alpha;
    if (!(a > 0.0)) throw Error("catalog: cone exponent must be positive");
    const int n = dom.n;
    const Point c = spec.center;
    const double reach = dom.extent() + c.head(2 * n).norm();
    const double norm = std::pow(reach, 2.0 * a);
    out.f = [c, a, n, norm, w](const Point& p) { return w * (std::pow(dist_to(p, c, n), 2.0 * a) - norm); };
    out.label = "cone";
    out.holder_exponent = std::min(2.0 * a, 1.0);
    out.zero_trace = dom.shape == "ball" && c.head(2 * n).norm() == 0.0;
  } else if (spec.name == "max" || spec.name == "sum") {
    if (spec.parts.empty()) throw Error("catalog: mixture needs parts");
    std::vector<CatalogField> parts;
    for (const auto& s : spec.parts) parts.push_back(make_subsolution(s, dom));
    const bool is_max = spec.name == "max";
    std::vector<Field> fs;
    for (const auto& p : parts) fs.push_back(p.f);
    out.f = [fs, is_max, w](const Point& p) {
      double acc = is_max ? fs[0](p) : 0.0;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const double v = fs[i](p);
        if (is_max) {
          acc = std::max(acc, v);
        } else {
          acc += v;
        }
      }
      return w * acc;
    };
    out.label = spec.name;
    out.holder_exponent = 1.0;
    out.zero_trace = true;
    for (const auto& p : parts) {
      out.holder_exponent = std::min(out.holder_exponent, p.holder_exponent);
      out.zero_trace = out.zero_trace && p.zero_trace;
    }
  } else {
    throw Error("catalog: unknown subsolution '" + spec.name + "'");
  }
  return out;
}

CatalogField make_boundary_data(const FieldSpec& spec, const DomainSpec& dom) {
  CatalogField out;
  const double w = spec.weight;
  const int n = dom.n;
  if (spec.name == "zero") {
    out.f = [](const Point&) { return 0.0; };
    out.zero_trace = true;
  } else if (spec.name == "constant") {
    const double c = spec.value * w;
    out.f = [c](const Point&) { return c; };
  } else if (spec.name == "re_z") {
    out.f = [w](const Point& p) { return w * p[0]; };
  } else if (spec.name == "re_z2" || spec.name == "cos2theta") {
    // Re(z_1^2); equals cos(2 theta) on the unit circle
    out.f = [w](const Point& p) { return w * (p[0] * p[0] - p[1] * p[1]); };
  } else if (spec.name == "abs_power") {
    const double g = spec.gamma;
    if (!(g > 0.0 && g <= 1.0)) throw Error("catalog: abs_power exponent must lie in (0, 1]");
    const Point c = spec.center;
    out.f = [c, g, n, w](const Point& p) { return w * std::pow(dist_to(p, c, n), g); };
    out.holder_exponent = g;
  } else {
    throw Error("catalog: unknown boundary data '" + spec.name + "'");
  }
  out.label = spec.name;
  return out;
}

}  // namespace malab
