#include "malab/radial.hpp"

#include "malab/lattice.hpp"

#include <cmath>
#include <numbers>

namespace malab {

RadialProfile radial_quad(double a) {
  return {"quad", [a](double r) { return a * (r * r - 1.0); }, [a](double r) { return 2.0 * a * r; }};
}

RadialProfile radial_holder(double alpha, double w) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("radial: holder exponent must lie in (0, 1]");
  return {"holder",
          [alpha, w](double r) { return -w * std::pow(std::max(1.0 - r * r, 0.0), alpha); },
          [alpha, w](double r) {
            const double g = std::max(1.0 - r * r, 1e-300);
            return 2.0 * w * alpha * r * std::pow(g, alpha - 1.0);
          }};
}

RadialProfile radial_log_pole(double c, double depth) {
  if (!(c > 0.0 && depth > 0.0)) throw Error("radial: log pole needs positive weight and depth");
  const double knee = std::exp(-depth / c);
  return {"log_pole",
          [c, depth](double r) { return r <= 0.0 ? -depth : std::max(c * std::log(r), -depth); },
          [c, knee](double r) { return r > knee ? c / r : 0.0; }};
}

RadialProfile radial_smooth_pole(double c, double eta) {
  if (!(c > 0.0 && eta > 0.0)) throw Error("radial: smooth pole needs positive weight and width");
  const double e2 = eta * eta;
  return {"smooth_pole",
          [c, e2](double r) { return 0.5 * c * std::log((r * r + e2) / (1.0 + e2)); },
          [c, e2](double r) { return c * r / (r * r + e2); }};
}

double radial_ball_mass(int n, const RadialProfile& f, double r) {
  if (r <= 0.0) return 0.0;
  return std::pow(2.0 * std::numbers::pi * r * f.derivative(r), n);
}

double radial_sublevel_radius(const RadialProfile& f, double s) {
  if (f.value(0.0) >= -s) return 0.0;
  if (f.value(1.0) < -s) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  // relative bisection: the log pole puts the knee at e^{-s/c}
  for (int it = 0; it < 200; ++it) {
    const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    if (f.value(mid) < -s) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (lo > 0.0 && hi - lo <= 1e-15 * hi) break;
  }
  return lo > 0.0 ? std::sqrt(lo * hi) : hi;
}

double radial_sublevel_mass(int n, const RadialProfile& v, const RadialProfile& phi, double s) {
  return radial_ball_mass(n, phi, radial_sublevel_radius(v, s));
}

}  // namespace malab
