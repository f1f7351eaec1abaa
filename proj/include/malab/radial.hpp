#pragma once

#include <functional>
#include <string>

namespace malab {

/// Radial function f(|z|) on the unit ball, nondecreasing in r on (0, 1].
struct RadialProfile {
  std::string label;
  std::function<double(double)> value;
  std::function<double(double)> derivative;  // d/dr
};

/// a (r^2 - 1): the defining function of the unit ball, scaled.
RadialProfile radial_quad(double a = 1.0);
/// -w (1 - r^2)^alpha.
RadialProfile radial_holder(double alpha, double w = 1.0);
/// max(c log r, -depth); total MA mass (2 pi c)^n.
RadialProfile radial_log_pole(double c, double depth);

/// (c/2) log((r^2 + eta^2) / (1 + eta^2)): smooth, zero on the sphere, total MA mass
/// (2 pi c / (1 + eta^2))^n.
RadialProfile radial_smooth_pole(double c, double eta);

/// (dd^c f)^n of the open ball B_r for a radial PSH profile smooth near |z| = r:
/// (2 pi r f'(r))^n.
double radial_ball_mass(int n, const RadialProfile& f, double r);

/// Radius of the sublevel set {f < -s} (0 if empty, 1 if it is the whole ball).
double radial_sublevel_radius(const RadialProfile& f, double s);

/// nu({v < -s}) with nu = (dd^c phi)^n.
double radial_sublevel_mass(int n, const RadialProfile& v, const RadialProfile& phi, double s);

}  // namespace malab
