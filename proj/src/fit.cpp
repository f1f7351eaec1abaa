#include "malab/fit.hpp"

#include "malab/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace malab {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("fit: length mismatch");
  if (x.size() < 2) throw Error("fit: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw Error("fit: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  f.points = x.size();
  return f;
}

namespace {

std::vector<double> logs(std::span<const double> v, const char* what) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double a : v) {
    if (!(a > 0.0)) throw Error(std::string("fit: nonpositive ") + what + " in a log fit");
    out.push_back(std::log(a));
  }
  return out;
}

}  // namespace

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  const auto lx = logs(x, "abscissa");
  const auto ly = logs(y, "ordinate");
  return fit_line(lx, ly);
}

LineFit fit_semilog(std::span<const double> x, std::span<const double> y) {
  const auto ly = logs(y, "ordinate");
  return fit_line(x, ly);
}

double envelope_constant(std::span<const double> y, std::span<const double> g) {
  if (y.size() != g.size()) throw Error("fit: length mismatch");
  double c = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (g[i] > 0.0) c = std::max(c, y[i] / g[i]);
  return c;
}

PowerBound fit_power_bound(std::span<const double> x, std::span<const double> y, double floor) {
  PowerBound b;
  b.fit = fit_loglog(x, y);
  b.exponent = std::clamp(b.fit.slope, floor, 1.0);
  std::vector<double> g;
  for (double v : x) g.push_back(std::pow(v, b.exponent));
  b.constant = envelope_constant(y, g);
  return b;
}

}  // namespace malab
