#pragma once

#include <span>
#include <string>
#include <vector>

namespace malab {

/// Least-squares line y = intercept + slope x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);
/// Line through (log x, log y); all values must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);
/// Line through (x, log y): y = e^intercept e^{slope x}.
LineFit fit_semilog(std::span<const double> x, std::span<const double> y);

/// Smallest C with y_i <= C g_i for every i with g_i > 0 (one-sided constant).
double envelope_constant(std::span<const double> y, std::span<const double> g);

/// Exponent a in (0, 1] for the power bound y <= C x^a fitted on a ladder:
/// the least-squares log-log slope clamped to (floor, 1], then C = envelope_constant.
struct PowerBound {
  double exponent = 0.0;
  double constant = 0.0;
  LineFit fit;
};
PowerBound fit_power_bound(std::span<const double> x, std::span<const double> y, double floor = 1e-3);

}  // namespace malab
