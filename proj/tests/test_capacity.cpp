#include "malab/capacity.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace malab;
using std::numbers::pi;

namespace {

// Radial extremal h(r) = log(r / R) / log(R / r0) on r0 < r < R; the n = 1 mass on the
// closed disc of radius r0 is the outward flux 2 pi r h'(r), by a central difference.
double flux_oracle(double r0, double outer) {
  const auto h = [&](double r) { return std::log(r / outer) / std::log(outer / r0); };
  const double r = 0.5 * (r0 + outer);
  const double e = 1e-5;
  return 2.0 * pi * r * (h(r + e) - h(r - e)) / (2.0 * e);
}

}  // namespace

TEST_SUITE("capacity") {

TEST_CASE("closed form agrees with the flux oracle") {
  for (double r : {0.2, 0.3, 0.5}) CHECK(ball_capacity(1, r) == doctest::Approx(flux_oracle(r, 1.0)).epsilon(1e-8));
  CHECK(ball_capacity(2, 0.5) == doctest::Approx(std::pow(2.0 * pi / std::log(2.0), 2)));
  CHECK(ball_capacity(1, 0.5, 2.0) == doctest::Approx(2.0 * pi / std::log(4.0)));
}

TEST_CASE("discrete capacity of concentric discs") {
  const DomainPtr d = build_domain(disc(), 129);
  double prev = 0.0;
  for (double r : {0.2, 0.3, 0.5}) {
    const CapacityResult c = capacity(ball_region(d, Point::Zero(), r));
    CHECK(c.converged);
    CHECK(c.minus_one_on_k);
    CHECK(c.value == doctest::Approx(flux_oracle(r, 1.0)).epsilon(0.05));
    CHECK(c.value > prev);
    prev = c.value;
  }
}

TEST_CASE("extremal function is psh, in [-1, 0] and -1 on K") {
  const DomainPtr d = build_domain(disc(), 65);
  Point c = Point::Zero();
  c[1] = -0.2;
  const RegionMask k = ball_region(d, c, 0.25);
  const CapacityResult r = relative_extremal(k);
  CHECK(r.converged);
  CHECK(r.extremal.interior_max() <= 1e-12);
  CHECK(r.extremal.interior_min() >= -1.0 - 1e-12);
  for (std::size_t i : d->interior_nodes())
    if (k.contains(i)) CHECK(r.extremal[i] == doctest::Approx(-1.0));
}

TEST_CASE("definition-based oracle bounds the capacity from below") {
  const DomainPtr d = build_domain(disc(), 65);
  const RegionMask k = ball_region(d, Point::Zero(), 0.3);
  const CapacityResult r = capacity(k);
  const double blind = capacity_sup_oracle(k, 40);
  CHECK(blind > 0.0);
  CHECK(blind <= r.value * (1.0 + 1e-9));
  // seeded with h_K* + 1 the oracle attains the capacity
  CHECK(capacity_sup_oracle(k, 40, &r.extremal) == doctest::Approx(r.value).epsilon(1e-6));
}

TEST_CASE("n = 2 capacity follows the (2 pi / log(1/r))^2 law in slope") {
  const DomainPtr d = build_domain(unit_ball(2), 16);
  const CapacityResult a = capacity(ball_region(d, Point::Zero(), 0.3));
  const CapacityResult b = capacity(ball_region(d, Point::Zero(), 0.5));
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(b.value > a.value);
  const double slope = std::log(b.value / a.value) / std::log(std::log(1.0 / 0.5) / std::log(1.0 / 0.3));
  CHECK(slope == doctest::Approx(-2.0).epsilon(0.15));
}

}
