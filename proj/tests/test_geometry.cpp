#include "malab/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace malab;

TEST_SUITE("geometry") {

TEST_CASE("lattice index round trip and symmetric coordinates") {
  const Lattice lat(2, 7, 0.25);
  for (std::size_t i = 0; i < lat.size(); i += 37) CHECK(lat.index(lat.multi(i)) == i);
  CHECK(lat.coord(0)[0] == doctest::Approx(-0.75));
  CHECK(lat.coord(lat.size() - 1)[3] == doctest::Approx(0.75));
  CHECK(lat.cell_volume() == doctest::Approx(std::pow(0.25, 4)));
  CHECK(lat.stride(0) == 1);
  CHECK(lat.stride(3) == 343);
}

TEST_CASE("multilinear interpolation is exact on affine data") {
  const Lattice lat(1, 9, 0.25);
  Eigen::VectorXd v(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) v[static_cast<Eigen::Index>(i)] = 2.0 * lat.coord(i)[0] - lat.coord(i)[1] + 0.5;
  Point p = Point::Zero();
  p << 0.3, -0.41, 0, 0;
  CHECK(lat.interpolate(v, p) == doctest::Approx(2.0 * 0.3 + 0.41 + 0.5));
}

TEST_CASE("domain spec: rho, extent, inradius") {
  const DomainSpec e = ellipsoid(1.0, 4.0);
  Point p = Point::Zero();
  p[2] = 0.5;
  CHECK(e.rho(p) == doctest::Approx(0.0));
  CHECK(e.inradius() == doctest::Approx(0.5));
  CHECK(e.extent() == doctest::Approx(1.0));
  CHECK(unit_ball(2).rho(Point::Zero()) == doctest::Approx(-1.0));
}

TEST_CASE("interior classification against the sign of rho") {
  const DomainPtr d = build_domain(disc(), 41);
  const double h = d->h();
  std::size_t deep = 0;
  for (std::size_t i = 0; i < d->lattice().size(); ++i) {
    const double r = d->spec().rho(d->lattice().coord(i));
    if (d->interior(i)) CHECK(r < 0.0);
    // nodes a full arm inside must stay interior
    if (r < -2.0 * h) {
      ++deep;
      CHECK(d->interior(i));
    }
  }
  CHECK(deep > 0);
  CHECK(d->interior_nodes().size() >= deep);
}

TEST_CASE("boundary crossings lie on the zero set") {
  for (const DomainSpec& s : {disc(), ellipsoid(1.0, 2.0), unit_ball(2)}) {
    const DomainPtr d = build_domain(s, s.n == 1 ? 33 : 16);
    REQUIRE(!d->crossings().empty());
    for (const auto& c : d->crossings()) {
      CHECK(std::abs(s.rho(c.x)) < 1e-12);
      CHECK(c.theta > 0.0);
      // past the neighbour only when that neighbour was reclassified as exterior
      const Offset v = c.sign * hessian_directions(s.n)[static_cast<std::size_t>(c.direction)];
      const auto nb = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c.node) + d->lattice().offset_of(v));
      if (c.theta > 1.0) CHECK(d->rho()[static_cast<Eigen::Index>(nb)] < 0.0);
      CHECK(c.theta <= 2.0);
    }
  }
}

TEST_CASE("strict pseudoconvexity is enforced") {
  DomainSpec s = ellipsoid(1.0, 1.0);
  s.a = {0.5, 1.0};
  CHECK_THROWS_AS(build_domain(s, 16), PsdViolation);
  CHECK(build_domain(disc(), 16)->psd_margin() >= -kPsdTolerance);
}

TEST_CASE("ball region matches a brute-force count") {
  const DomainPtr d = build_domain(disc(), 65);
  Point c = Point::Zero();
  c[0] = 0.2;
  const RegionMask k = ball_region(d, c, 0.3);
  std::size_t expect = 0;
  for (std::size_t i : d->interior_nodes())
    if ((d->lattice().coord(i) - c).norm() <= 0.3) ++expect;
  CHECK(k.count() == expect);
  CHECK(compactly_inside(k));
}

TEST_CASE("shrink keeps nodes at distance at least delta from the boundary") {
  const DomainPtr d = build_domain(disc(), 65);
  const RegionMask k = shrink(d, 0.2);
  for (std::size_t i : d->interior_nodes()) {
    const double dist = 1.0 - d->lattice().coord(i).norm();
    if (dist > 0.2 + d->h()) CHECK(k.contains(i));
    if (dist < 0.2 - d->h()) CHECK_FALSE(k.contains(i));
  }
}

}
