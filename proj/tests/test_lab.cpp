#include "malab/catalog.hpp"
#include "malab/fit.hpp"
#include "malab/lab.hpp"
#include "malab/psh.hpp"
#include "malab/radial.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace malab;
using std::numbers::pi;

TEST_SUITE("lab") {

TEST_CASE("line fits recover exact power and exponential laws") {
  const std::vector<double> x{0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  std::vector<double> z;
  for (double t : x) {
    y.push_back(3.0 * std::pow(t, -2.0));
    z.push_back(0.7 * std::exp(-1.5 * t));
  }
  const LineFit p = fit_loglog(x, y);
  CHECK(p.slope == doctest::Approx(-2.0));
  CHECK(std::exp(p.intercept) == doctest::Approx(3.0));
  CHECK(p.rms_residual < 1e-12);
  const LineFit e = fit_semilog(x, z);
  CHECK(e.slope == doctest::Approx(-1.5));
  CHECK(std::exp(e.intercept) == doctest::Approx(0.7));
}

TEST_CASE("one-sided envelope constant and clamped power bound") {
  const std::vector<double> y{1.0, 4.0, 2.0};
  const std::vector<double> g{1.0, 2.0, 4.0};
  CHECK(envelope_constant(y, g) == doctest::Approx(2.0));
  const std::vector<double> x{0.01, 0.02, 0.04, 0.08};
  std::vector<double> w;
  for (double t : x) w.push_back(5.0 * t * t);
  const PowerBound b = fit_power_bound(x, w);
  CHECK(b.exponent == doctest::Approx(1.0));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(w[i] <= b.constant * x[i] + 1e-15);
}

TEST_CASE("radial sublevel masses: log pole against (dd^c (|z|^2 - 1))^n") {
  // {c log r < -s} = B(e^{-s/c}); nu(B_r) = 4 pi r^2 (n = 1), 16 pi^2 r^4 (n = 2)
  const double c = 1.0 / (2.0 * pi);
  const RadialProfile v = radial_log_pole(c, 8.0);
  const RadialProfile phi = radial_quad();
  for (double s : {0.25, 1.0, 3.0}) {
    const double r = std::exp(-s / c);
    CHECK(radial_sublevel_radius(v, s) == doctest::Approx(r));
    CHECK(radial_sublevel_mass(1, v, phi, s) == doctest::Approx(4.0 * pi * r * r));
    CHECK(radial_sublevel_mass(2, v, phi, s) == doctest::Approx(16.0 * pi * pi * std::pow(r, 4)));
  }
  CHECK(radial_sublevel_mass(1, v, phi, 9.0) == 0.0);
}

TEST_CASE("radial ball mass against a numerical derivative") {
  const RadialProfile f = radial_smooth_pole(0.3, 0.2);
  for (double r : {0.4, 1.0}) {
    const double e = 1e-6;
    const double fp = (f.value(r + e) - f.value(r - e)) / (2.0 * e);
    CHECK(radial_ball_mass(1, f, r) == doctest::Approx(2.0 * pi * r * fp).epsilon(1e-6));
    CHECK(radial_ball_mass(2, f, r) == doctest::Approx(std::pow(2.0 * pi * r * fp, 2)).epsilon(1e-6));
  }
  CHECK(radial_ball_mass(1, f, 1.0) == doctest::Approx(2.0 * pi * 0.3 / (1.0 + 0.04)));
}

TEST_CASE("sublevel decay for a radial pair") {
  const std::vector<double> s{0.125, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  for (int n : {1, 2}) {
    const InequalityReport r =
        sublevel_decay_radial(n, radial_log_pole(1.0 / (2.0 * pi), 8.0), radial_quad(), s);
    CHECK(r.pass);
    CHECK(r.constant("poly_exponent") <= -n + 0.3);
    CHECK(r.constant("tau") > 0.0);
    // exact exponential rate 2 n / c = 4 pi n
    CHECK(r.constant("tau") == doctest::Approx(4.0 * pi * n).epsilon(1e-6));
  }
}

TEST_CASE("volume-capacity fit recovers a synthetic law") {
  std::vector<double> caps;
  std::vector<double> masses;
  for (double cap : {2.0, 3.0, 4.5, 7.0, 10.0}) {
    caps.push_back(cap);
    masses.push_back(0.8 * cap * std::exp(-2.5 / cap));
  }
  const InequalityReport r = volume_capacity_fit(1, caps, masses);
  CHECK(r.constant("alpha0") == doctest::Approx(2.5));
  CHECK(r.constant("C") == doctest::Approx(0.8));
  CHECK(r.violations == 0);
}

TEST_CASE("Cegrell inequality is an equality for identical entries") {
  const DomainPtr d = build_domain(unit_ball(2), 16);
  FieldSpec q;
  q.weight = 0.05;
  const GridFunction v = sample(d, make_subsolution(q, unit_ball(2)).f);
  const GridFunction vs[] = {v, v};
  const InequalityReport r = verify_cegrell(vs);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].lhs == doctest::Approx(r.points[0].rhs).epsilon(1e-9));
  CHECK(r.pass);
}

TEST_CASE("randomized suites pass and are reproducible") {
  const DomainPtr d = build_domain(disc(), 33);
  const InequalityReport a = blocki_suite(d, 12, 7);
  const InequalityReport b = blocki_suite(d, 12, 7);
  CHECK(a.pass);
  CHECK(a.violations == 0);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].lhs == b.points[i].lhs);
  const InequalityReport c = cegrell_suite(d, 12, 7);
  CHECK(c.pass);
  CHECK(c.violations == 0);
}

TEST_CASE("mass and phi_eps scans on the defining function") {
  const DomainPtr d = build_domain(disc(), 129);
  const GridFunction phi = sample(d, make_subsolution({}, disc()).f);
  const std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  CHECK(mass_est_scan(phi, 1, eps).pass);
  CHECK(phi_eps_scan(phi, ma_measure(phi), eps).pass);
}

TEST_CASE("dome ladder halves its heights and stays psh") {
  const DomainPtr d = build_domain(disc(), 65);
  const GridFunction u = sample(d, make_subsolution({}, disc()).f);
  const DomeLadder l = dome_ladder(u, 0.1, 4);
  REQUIRE(l.v.size() == 4);
  for (std::size_t j = 1; j < l.heights.size(); ++j) CHECK(l.heights[j] == doctest::Approx(0.5 * l.heights[j - 1]));
  for (const auto& v : l.v) {
    CHECK(check_psh(v).ok);
    for (std::size_t i : d->interior_nodes()) CHECK(v[i] >= u[i]);
  }
}

}
