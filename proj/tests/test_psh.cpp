#include "malab/catalog.hpp"
#include "malab/hessian.hpp"
#include "malab/psh.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace malab;
using std::numbers::pi;

namespace {

// 4^n n!
double convention_constant(int n) { return n == 1 ? 4.0 : 32.0; }

Field re_z() {
  return [](const Point& p) { return p[0]; };
}

}  // namespace

TEST_SUITE("psh") {

TEST_CASE("dd^c convention constants") {
  CHECK(ma_constant(1) == convention_constant(1));
  CHECK(ma_constant(2) == convention_constant(2));
}

TEST_CASE("complex Hessian of |z|^2 is the identity at every interior node") {
  for (int n : {1, 2}) {
    const DomainPtr d = build_domain(unit_ball(n), n == 1 ? 33 : 16);
    const GridFunction f = sample(d, norm_squared(n));
    for (std::size_t i : d->interior_nodes()) {
      const CHessian hm = complex_hessian(*d, f.values, f.trace, i);
      CHECK(hm(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
      if (n == 2) {
        CHECK(std::abs(hm(0, 1)) < 1e-9);
        CHECK(hm(1, 1).real() == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("hermitian helpers") {
  CHessian a = CHessian::Zero();
  a(0, 0) = 2.0;
  a(1, 1) = 3.0;
  a(0, 1) = std::complex<double>(0.0, 1.0);
  a(1, 0) = std::conj(a(0, 1));
  CHECK(hermitian_det(a, 2) == doctest::Approx(5.0));
  const Eigen::Vector2d ev = hermitian_eigenvalues(a, 2);
  CHECK(ev[0] * ev[1] == doctest::Approx(5.0));
  CHECK(ev[0] + ev[1] == doctest::Approx(5.0));
  CHessian b = CHessian::Zero();
  b(0, 0) = -1.0;
  b(1, 1) = 4.0;
  CHECK(projected_det(b, 2) == doctest::Approx(0.0));
  CHECK(lambda_min(psd_project(b, 2), 2) == doctest::Approx(0.0));
}

TEST_CASE("mixed discriminant polarises the determinant") {
  CHessian a = CHessian::Zero();
  CHessian b = CHessian::Zero();
  a(0, 0) = 2.0;
  a(1, 1) = 5.0;
  b(0, 0) = 3.0;
  b(1, 1) = 7.0;
  const CHessian ab[] = {a, b};
  CHECK(mixed_discriminant(ab, 2) == doctest::Approx((2.0 * 7.0 + 5.0 * 3.0) / 2.0));
  const CHessian aa[] = {a, a};
  CHECK(mixed_discriminant(aa, 2) == doctest::Approx(10.0));
}

TEST_CASE("MA mass of the ball's defining function") {
  // (dd^c (|z|^2 - 1))^n = 4^n n! dV: 4 pi in n = 1, 32 vol(B^4) = 16 pi^2 in n = 2
  const DomainPtr d1 = build_domain(disc(), 257);
  const double m1 = ma_measure(sample(d1, make_subsolution({}, disc()).f)).total();
  CHECK(m1 == doctest::Approx(4.0 * pi).epsilon(10.0 * d1->h()));
  const DomainPtr d2 = build_domain(unit_ball(2), 24);
  const double m2 = ma_measure(sample(d2, make_subsolution({}, unit_ball(2)).f)).total();
  CHECK(m2 == doctest::Approx(16.0 * pi * pi).epsilon(10.0 * d2->h()));
}

TEST_CASE("scheme weights reproduce a constant density away from the boundary") {
  const DomainPtr d = build_domain(disc(), 65);
  const GridFunction f = sample(d, norm_squared(1));
  const Eigen::VectorXd w = scheme_weights(f);
  const double cell = d->lattice().cell_volume();
  for (std::size_t i : d->interior_nodes())
    if (d->arms(i) == nullptr) CHECK(w[static_cast<Eigen::Index>(i)] == doctest::Approx(4.0 * cell));
}

TEST_CASE("psh check separates convex and concave data") {
  const DomainPtr d = build_domain(unit_ball(2), 16);
  CHECK(check_psh(sample(d, norm_squared(2))).ok);
  CHECK(check_psh(sample(d, re_z())).ok);
  // the default tolerance is 10 h, above 1 at this resolution
  const GridFunction concave = -5.0 * sample(d, norm_squared(2));
  const PshCheck bad = check_psh(concave);
  CHECK_FALSE(bad.ok);
  CHECK(bad.worst_eigenvalue == doctest::Approx(-5.0));
  CHECK_THROWS_AS(ma_measure(concave), NotPsh);
}

TEST_CASE("domination of measures") {
  const DomainPtr d = build_domain(disc(), 65);
  const GridFunction f = sample(d, norm_squared(1));
  CHECK(dominated_by(lebesgue_density(d, 3.9), f).dominated);
  CHECK_FALSE(dominated_by(lebesgue_density(d, 4.5), f).dominated);
}

TEST_CASE("sup-convolution and ball average of an affine function") {
  const DomainPtr d = build_domain(disc(), 129);
  const GridFunction u = sample(d, re_z());
  const double delta = 0.1;
  const RegionalFunction sc = sup_convolution(u, delta);
  const RegionalFunction av = ball_average(u, delta);
  REQUIRE(!sc.region.empty());
  for (std::size_t i : d->interior_nodes()) {
    if (!sc.region.contains(i)) continue;
    // sup over the lattice ball of radius delta: the largest x-offset kh <= delta
    CHECK(sc.f[i] - u[i] == doctest::Approx(std::floor(delta / d->h() + 1e-9) * d->h()));
    CHECK(av.f[i] == doctest::Approx(u[i]).epsilon(1e-12));
  }
}

TEST_CASE("Hoelder seminorm of -(1 - |z|^2)^{1/2}") {
  // radial oracle: sup over 0 <= a < b <= 1 of (g(b) - g(a)) / (b - a)^{1/2} with g(r) = -(1 - r^2)^{1/2}
  double oracle = 0.0;
  const int m = 4000;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j <= m; j += 7) {
      const double a = double(i) / m;
      const double b = double(j) / m;
      oracle = std::max(oracle, (std::sqrt(1 - a * a) - std::sqrt(1 - b * b)) / std::sqrt(b - a));
    }
  CHECK(oracle == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
  FieldSpec hs;
  hs.name = "holder";
  hs.alpha = 0.5;
  const DomainPtr d = build_domain(disc(), 129);
  const HolderSeminormResult r = holder_seminorm(sample(d, make_subsolution(hs, disc()).f), 0.5);
  CHECK(r.value == doctest::Approx(oracle).epsilon(0.05));
  CHECK(r.value <= oracle + 1e-9);
}

TEST_CASE("mollification keeps a quadratic up to the mollifier's second moment") {
  const DomainPtr d = build_domain(disc(), 129, 16);
  const GridFunction phi = sample(d, make_subsolution({}, disc()).f);
  const MollifyResult m = mollify(phi, 0.1);
  CHECK(m.sup_difference > 0.0);
  CHECK(m.sup_difference < 0.1 * 0.1);
  CHECK(check_psh(m.f).ok);
}

TEST_CASE("E0 membership") {
  const DomainPtr d = build_domain(disc(), 65);
  // mass of w (|z|^2 - 1) is 4 pi w
  FieldSpec small;
  small.weight = 0.9 / (4.0 * pi);
  FieldSpec big;
  big.weight = 1.1 / (4.0 * pi);
  CHECK(is_in_E0_prime(sample(d, make_subsolution(small, disc()).f)).member);
  const E0Report r = is_in_E0_prime(sample(d, make_subsolution(big, disc()).f));
  CHECK_FALSE(r.member);
  CHECK(r.failed.find("mass") != std::string::npos);
  CHECK(is_in_E0(sample(d, make_subsolution(big, disc()).f)).member);
  CHECK_FALSE(is_in_E0(sample(d, re_z())).member);
}

}
