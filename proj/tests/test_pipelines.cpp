#include "malab/catalog.hpp"
#include "malab/pipelines.hpp"

#include <doctest.h>

#include <cmath>

using namespace malab;

TEST_SUITE("pipelines") {

TEST_CASE("alpha4 identity") {
  // alpha alpha2 alpha3 alpha3~ / (2n + 1 + alpha)
  CHECK(theoretical_alpha4(1, 0.5, 0.5, 1.0) == doctest::Approx(0.25 / 3.5));
  CHECK(theoretical_alpha4(2, 0.25, 0.5, 0.5, 0.5) == doctest::Approx(0.25 * 0.125 / 5.25));
}

TEST_CASE("default delta ladder is dyadic and stops at 4h") {
  const DomainPtr d = build_domain(disc(), 1281);
  const auto l = default_delta_ladder(*d, 0.2, 5);
  REQUIRE(l.size() == 5);
  for (std::size_t j = 0; j < l.size(); ++j) CHECK(l[j] == doctest::Approx(0.2 / std::pow(2.0, double(j + 1))));
  const DomainPtr c = build_domain(disc(), 257);
  const auto s = default_delta_ladder(*c, 0.2, 5);
  CHECK(s.size() == 2);  // 4h = 0.03125 keeps 0.1 and 0.05
  for (double delta : s) CHECK(delta >= 4.0 * c->h());
}

TEST_CASE("enlarged domain keeps the shape") {
  const DomainSpec e = enlarge(ellipsoid(1.0, 2.0), 0.25);
  CHECK(e.shape == "ellipsoid");
  CHECK(e.radius == doctest::Approx(1.25));
  CHECK(e.a[1] == doctest::Approx(2.0));
}

TEST_CASE("too coarse a lattice for the default ladder is refused") {
  TheoremBInput in;
  in.domain = disc();
  in.resolution = 129;
  in.phi = make_subsolution({}, disc());
  in.psi = make_boundary_data({"zero"}, disc());
  CHECK_THROWS_WITH_AS(theorem_b_pipeline(in), doctest::Contains("resolution"), Error);
}

TEST_CASE("regularity pipeline invariants on an explicit ladder") {
  TheoremBInput in;
  in.domain = disc();
  in.resolution = 257;
  in.phi = make_subsolution({}, disc());
  in.psi = make_boundary_data({"zero"}, disc());
  in.options.deltas = {0.16, 0.12, 0.08, 0.06, 0.04};
  const HolderReport r = theorem_b_pipeline(in);
  CHECK(r.converged);
  CHECK(r.sandwich_ok);
  CHECK(r.gluing_ok);
  CHECK(r.collar_bound_ok);
  CHECK(r.coupling_ok);
  CHECK(r.alpha4_identity);
  CHECK(r.alpha == doctest::Approx(0.5));
  CHECK(r.alpha4 == doctest::Approx(theoretical_alpha4(1, r.alpha, r.alpha2, r.alpha3, r.alpha3_tilde)));
  REQUIRE(r.rows.size() == 5);
  for (const auto& row : r.rows) {
    CHECK(row.eps == doctest::Approx(r.delta0 * std::pow(row.delta / r.delta0, r.kappa)));
    CHECK(row.collar_gap <= row.collar_bound);
    CHECK(row.glue_psh);
    CHECK(row.glue_equal_outside);
  }
  // u = |z|^2 - 1 is smooth: the sup-convolution gap is at least linear in delta
  CHECK(r.empirical_exponent >= 0.9);
}

}
