#include "malab/catalog.hpp"
#include "malab/linear.hpp"
#include "malab/psh.hpp"
#include "malab/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace malab;

namespace {

double max_error(const GridFunction& u, const Field& exact) {
  double e = 0.0;
  for (std::size_t i : u.domain->interior_nodes()) e = std::max(e, std::abs(u[i] - exact(u.lattice().coord(i))));
  return e;
}

Field zero() {
  return [](const Point&) { return 0.0; };
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("constant density 4 on the disc gives |z|^2 - 1") {
  const DomainPtr d = build_domain(disc(), 129);
  const SolveReport r = solve_dirichlet({d, lebesgue_density(d, 4.0), zero(), std::nullopt});
  CHECK(r.converged);
  CHECK(max_error(r.u, make_subsolution({}, disc()).f) <= 10.0 * d->h());
  CHECK(r.u.interior_max() <= 0.0);
}

TEST_CASE("constant density 32 on the ball of C^2 gives |z|^2 - 1") {
  const DomainPtr d = build_domain(unit_ball(2), 16);
  const SolveReport r = solve_dirichlet({d, lebesgue_density(d, 32.0), zero(), std::nullopt});
  CHECK(r.converged);
  CHECK(max_error(r.u, make_subsolution({}, unit_ball(2)).f) <= 10.0 * d->h());
}

TEST_CASE("maximal envelope of pluriharmonic data is the data") {
  for (int n : {1, 2}) {
    const DomainPtr d = build_domain(unit_ball(n), n == 1 ? 65 : 16);
    FieldSpec rz;
    rz.name = "re_z";
    const Field psi = make_boundary_data(rz, unit_ball(n)).f;
    const GridFunction env = maximal_envelope(d, psi);
    // n = 1 is a direct solve; n = 2 stops on the sweep change, slow modes leave ~1e-5
    CHECK(max_error(env, psi) < (n == 1 ? 1e-10 : 1e-3 * d->h()));
  }
}

TEST_CASE("sandwich with a declared subsolution") {
  const DomainPtr d = build_domain(disc(), 129);
  FieldSpec hs;
  hs.name = "holder";
  hs.alpha = 0.5;
  const GridFunction phi = sample(d, make_subsolution(hs, disc()).f);
  const SolveReport r = solve_dirichlet({d, scheme_measure(phi), zero(), phi});
  CHECK(r.converged);
  CHECK(r.sandwich_checked);
  CHECK(r.subsolution_dominated);
  CHECK(r.sandwich_ok);
  CHECK(r.sandwich_violation <= 10.0 * d->h());
}

TEST_CASE("comparison principle on solved pairs") {
  const DomainPtr d = build_domain(disc(), 65);
  const GridFunction u = solve_dirichlet({d, lebesgue_density(d, 8.0), zero(), std::nullopt}).u;
  const GridFunction v = solve_dirichlet({d, lebesgue_density(d, 4.0), zero(), std::nullopt}).u;
  const ComparisonReport c = comparison_check(u, v);
  CHECK(c.premises);
  CHECK(c.ordered);
  CHECK_FALSE(comparison_check(v, u).premises);
}

TEST_CASE("Poisson solve reproduces a discrete Laplacian") {
  const DomainPtr d = build_domain(disc(), 65);
  const GridFunction exact = sample(d, [](const Point& p) { return p[0] * p[0] * p[0] - 3.0 * p[0] * p[1] * p[1] + p[0]; });
  Eigen::VectorXd target = Eigen::VectorXd::Zero(exact.values.size());
  GridFunction start = exact;
  for (std::size_t i : d->interior_nodes()) start.values[static_cast<Eigen::Index>(i)] = 0.0;
  const GridFunction u = solve_poisson(start, target);
  CHECK(poisson_residual(u, target) < 1e-10);
  // Re(z^3) + x is harmonic; the 5-point scheme leaves an O(h^2) consistency error
  CHECK(max_error(u, [](const Point& p) { return p[0] * p[0] * p[0] - 3.0 * p[0] * p[1] * p[1] + p[0]; }) < d->h());
}

TEST_CASE("sweep budget exhaustion is reported") {
  const DomainPtr d = build_domain(unit_ball(2), 16);
  SolverOptions o;
  o.max_sweeps = 2;
  bool failed = false;
  try {
    failed = !solve_dirichlet({d, lebesgue_density(d, 32.0), zero(), std::nullopt}, o).converged;
  } catch (const NotConverged&) {
    failed = true;
  }
  CHECK(failed);
}

}
