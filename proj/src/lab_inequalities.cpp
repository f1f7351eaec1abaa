#include "malab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace malab {

void InequalityReport::add_point(double parameter_, double lhs, double rhs, double tolerance) {
  InequalityPoint p{parameter_, lhs, rhs, rhs - lhs, tolerance};
  points.push_back(p);
  const double rel = p.slack / std::max(1.0, std::abs(rhs));
  worst_slack = points.size() == 1 ? rel : std::min(worst_slack, rel);
  if (p.slack < -tolerance) ++violations;
  if (p.slack < 0.0) ++strict_violations;
}

void InequalityReport::add_constant(const std::string& name, double value, const std::string& provenance) {
  for (auto& c : constants) {
    if (c.name == name) {
      c.value = value;
      c.provenance = provenance;
      return;
    }
  }
  constants.push_back({name, value, provenance});
}

bool InequalityReport::has_constant(const std::string& name) const {
  return std::any_of(constants.begin(), constants.end(), [&](const Constant& c) { return c.name == name; });
}

double InequalityReport::constant(const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name) return c.value;
  throw Error("report '" + id + "': no constant '" + name + "'");
}

namespace {

double tolerance_factor(double tol_h) { return tol_h < 0.0 ? 10.0 : tol_h; }

double integrate_power(const Eigen::VectorXd& g, int k, const GridMeasure& mu) {
  double s = 0.0;
  for (std::size_t i : mu.domain->interior_nodes()) {
    const auto j = static_cast<Eigen::Index>(i);
    s += std::pow(std::max(g[j], 0.0), k) * mu.weights[j];
  }
  return s;
}

double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

InequalityReport verify_blocki(std::span<const GridFunction> vs, const GridFunction& v, const GridFunction& h,
                               int k, double tol_h) {
  const DomainPtr& d = v.domain;
  const int n = d->n();
  if (static_cast<int>(vs.size()) != n) throw Error("verify_blocki: need n functions v_1..v_n");
  if (k < 1 || k > n) throw Error("verify_blocki: k must lie in [1, n]");
  InequalityReport r;
  r.id = "blocki";
  r.parameter = "k";

  bool hyp = true;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].interior_max() > 1e-12 * std::max(1.0, vs[i].sup_norm())) {
      r.notes.push_back("hypothesis: v_" + std::to_string(i + 1) + " is not <= 0");
      hyp = false;
    }
  }
  const GridFunction gap = h - v;
  const double scale_hv = std::max({1.0, h.sup_norm(), v.sup_norm()});
  if (gap.interior_min() < -1e-12 * scale_hv) {
    r.notes.push_back("hypothesis: v <= h fails (min h - v = " + fmt(gap.interior_min()) + ")");
    hyp = false;
  }
  const double edge = gap.trace.size() ? gap.trace.cwiseAbs().maxCoeff() : 0.0;
  if (edge > d->h() * scale_hv) {
    r.notes.push_back("hypothesis: h - v does not vanish on the boundary (" + fmt(edge) + ")");
    hyp = false;
  }

  const GridMeasure left_mu = mixed_measure(vs);
  const double lhs = integrate_power(gap.values, k, left_mu);
  std::vector<GridFunction> right;
  for (int j = 0; j < k; ++j) right.push_back(v);
  for (int j = k; j < n; ++j) right.push_back(vs[static_cast<std::size_t>(j)]);
  double norms = factorial(k);
  for (int j = 0; j < k; ++j) norms *= vs[static_cast<std::size_t>(j)].sup_norm();
  const double rhs = norms * mixed_measure(right).total();

  const double tol = tolerance_factor(tol_h) * d->h() * std::max(lhs, rhs);
  r.add_point(k, lhs, rhs, tol);
  r.add_constant("k", k, "input");
  r.add_constant("norm_product", norms, "k! times sup norms of v_1..v_k");
  r.pass = hyp && r.violations == 0;
  return r;
}

InequalityReport verify_cegrell(std::span<const GridFunction> vs, double tol_h) {
  if (vs.empty()) throw Error("verify_cegrell: empty argument list");
  const DomainPtr& d = vs[0].domain;
  const int n = d->n();
  if (static_cast<int>(vs.size()) != n) throw Error("verify_cegrell: need n functions");
  InequalityReport r;
  r.id = "cegrell";
  bool hyp = true;
  double rhs = 1.0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const E0Report m = is_in_E0(vs[i]);
    if (!m.member) {
      r.notes.push_back("hypothesis: v_" + std::to_string(i + 1) + " not in E0 (" + m.failed + ")");
      hyp = false;
    }
    rhs *= std::pow(m.mass, 1.0 / n);
  }
  const double lhs = mixed_measure(vs, false).total();
  const double tol = tolerance_factor(tol_h) * d->h() * std::max(lhs, rhs);
  r.add_point(0, lhs, rhs, tol);
  r.pass = hyp && r.violations == 0;
  return r;
}

namespace {

double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

struct Draw {
  Field f;
  std::string label;
};

Draw draw_basic(const GridDomain& d, std::mt19937_64& rng) {
  const DomainSpec spec = d.spec();
  const int n = d.n();
  const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
  if (kind == 0) {
    const double a = uniform(rng, 0.3, 2.0);
    return {[spec, a](const Point& p) { return a * spec.rho(p); }, "rho*" + fmt(a)};
  }
  if (kind == 1) {
    const double a = uniform(rng, 0.3, 1.5);
    // n = 2: smaller exponents break the discrete PSH tolerance in the boundary layer
    const double e = uniform(rng, n == 1 ? 0.3 : 0.6, 1.0);
    return {[spec, a, e](const Point& p) { return -a * std::pow(std::max(-spec.rho(p), 0.0), e); },
            "-" + fmt(a) + "(-rho)^" + fmt(e)};
  }
  // max(a rho, (b/2) log((|z - c|^2 + eta^2) / R^2)) with R beyond the domain: zero trace,
  // kink around c; eta keeps the pole resolvable
  Point c = Point::Zero();
  const double rin = 0.5 * spec.inradius();
  for (int j = 0; j < 2 * n; ++j) c[j] = uniform(rng, -rin, rin) / std::sqrt(2.0 * n);
  const double a = uniform(rng, 0.5, 2.0);
  const double b = a * uniform(rng, 0.3, 1.0);
  const double big = 1.5 * (spec.extent() * std::sqrt(2.0 * n) + c.norm());
  const double eta2 = 0.01 * spec.inradius() * spec.inradius();
  return {[spec, a, b, c, big, eta2, n](const Point& p) {
            const double r2 = (p - c).head(2 * n).squaredNorm() + eta2;
            return std::max(a * spec.rho(p), 0.5 * b * std::log(r2 / (big * big)));
          },
          "max(rho*" + fmt(a) + ",log-pole*" + fmt(b) + ")"};
}

}  // namespace

GridFunction random_e0_function(const DomainPtr& d, std::mt19937_64& rng, std::string* label) {
  const bool sum = std::uniform_int_distribution<int>(0, 3)(rng) == 0;
  Draw a = draw_basic(*d, rng);
  if (sum) {
    Draw b = draw_basic(*d, rng);
    Field fa = a.f;
    Field fb = b.f;
    a.f = [fa, fb](const Point& p) { return 0.5 * (fa(p) + fb(p)); };
    a.label = "(" + a.label + "+" + b.label + ")/2";
  }
  if (label) *label = a.label;
  return sample(d, a.f);
}

InequalityReport blocki_suite(const DomainPtr& d, int instances, std::uint64_t seed) {
  if (instances < 1) throw Error("blocki_suite: need at least one instance");
  const int n = d->n();
  std::mt19937_64 rng(seed);
  InequalityReport r;
  r.id = "blocki";
  r.parameter = "instance";
  int hyp_fail = 0;
  for (int t = 0; t < instances; ++t) {
    std::vector<GridFunction> vs;
    for (int i = 0; i < n; ++i) vs.push_back(random_e0_function(d, rng) + (-uniform(rng, 0.0, 0.5)));
    // h = g + pluriharmonic part, v = h + w with w in E0: v <= h and h - v = -w -> 0
    const double b0 = uniform(rng, -0.5, 0.5);
    Eigen::Vector4d lin = Eigen::Vector4d::Zero();
    for (int j = 0; j < 2 * n; ++j) lin[j] = uniform(rng, -0.5, 0.5);
    const GridFunction ell = sample(d, [lin, b0](const Point& p) { return lin.dot(p) + b0; });
    const GridFunction h = random_e0_function(d, rng) + ell;
    const GridFunction v = h + random_e0_function(d, rng);
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    const InequalityReport one = verify_blocki(vs, v, h, k);
    const InequalityPoint& p = one.points.front();
    r.add_point(t, p.lhs, p.rhs, p.tolerance);
    if (one.notes.size()) {
      ++hyp_fail;
      r.notes.push_back("instance " + std::to_string(t) + ": " + one.notes.front());
    }
  }
  r.add_constant("instances", instances, "input");
  r.add_constant("seed", static_cast<double>(seed), "input");
  r.add_constant("pass_rate", 1.0 - static_cast<double>(r.violations) / instances, "points within 10 h max(lhs, rhs)");
  r.add_constant("strict_pass_rate", 1.0 - static_cast<double>(r.strict_violations) / instances, "points with lhs <= rhs");
  r.pass = r.violations == 0 && hyp_fail == 0;
  return r;
}

InequalityReport cegrell_suite(const DomainPtr& d, int instances, std::uint64_t seed) {
  if (instances < 1) throw Error("cegrell_suite: need at least one instance");
  const int n = d->n();
  std::mt19937_64 rng(seed);
  InequalityReport r;
  r.id = "cegrell";
  r.parameter = "instance";
  int hyp_fail = 0;
  for (int t = 0; t < instances; ++t) {
    std::vector<GridFunction> vs;
    for (int i = 0; i < n; ++i) vs.push_back(random_e0_function(d, rng));
    const InequalityReport one = verify_cegrell(vs);
    const InequalityPoint& p = one.points.front();
    r.add_point(t, p.lhs, p.rhs, p.tolerance);
    if (one.notes.size()) {
      ++hyp_fail;
      r.notes.push_back("instance " + std::to_string(t) + ": " + one.notes.front());
    }
  }
  r.add_constant("instances", instances, "input");
  r.add_constant("seed", static_cast<double>(seed), "input");
  r.add_constant("pass_rate", 1.0 - static_cast<double>(r.violations) / instances, "points within 10 h max(lhs, rhs)");
  r.add_constant("strict_pass_rate", 1.0 - static_cast<double>(r.strict_violations) / instances, "points with lhs <= rhs");
  r.pass = r.violations == 0 && hyp_fail == 0;
  return r;
}

}  // namespace malab
