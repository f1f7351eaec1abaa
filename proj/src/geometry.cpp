#include "malab/geometry.hpp"

#include "malab/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

namespace malab {

double DomainSpec::rho(const Point& p) const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * (p[2 * i] * p[2 * i] + p[2 * i + 1] * p[2 * i + 1]);
  return scale * (s - radius * radius);
}

double DomainSpec::extent() const {
  double amin = a[0];
  if (n == 2) amin = std::min(amin, a[1]);
  return radius / std::sqrt(amin);
}

double DomainSpec::inradius() const {
  double amax = a[0];
  if (n == 2) amax = std::max(amax, a[1]);
  return radius / std::sqrt(amax);
}

DomainSpec disc(double radius) {
  DomainSpec s;
  s.n = 1;
  s.radius = radius;
  return s;
}

DomainSpec unit_ball(int n) {
  DomainSpec s;
  s.n = n;
  return s;
}

DomainSpec ellipsoid(double a1, double a2) {
  DomainSpec s;
  s.shape = "ellipsoid";
  s.n = 2;
  s.a = {a1, a2};
  return s;
}

namespace {

// Smallest t > 0 with rho(x + t w) = 0 for quadratic rho and rho(x) < 0. Exceeds 1 when the
// neighbour was reclassified as exterior while still inside the zero set.
double crossing_fraction(const DomainSpec& s, const Point& x, const Point& w) {
  double qa = 0.0, qb = 0.0;
  for (int k = 0; k < 2 * s.n; ++k) {
    const double c = s.a[k / 2];
    qa += c * w[k] * w[k];
    qb += 2.0 * c * x[k] * w[k];
  }
  qa *= s.scale;
  qb *= s.scale;
  const double qc = s.rho(x);
  const double disc = std::sqrt(std::max(qb * qb - 4.0 * qa * qc, 0.0));
  const double t = qb > 0.0 ? -2.0 * qc / (qb + disc) : (-qb + disc) / (2.0 * qa);
  return std::clamp(t, 1e-12, 2.0);
}

}  // namespace

GridDomain::GridDomain(DomainSpec spec, Lattice lattice)
    : spec_(std::move(spec)), lat_(std::move(lattice)) {
  if (spec_.n != lat_.n) throw Error("domain: dimension mismatch between spec and lattice");
  classify();
  find_crossings();
  // Nodes hugging the boundary are moved outside so every cut arm keeps theta >= kMinArmFraction.
  for (;;) {
    std::vector<std::size_t> drop;
    for (const auto& c : crossings_)
      if (c.theta < kMinArmFraction) drop.push_back(c.node);
    if (drop.empty()) break;
    for (auto i : drop) interior_[i] = 0;
    std::erase_if(interior_nodes_, [&](std::size_t i) { return !interior_[i]; });
    crossings_.clear();
    cuts_.clear();
    boundary_nodes_.clear();
    find_crossings();
  }
  min_rho_ = 0.0;
  for (auto i : interior_nodes_) min_rho_ = std::min(min_rho_, rho_[static_cast<Eigen::Index>(i)]);
  compute_distances();
}

void GridDomain::classify() {
  const std::size_t nn = lat_.size();
  rho_.resize(static_cast<Eigen::Index>(nn));
  interior_.assign(nn, 0);
  min_rho_ = 0.0;
  for (std::size_t i = 0; i < nn; ++i) {
    const double r = spec_.rho(lat_.coord(i));
    rho_[static_cast<Eigen::Index>(i)] = r;
    if (r < 0.0) {
      interior_[i] = 1;
      interior_nodes_.push_back(i);
      min_rho_ = std::min(min_rho_, r);
    }
  }
}

void GridDomain::find_crossings() {
  const auto& dirs = hessian_directions(lat_.n);
  cut_slot_.assign(lat_.size(), -1);
  for (std::size_t node : interior_nodes_) {
    ArmTable table;
    table.fill(-1);
    bool any = false;
    const Point x = lat_.coord(node);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      for (int sgn : {1, -1}) {
        const Offset v = sgn * dirs[k];
        if (!lat_.contains_shift(node, v))
          throw Error("domain: lattice padding too small for the stencil");
        const auto nb = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + lat_.offset_of(v));
        if (interior_[nb]) continue;
        const Point w = v.cast<double>() * lat_.h;
        Crossing c;
        c.theta = crossing_fraction(spec_, x, w);
        c.x = x + c.theta * w;
        c.node = node;
        c.direction = static_cast<int>(k);
        c.sign = sgn;
        table[2 * k + (sgn < 0 ? 1 : 0)] = static_cast<std::int32_t>(crossings_.size());
        crossings_.push_back(c);
        any = true;
      }
    }
    if (any) {
      cut_slot_[node] = static_cast<std::int32_t>(cuts_.size());
      cuts_.push_back(table);
      boundary_nodes_.push_back(node);
    }
  }
}

// Nearest crossing by vector propagation: every node inherits the best crossing
// among those of its lattice neighbours (Dijkstra order on the true distance).
void GridDomain::compute_distances() {
  dist_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lat_.size()));
  nearest_.assign(lat_.size(), -1);
  if (crossings_.empty()) return;
  const int dim = lat_.dim();
  std::vector<std::ptrdiff_t> nbrs;
  std::vector<Offset> nbr_off;
  for (int code = 0; code < (dim == 2 ? 9 : 81); ++code) {
    Offset o = Offset::Zero();
    int c = code;
    for (int k = 0; k < dim; ++k) {
      o[k] = c % 3 - 1;
      c /= 3;
    }
    if (o.isZero()) continue;
    nbr_off.push_back(o);
    nbrs.push_back(lat_.offset_of(o));
  }
  std::vector<double> best(lat_.size(), std::numeric_limits<double>::infinity());
  using Item = std::tuple<double, std::int32_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  auto offer = [&](std::size_t node, const Point& y, std::int32_t c) {
    const double d2 = (crossings_[static_cast<std::size_t>(c)].x - y).head(dim).squaredNorm();
    if (d2 < best[node] || (d2 == best[node] && c < nearest_[node])) {
      best[node] = d2;
      nearest_[node] = c;
      pq.emplace(d2, c, node);
    }
  };
  for (std::size_t c = 0; c < crossings_.size(); ++c) offer(crossings_[c].node, lat_.coord(crossings_[c].node), static_cast<std::int32_t>(c));
  while (!pq.empty()) {
    const auto [d2, c, node] = pq.top();
    pq.pop();
    if (d2 != best[node] || c != nearest_[node]) continue;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (!lat_.contains_shift(node, nbr_off[k])) continue;
      const auto nb = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + nbrs[k]);
      if (!interior_[nb]) continue;
      const Point y = lat_.coord(nb);
      // siblings: the other crossings cut from the same node
      for (auto id : cuts_[static_cast<std::size_t>(cut_slot_[crossings_[static_cast<std::size_t>(c)].node])])
        if (id >= 0) offer(nb, y, id);
    }
  }
  for (std::size_t node : interior_nodes_) dist_[static_cast<Eigen::Index>(node)] = std::sqrt(best[node]);
}

DomainPtr build_domain(const DomainSpec& spec, const Lattice& lattice, double psd_tol) {
  if (spec.shape != "ball" && spec.shape != "ellipsoid")
    throw Error("domain: unknown catalog shape '" + spec.shape + "'");
  if (spec.n < 1 || spec.n > 2) throw Error("domain: n must be 1 or 2");
  for (int i = 0; i < spec.n; ++i)
    if (spec.a[i] < 1.0) throw PsdViolation("domain: ellipsoid coefficients must be >= 1");
  if (spec.scale < 1.0) throw PsdViolation("domain: rho scale below 1 breaks dd^c rho >= beta");
  if (!(spec.radius > 0.0)) throw Error("domain: radius must be positive");

  auto d = std::make_shared<GridDomain>(spec, lattice);
  if (d->interior_nodes().empty()) throw EmptyInterior("domain: no interior nodes");
  if (d->boundary_nodes().empty()) throw EmptyInterior("domain: no boundary nodes");

  Eigen::VectorXd trace(static_cast<Eigen::Index>(d->crossings().size()));
  for (std::size_t c = 0; c < d->crossings().size(); ++c)
    trace[static_cast<Eigen::Index>(c)] = spec.rho(d->crossings()[c].x);

  // Cut arms with tiny theta amplify rounding by 1/theta; scale the tolerance accordingly.
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t node : d->interior_nodes()) {
    const CHessian hm = complex_hessian(*d, d->rho(), trace, node);
    double tmin = 1.0;
    if (const auto* arms = d->arms(node))
      for (auto id : *arms)
        if (id >= 0) tmin = std::min(tmin, d->crossings()[static_cast<std::size_t>(id)].theta);
    const double lm = lambda_min(hm, spec.n) - 1.0;
    const double tol = psd_tol + 64.0 * std::numeric_limits<double>::epsilon() *
                                     std::abs(d->min_rho()) / (lattice.h * lattice.h * tmin);
    if (lm < -tol)
      throw PsdViolation("domain: dd^c rho >= beta fails at node " + std::to_string(node) +
                         " (margin " + std::to_string(lm) + ")");
    margin = std::min(margin, lm);
  }
  d->psd_margin_ = margin;
  return d;
}

DomainPtr build_domain(const DomainSpec& spec, int resolution, int pad) {
  if (resolution < 16) throw Error("domain: resolution must be at least 16 nodes per axis");
  return build_domain(spec, Lattice::covering(spec.n, spec.extent(), resolution, pad));
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

bool RegionMask::subset_of(const RegionMask& other) const {
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && !other.mask[i]) return false;
  return true;
}

std::vector<std::size_t> RegionMask::nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

RegionMask full_interior(const DomainPtr& d) {
  return RegionMask{d, d->interior_mask(), RegionKind::InteriorShrink};
}

RegionMask shrink(const DomainPtr& d, double delta) {
  if (delta < 0.0) throw Error("shrink: delta must be nonnegative");
  RegionMask r{d, std::vector<std::uint8_t>(d->lattice().size(), 0), RegionKind::InteriorShrink};
  for (std::size_t i : d->interior_nodes())
    if (d->dist(i) > delta) r.mask[i] = 1;
  return r;
}

RegionMask rho_sublevel(const DomainPtr& d, double eps) {
  if (!(eps > 0.0)) throw Error("rho_sublevel: eps must be positive");
  RegionMask r{d, std::vector<std::uint8_t>(d->lattice().size(), 0), RegionKind::RhoSublevel};
  for (std::size_t i : d->interior_nodes())
    if (d->rho()[static_cast<Eigen::Index>(i)] < -eps) r.mask[i] = 1;
  return r;
}

RegionMask ball_region(const DomainPtr& d, const Point& center, double r) {
  RegionMask k{d, std::vector<std::uint8_t>(d->lattice().size(), 0), RegionKind::CompactK};
  for (std::size_t i : d->interior_nodes())
    if ((d->lattice().coord(i) - center).norm() <= r) k.mask[i] = 1;
  return k;
}

RegionMask region_union(const RegionMask& a, const RegionMask& b) {
  RegionMask r = a;
  for (std::size_t i = 0; i < r.mask.size(); ++i) r.mask[i] = a.mask[i] | b.mask[i];
  return r;
}

RegionMask cell_closure(const RegionMask& k) {
  const Lattice& lat = k.domain->lattice();
  RegionMask r = k;
  for (int ax = 0; ax < lat.dim(); ++ax) {
    const std::ptrdiff_t st = lat.stride(ax);
    std::vector<std::uint8_t> next = r.mask;
    for (std::size_t i = 0; i < lat.size(); ++i) {
      if (!r.mask[i]) continue;
      const int c = lat.multi(i)[ax];
      if (c > 0) next[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) - st)] = 1;
      if (c < lat.m - 1) next[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + st)] = 1;
    }
    r.mask = std::move(next);
  }
  for (std::size_t i = 0; i < r.mask.size(); ++i) r.mask[i] = r.mask[i] && k.domain->interior(i);
  return r;
}

bool compactly_inside(const RegionMask& k) {
  for (std::size_t i = 0; i < k.mask.size(); ++i)
    if (k.mask[i] && (!k.domain->interior(i) || k.domain->arms(i) != nullptr)) return false;
  return true;
}

double hopf_constant(const GridDomain& d) {
  double c0 = 1.0;
  for (std::size_t i : d.interior_nodes()) {
    const double dist = d.dist(i);
    if (dist <= 0.0) continue;
    c0 = std::min(c0, std::abs(d.rho()[static_cast<Eigen::Index>(i)]) / dist);
  }
  return c0;
}

}  // namespace malab
