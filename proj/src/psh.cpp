#include "malab/psh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

namespace malab {

double default_psh_tolerance(const GridDomain& d) { return 10.0 * d.h(); }

PshCheck check_psh(const GridFunction& f, double tol, const RegionMask* region) {
  const GridDomain& d = *f.domain;
  PshCheck c;
  c.worst_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t i : d.interior_nodes()) {
    if (region && !region->contains(i)) continue;
    const double lm = lambda_min(complex_hessian(d, f.values, f.trace, i), d.n());
    if (lm < c.worst_eigenvalue) {
      c.worst_eigenvalue = lm;
      c.worst_node = i;
    }
    if (lm < -tol) ++c.violations;
  }
  c.ok = c.violations == 0;
  return c;
}

PshCheck check_psh(const GridFunction& f) { return check_psh(f, default_psh_tolerance(*f.domain)); }

std::vector<CHessian> hessian_field(const GridFunction& f) {
  const GridDomain& d = *f.domain;
  std::vector<CHessian> out(d.lattice().size(), CHessian::Zero());
  for (std::size_t i : d.interior_nodes()) out[i] = complex_hessian(d, f.values, f.trace, i);
  return out;
}

namespace {

// Forward pair sums along every axis: entry i becomes the sum over the lattice cell
// whose lowest corner is i (valid for cells inside the lattice).
void cell_sums(Eigen::MatrixXd& x, const Lattice& lat) {
  for (int k = 0; k < lat.dim(); ++k) {
    const std::ptrdiff_t st = lat.stride(k);
    for (std::size_t i = 0; i < lat.size(); ++i)
      if (lat.multi(i)[k] < lat.m - 1) x.col(static_cast<Eigen::Index>(i)) += x.col(static_cast<Eigen::Index>(i) + st);
  }
}

// Adjoint of cell_sums: every node collects the values of the cells it is a corner of.
void corner_gather(Eigen::VectorXd& y, const Lattice& lat) {
  for (int k = 0; k < lat.dim(); ++k) {
    const std::ptrdiff_t st = lat.stride(k);
    for (std::size_t i = lat.size(); i-- > 0;)
      if (lat.multi(i)[k] > 0) y[static_cast<Eigen::Index>(i)] += y[static_cast<Eigen::Index>(i) - st];
  }
}

bool cell_inside(const Lattice& lat, std::size_t i) {
  const auto mi = lat.multi(i);
  for (int k = 0; k < lat.dim(); ++k)
    if (mi[k] >= lat.m - 1) return false;
  return true;
}

void pack(Eigen::MatrixXd& x, std::size_t col, const CHessian& hm, int n) {
  const auto c = static_cast<Eigen::Index>(col);
  x(0, c) = hm(0, 0).real();
  if (n == 2) {
    x(1, c) = hm(1, 1).real();
    x(2, c) = hm(0, 1).real();
    x(3, c) = hm(0, 1).imag();
  }
}

CHessian unpack(const Eigen::MatrixXd& x, Eigen::Index c, int n, double scale) {
  CHessian hm = CHessian::Zero();
  hm(0, 0) = x(0, c) * scale;
  if (n == 2) {
    hm(1, 1) = x(1, c) * scale;
    hm(0, 1) = std::complex<double>(x(2, c), x(3, c)) * scale;
    hm(1, 0) = std::conj(hm(0, 1));
  }
  return hm;
}

void require_psh(const CHessian& hm, int n, double tol, std::size_t node, const char* who) {
  const double lm = lambda_min(hm, n);
  if (lm < -tol)
    throw NotPsh(std::string(who) + ": field is not discretely PSH at node " + std::to_string(node) +
                     " (lambda_min " + std::to_string(lm) + ")",
                 node, lm);
}

// Cell-averaged weights: every lattice cell averages the complex Hessians of its interior
// corners, evaluates `form` on the averages, and hands the resulting mass
//   c_n h^{2n} (interior corners / 2^{2n}) form(...)
// back to its interior corners in equal shares.
template <class Form>
Eigen::VectorXd cell_averaged(std::span<const GridFunction> fns, bool check, const char* who, Form form) {
  const GridDomain& d = *fns[0].domain;
  const Lattice& lat = d.lattice();
  const int n = d.n();
  const int comps = n == 1 ? 1 : 4;
  const double tol = default_psh_tolerance(d);
  const auto cols = static_cast<Eigen::Index>(lat.size());
  std::vector<Eigen::MatrixXd> sums;
  for (const auto& f : fns) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(comps, cols);
    for (std::size_t i : d.interior_nodes()) {
      const CHessian hm = complex_hessian(d, f.values, f.trace, i);
      if (check) require_psh(hm, n, tol, i, who);
      pack(x, i, hm, n);
    }
    cell_sums(x, lat);
    sums.push_back(std::move(x));
  }
  Eigen::MatrixXd cnt = Eigen::MatrixXd::Zero(1, cols);
  for (std::size_t i : d.interior_nodes()) cnt(0, static_cast<Eigen::Index>(i)) = 1.0;
  cell_sums(cnt, lat);

  const double scale = ma_constant(n) * lat.cell_volume();
  const double corners = std::ldexp(1.0, lat.dim());
  Eigen::VectorXd share = Eigen::VectorXd::Zero(cols);
  std::array<CHessian, 2> hs{CHessian::Identity(), CHessian::Identity()};
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double k = cnt(0, c);
    if (k <= 0.0 || !cell_inside(lat, static_cast<std::size_t>(c))) continue;
    for (std::size_t j = 0; j < sums.size(); ++j) hs[j] = unpack(sums[j], c, n, 1.0 / k);
    const double mass = scale * (k / corners) * form(std::span<const CHessian>(hs.data(), sums.size()), n);
    share[c] = mass / k;
  }
  corner_gather(share, lat);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(cols);
  for (std::size_t i : d.interior_nodes()) w[static_cast<Eigen::Index>(i)] = share[static_cast<Eigen::Index>(i)];
  return w;
}

GridMeasure ma_impl(const GridFunction& f, bool check) {
  const auto w = cell_averaged(std::span<const GridFunction>(&f, 1), check, "ma_measure",
                               [](std::span<const CHessian> hs, int n) { return projected_det(hs[0], n); });
  return GridMeasure(f.domain, w);
}

}  // namespace

GridMeasure ma_measure(const GridFunction& f) { return ma_impl(f, true); }
GridMeasure ma_measure_unchecked(const GridFunction& f) { return ma_impl(f, false); }

Eigen::VectorXd scheme_weights(const GridFunction& f) {
  const GridDomain& d = *f.domain;
  const double scale = ma_constant(d.n()) * d.lattice().cell_volume();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.lattice().size()));
  for (std::size_t i : d.interior_nodes())
    w[static_cast<Eigen::Index>(i)] = scale * projected_det(complex_hessian(d, f.values, f.trace, i), d.n());
  return w;
}

GridMeasure scheme_measure(const GridFunction& f) { return GridMeasure(f.domain, scheme_weights(f)); }

namespace {

void check_mixed_args(std::span<const GridFunction> fns) {
  if (fns.empty()) throw Error("mixed_mass: need at least one function");
  const DomainPtr& dp = fns[0].domain;
  if (static_cast<int>(fns.size()) > dp->n()) throw Error("mixed_mass: more functions than the dimension");
  for (const auto& f : fns)
    if (f.domain != dp) throw Error("mixed_mass: functions on different domains");
}

// D(H_1, ..., H_k, I, ..., I)
double mixed_form(std::span<const CHessian> hs, int n, bool project) {
  std::array<CHessian, 2> m{CHessian::Identity(), CHessian::Identity()};
  for (std::size_t j = 0; j < hs.size(); ++j) m[j] = project ? psd_project(hs[j], n) : hs[j];
  return mixed_discriminant(std::span<const CHessian>(m.data(), 2), n);
}

}  // namespace

GridMeasure mixed_measure(std::span<const GridFunction> fns, bool check_psh_input) {
  check_mixed_args(fns);
  Eigen::VectorXd w = cell_averaged(fns, check_psh_input, "mixed_mass", [](std::span<const CHessian> hs, int n) {
    return mixed_form(hs, n, true);
  });
  // mixed discriminants of PSD matrices are nonnegative; clip rounding
  w = w.cwiseMax(0.0);
  return GridMeasure(fns[0].domain, std::move(w));
}

double mixed_mass(std::span<const GridFunction> fns, const RegionMask& region) {
  return mixed_measure(fns).on(region);
}

Eigen::VectorXd signed_mixed_weights(std::span<const GridFunction> fns) {
  check_mixed_args(fns);
  return cell_averaged(fns, false, "mixed_mass", [](std::span<const CHessian> hs, int n) {
    return mixed_form(hs, n, false);
  });
}

DominationReport dominated_by(const GridMeasure& mu, const GridFunction& f, double eps_dom) {
  if (mu.domain != f.domain) throw Error("dominated_by: measure and function on different domains");
  const GridMeasure ma = ma_measure_unchecked(f);
  if (eps_dom < 0.0) eps_dom = 1e-12 * std::max(1.0, ma.weights.cwiseAbs().maxCoeff());
  DominationReport r;
  r.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i : f.domain->interior_nodes()) {
    const auto k = static_cast<Eigen::Index>(i);
    const double ex = mu.weights[k] - ma.weights[k];
    if (ex > r.worst_excess) {
      r.worst_excess = ex;
      r.worst_node = i;
    }
  }
  r.dominated = r.worst_excess <= eps_dom;
  return r;
}

namespace {

struct LineOffset {
  Offset o;
  int half = 0;
};

// Offsets (o_1, ..., o_{D-1}) of the lattice ball of radius R (in units of h), with
// the half-width of the ball's chord along axis 0.
std::vector<LineOffset> ball_chords(const Lattice& lat, double radius_h) {
  const int d = lat.dim();
  const int r = static_cast<int>(std::floor(radius_h + 1e-9));
  const double r2 = radius_h * radius_h + 1e-9;
  std::vector<LineOffset> out;
  Offset o = Offset::Zero();
  std::function<void(int, double)> rec = [&](int axis, double acc) {
    if (axis == d) {
      LineOffset lo;
      lo.o = o;
      lo.half = static_cast<int>(std::floor(std::sqrt(std::max(r2 - acc, 0.0))));
      out.push_back(lo);
      return;
    }
    for (int k = -r; k <= r; ++k) {
      const double a = acc + double(k) * k;
      if (a > r2) continue;
      o[axis] = k;
      rec(axis + 1, a);
    }
    o[axis] = 0;
  };
  rec(1, 0.0);
  return out;
}

bool shifted_line_inside(const Lattice& lat, const std::array<int, 4>& mi, const Offset& o) {
  for (int k = 1; k < lat.dim(); ++k) {
    const int j = mi[k] + o[k];
    if (j < 0 || j >= lat.m) return false;
  }
  return true;
}

enum class BallOp { Max, Sum };

// For every node in the region, reduces u over the lattice ball of radius R h.
Eigen::VectorXd ball_reduce(const GridFunction& u, const RegionMask& region, double radius_h, BallOp op) {
  const Lattice& lat = u.lattice();
  const int m = lat.m;
  const auto chords = ball_chords(lat, radius_h);
  Eigen::VectorXd out = u.values;
  const std::size_t lines = lat.size() / static_cast<std::size_t>(m);
  std::vector<double> acc(static_cast<std::size_t>(m)), win(static_cast<std::size_t>(m)),
      prefix(static_cast<std::size_t>(m) + 1);
  std::vector<int> rows;
  std::deque<int> dq;
  for (std::size_t line = 0; line < lines; ++line) {
    const std::size_t base = line * static_cast<std::size_t>(m);
    rows.clear();
    for (int i = 0; i < m; ++i)
      if (region.mask[base + static_cast<std::size_t>(i)]) rows.push_back(i);
    if (rows.empty()) continue;
    const auto mi = lat.multi(base);
    std::fill(acc.begin(), acc.end(), op == BallOp::Max ? -std::numeric_limits<double>::infinity() : 0.0);
    for (const auto& ch : chords) {
      if (!shifted_line_inside(lat, mi, ch.o)) throw Error("ball operation: ball leaves the lattice");
      const auto src = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(base) + lat.offset_of(ch.o));
      const double* s = u.values.data() + src;
      const int w = ch.half;
      if (op == BallOp::Sum) {
        prefix[0] = 0.0;
        for (int i = 0; i < m; ++i) prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + s[i];
        for (int i : rows) {
          const int lo = std::max(i - w, 0), hi = std::min(i + w, m - 1);
          acc[static_cast<std::size_t>(i)] += prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)];
        }
      } else {
        dq.clear();
        // sliding maximum, window [i - w, i + w]
        int next = 0;
        for (int i = 0; i < m; ++i) {
          const int hi = std::min(i + w, m - 1);
          while (next <= hi) {
            while (!dq.empty() && s[dq.back()] <= s[next]) dq.pop_back();
            dq.push_back(next++);
          }
          while (dq.front() < i - w) dq.pop_front();
          win[static_cast<std::size_t>(i)] = s[dq.front()];
        }
        for (int i : rows) acc[static_cast<std::size_t>(i)] = std::max(acc[static_cast<std::size_t>(i)], win[static_cast<std::size_t>(i)]);
      }
    }
    for (int i : rows) out[static_cast<Eigen::Index>(base + static_cast<std::size_t>(i))] = acc[static_cast<std::size_t>(i)];
  }
  return out;
}

void check_ball_radius(const GridFunction& u, double delta) {
  if (delta < 0.0) throw Error("ball operation: delta must be nonnegative");
  if (delta >= u.domain->inradius()) throw Error("ball operation: delta exceeds the inradius");
}

}  // namespace

std::size_t ball_offset_count(const Lattice& lat, double delta) {
  std::size_t c = 0;
  for (const auto& ch : ball_chords(lat, delta / lat.h)) c += static_cast<std::size_t>(2 * ch.half + 1);
  return c;
}

RegionalFunction sup_convolution(const GridFunction& u, double delta) {
  check_ball_radius(u, delta);
  RegionMask region = shrink(u.domain, delta);
  if (delta == 0.0) return {u, region};
  Eigen::VectorXd v = ball_reduce(u, region, delta / u.lattice().h, BallOp::Max);
  return {GridFunction(u.domain, std::move(v), u.trace), std::move(region)};
}

RegionalFunction ball_average(const GridFunction& u, double delta) {
  check_ball_radius(u, delta);
  RegionMask region = shrink(u.domain, delta);
  if (delta == 0.0) return {u, region};
  Eigen::VectorXd v = ball_reduce(u, region, delta / u.lattice().h, BallOp::Sum);
  const double count = static_cast<double>(ball_offset_count(u.lattice(), delta));
  for (std::size_t i = 0; i < region.mask.size(); ++i)
    if (region.mask[i]) v[static_cast<Eigen::Index>(i)] /= count;
  return {GridFunction(u.domain, std::move(v), u.trace), std::move(region)};
}

double mollifier_profile(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

MollifyResult mollify(const GridFunction& phi, double t, double alpha) {
  const Lattice& lat = phi.lattice();
  const GridDomain& d = *phi.domain;
  if (!(t >= lat.h)) throw Error("mollify: t must be at least one grid spacing");
  const double rh = t / lat.h;
  const int r = static_cast<int>(std::ceil(rh));
  // nodes whose kernel support stays on the lattice
  auto fits = [&](std::size_t idx) {
    const auto mi = lat.multi(idx);
    for (int k = 0; k < lat.dim(); ++k)
      if (mi[k] < r || mi[k] > lat.m - 1 - r) return false;
    return true;
  };
  for (std::size_t i : d.interior_nodes())
    if (!fits(i)) throw Error("mollify: insufficient collar for t = " + std::to_string(t));
  for (const auto& c : d.crossings())
    if (!fits(c.node)) throw Error("mollify: insufficient collar for t = " + std::to_string(t));

  const auto chords = ball_chords(lat, rh);
  struct Kernel {
    Offset o;
    int half;
    std::vector<double> w;
  };
  std::vector<Kernel> ks;
  double mass = 0.0;
  for (const auto& ch : chords) {
    Kernel k{ch.o, ch.half, {}};
    const double o2 = ch.o.cast<double>().squaredNorm();
    for (int j = -ch.half; j <= ch.half; ++j) {
      const double w = mollifier_profile(std::sqrt(o2 + double(j) * j) / rh);
      k.w.push_back(w);
      mass += w;
    }
    ks.push_back(std::move(k));
  }
  for (auto& k : ks)
    for (auto& w : k.w) w /= mass;

  const int m = lat.m;
  Eigen::VectorXd out = phi.values;
  const std::size_t lines = lat.size() / static_cast<std::size_t>(m);
  std::vector<double> acc(static_cast<std::size_t>(m));
  for (std::size_t line = 0; line < lines; ++line) {
    const std::size_t base = line * static_cast<std::size_t>(m);
    if (!fits(base + static_cast<std::size_t>(r))) continue;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& k : ks) {
      const auto src = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(base) + lat.offset_of(k.o));
      const double* s = phi.values.data() + src;
      for (int i = r; i <= m - 1 - r; ++i) {
        double a = 0.0;
        for (int j = -k.half; j <= k.half; ++j) a += k.w[static_cast<std::size_t>(j + k.half)] * s[i + j];
        acc[static_cast<std::size_t>(i)] += a;
      }
    }
    for (int i = r; i <= m - 1 - r; ++i) out[static_cast<Eigen::Index>(base + static_cast<std::size_t>(i))] = acc[static_cast<std::size_t>(i)];
  }

  MollifyResult res;
  GridFunction tmp(phi.domain, out, phi.trace);
  res.f = with_interpolated_trace(phi.domain, tmp);
  const double sup_phi = std::max(phi.sup_norm(), 1e-300);
  for (std::size_t i : d.interior_nodes()) {
    const double diff = std::abs(res.f[i] - phi[i]);
    res.sup_difference = std::max(res.sup_difference, diff);
    const CHessian hm = complex_hessian(d, res.f.values, res.f.trace, i);
    res.second_derivative_constant = std::max(res.second_derivative_constant, hm.cwiseAbs().maxCoeff() * t * t / sup_phi);
  }
  res.holder_constant = res.sup_difference / std::pow(t, alpha);
  return res;
}

double subsolution_bound(const GridFunction& phi) { return 1.0 + phi.sup_norm(); }

GridFunction regularize_subsolution(const GridFunction& phi, double eps) {
  if (!(eps > 0.0)) throw Error("regularize_subsolution: eps must be positive");
  // Hoelder fields at rounding-level crossings give traces of order sqrt(1e-16)
  const double tol = 1e-6 * std::max(1.0, phi.sup_norm());
  if (phi.trace.size() && phi.trace.cwiseAbs().maxCoeff() > tol)
    throw Error("regularize_subsolution: subsolution does not vanish on the boundary");
  const double a = subsolution_bound(phi);
  const GridFunction rho = GridFunction(phi.domain, phi.domain->rho(), Eigen::VectorXd::Zero(phi.trace.size()));
  return max(phi + (-eps), (a / eps) * rho);
}

HolderSeminormResult holder_seminorm(const GridFunction& f, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("holder_seminorm: alpha must lie in (0, 1]");
  const GridDomain& d = *f.domain;
  const Lattice& lat = d.lattice();
  HolderSeminormResult res;
  res.alpha = alpha;
  auto consider = [&](double fa, double fb, const Point& a, const Point& b) {
    const double dist = (a - b).norm();
    if (dist <= 0.0) return;
    ++res.pairs;
    const double ratio = std::abs(fa - fb) / std::pow(dist, alpha);
    if (ratio > res.value) {
      res.value = ratio;
      res.witness_a = a;
      res.witness_b = b;
    }
  };

  // dyadic displacements along axes and diagonals
  std::vector<Offset> dirs;
  for (int i = 0; i < lat.dim(); ++i) {
    Offset e = Offset::Zero();
    e[i] = 1;
    dirs.push_back(e);
    for (int j = i + 1; j < lat.dim(); ++j) {
      Offset p = e, q = e;
      p[j] = 1;
      q[j] = -1;
      dirs.push_back(p);
      dirs.push_back(q);
    }
  }
  const double diam = 2.0 * d.spec().extent();
  for (std::size_t i : d.interior_nodes()) {
    const Point x = lat.coord(i);
    for (const auto& v : dirs) {
      for (int s = 1;; s *= 2) {
        const Offset w = s * v;
        if (w.cast<double>().norm() * lat.h > 0.25 * diam) break;
        if (!lat.contains_shift(i, w)) break;
        const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + lat.offset_of(w));
        if (!d.interior(j)) break;
        consider(f[i], f[j], x, lat.coord(j));
      }
    }
  }
  // node to boundary: cut arms and nearest crossing
  for (std::size_t c = 0; c < d.crossings().size(); ++c) {
    const auto& cr = d.crossings()[c];
    consider(f[cr.node], f.trace[static_cast<Eigen::Index>(c)], lat.coord(cr.node), cr.x);
  }
  for (std::size_t i : d.interior_nodes()) {
    const auto c = d.nearest_crossing(i);
    if (c >= 0) consider(f[i], f.trace[c], lat.coord(i), d.crossings()[static_cast<std::size_t>(c)].x);
  }
  // far pairs
  const auto& nodes = d.interior_nodes();
  std::mt19937_64 rng(0x5eed5eedULL);
  const std::size_t nc = d.crossings().size();
  const std::size_t pool = nodes.size() + nc;
  for (int k = 0; k < 20000; ++k) {
    const std::size_t a = rng() % pool, b = rng() % pool;
    auto pick = [&](std::size_t q, double& val, Point& pt) {
      if (q < nodes.size()) {
        val = f[nodes[q]];
        pt = lat.coord(nodes[q]);
      } else {
        val = f.trace[static_cast<Eigen::Index>(q - nodes.size())];
        pt = d.crossings()[q - nodes.size()].x;
      }
    };
    double va, vb;
    Point pa, pb;
    pick(a, va, pa);
    pick(b, vb, pb);
    consider(va, vb, pa, pb);
  }
  return res;
}

namespace {

E0Report membership(const GridFunction& v, double mass_bound) {
  E0Report r;
  const GridDomain& d = *v.domain;
  r.psh = check_psh(v).ok;
  r.nonpositive = v.interior_max() <= 1e-12 * std::max(1.0, v.sup_norm());
  r.zero_trace = v.trace.size() == 0 || v.trace.cwiseAbs().maxCoeff() <= d.h();
  r.mass = ma_measure_unchecked(v).total();
  r.mass_ok = r.mass <= mass_bound;
  std::vector<std::string> failed;
  if (!r.psh) failed.emplace_back("psh");
  if (!r.nonpositive) failed.emplace_back("nonpositive");
  if (!r.zero_trace) failed.emplace_back("zero_trace");
  if (!r.mass_ok) failed.emplace_back("mass");
  for (std::size_t i = 0; i < failed.size(); ++i) r.failed += (i ? "," : "") + failed[i];
  r.member = failed.empty();
  return r;
}

}  // namespace

E0Report is_in_E0_prime(const GridFunction& v, double mass_eps) { return membership(v, 1.0 + mass_eps); }

E0Report is_in_E0(const GridFunction& v) {
  return membership(v, std::numeric_limits<double>::infinity());
}

}  // namespace malab
