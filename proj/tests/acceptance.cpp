// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--only N] [--golden DIR]

#include "malab/capacity.hpp"
#include "malab/catalog.hpp"
#include "malab/lab.hpp"
#include "malab/parallel.hpp"
#include "malab/psh.hpp"
#include "malab/radial.hpp"
#include "malab/scenario.hpp"
#include "malab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

using namespace malab;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Field zero_field() {
  return [](const Point&) { return 0.0; };
}

// Radial oracle for Lap u = 4 on the unit disc, u(1) = 0: u'(r) = (1/r) int_0^r 4 s ds and
// u(r) = -int_r^1 u', both by the trapezoid rule on a 20001-point radial table.
struct RadialPoissonOracle {
  static constexpr int kPoints = 20001;
  std::vector<double> u;
  RadialPoissonOracle() : u(kPoints, 0.0) {
    const double dr = 1.0 / (kPoints - 1);
    std::vector<double> du(kPoints, 0.0);
    double mass = 0.0;  // int_0^r 4 s ds
    for (int i = 1; i < kPoints; ++i) {
      mass += 0.5 * dr * (4.0 * (i - 1) * dr + 4.0 * i * dr);
      du[i] = mass / (i * dr);
    }
    for (int i = kPoints - 2; i >= 0; --i) u[i] = u[i + 1] - 0.5 * dr * (du[i] + du[i + 1]);
  }
  double operator()(double r) const {
    const double x = std::min(r, 1.0) * (kPoints - 1);
    const int i = std::min(static_cast<int>(x), kPoints - 2);
    return u[i] + (x - i) * (u[i + 1] - u[i]);
  }
};

// Outward flux 2 pi r h'(r) of the radial extremal log(r) / log(1/r0), by central difference.
double capacity_flux_oracle(double r0) {
  const auto h = [&](double r) { return std::log(r) / std::log(1.0 / r0); };
  const double r = 0.5 * (1.0 + r0);
  return 2.0 * pi * r * (h(r + 1e-5) - h(r - 1e-5)) / 2e-5;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  const DomainPtr d = build_domain(disc(), 256);
  const SolveReport r = solve_dirichlet({d, lebesgue_density(d, 4.0), zero_field(), std::nullopt});
  const double t = seconds_since(t0);
  const RadialPoissonOracle oracle;
  double err = 0.0;
  for (std::size_t i : d->interior_nodes())
    err = std::max(err, std::abs(r.u[i] - oracle(d->lattice().coord(i).head(2).norm())));
  return {r.converged && err <= 10.0 * d->h() && t <= 60.0,
          fmt("sup error %.3g <= 10h = %.3g, solve %.1f s", err, 10.0 * d->h(), t)};
}

Outcome criterion2() {
  const DomainPtr d = build_domain(disc(), 256);
  bool ok = true;
  double prev = 0.0;
  std::string detail;
  for (double r : {0.2, 0.3, 0.5}) {
    const CapacityResult c = capacity(ball_region(d, Point::Zero(), r));
    const double exact = capacity_flux_oracle(r);
    const double rel = c.value / exact - 1.0;
    ok = ok && c.converged && std::abs(rel) <= 0.05 && c.value > prev;
    prev = c.value;
    detail += fmt("r=%.1f: %+.2f%% ", r, 100.0 * rel);
  }
  return {ok, detail + "(monotone, band 5%)"};
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  const DomainPtr d = build_domain(unit_ball(2), 20);
  std::vector<double> x;
  std::vector<double> y;
  bool conv = true;
  for (double r : {0.2, 0.3, 0.4, 0.5}) {
    const CapacityResult c = capacity(ball_region(d, Point::Zero(), r));
    conv = conv && c.converged;
    x.push_back(std::log(1.0 / r));
    y.push_back(c.value);
  }
  const LineFit f = fit_loglog(x, y);
  const double t = seconds_since(t0);
  return {conv && std::abs(f.slope + 2.0) <= 0.2 && t <= 600.0, fmt("slope %.4f (target -2 +- 0.2), %.1f s", f.slope, t)};
}

Outcome criterion4() {
  bool ok = true;
  std::string detail;
  for (int n : {1, 2}) {
    const DomainPtr d = build_domain(unit_ball(n), n == 1 ? 64 : 20);
    for (int which : {0, 1}) {
      const InequalityReport r = which == 0 ? blocki_suite(d, 100, 2024) : cegrell_suite(d, 100, 2024);
      ok = ok && r.pass && r.violations == 0 && r.points.size() == 100;
      detail += fmt("%s n=%d: %zu/%zu ok; ", which == 0 ? "blocki" : "cegrell", n, r.points.size() - r.violations,
                    r.points.size());
    }
  }
  return {ok, detail + "tolerance 10 h scale"};
}

Outcome criterion5() {
  FieldSpec hs;
  hs.name = "holder";
  hs.alpha = 0.5;
  const DomainPtr d = build_domain(disc(), 256);
  const GridFunction phi = sample(d, make_subsolution(hs, disc()).f);
  std::vector<RegionMask> fam;
  for (double r : {0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5}) fam.push_back(ball_region(d, Point::Zero(), r));
  const InequalityReport r = volume_capacity_scan(ma_measure(phi), fam);
  const double a0 = r.constant("alpha0");
  return {r.pass && a0 > 0.0 && r.strict_violations == 0,
          fmt("alpha0 %.4g, C %.4g, %zu points, one-sided violations %zu", a0, r.constant("C"), r.points.size(),
              r.strict_violations)};
}

Outcome criterion6() {
  const std::vector<double> s{0.125, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const double c = 1.0 / (2.0 * pi);
  struct Pair {
    const char* name;
    RadialProfile v;
    RadialProfile phi;
  };
  const Pair pairs[] = {{"log_pole/quad", radial_log_pole(c, 8.0), radial_quad()},
                        {"log_pole/holder", radial_log_pole(0.5 * c, 12.0), radial_holder(0.5)}};
  bool ok = true;
  std::string detail;
  for (const auto& p : pairs)
    for (int n : {1, 2}) {
      const InequalityReport r = sublevel_decay_radial(n, p.v, p.phi, s);
      const double pe = r.constant("poly_exponent");
      const double tau = r.has_constant("tau") ? r.constant("tau") : 0.0;
      ok = ok && pe <= -n + 0.3 && tau > 0.0;
      detail += fmt("%s n=%d: exponent %.3f, tau %.3f; ", p.name, n, pe, tau);
    }
  return {ok, detail};
}

Outcome criterion7() {
  FieldSpec quad;
  FieldSpec hold;
  hold.name = "holder";
  hold.alpha = 0.5;
  FieldSpec mix;
  mix.name = "max";
  mix.parts = {quad, hold};
  mix.parts[1].weight = 0.5;
  bool ok = true;
  std::string detail;
  int count = 0;
  double worst = 0.0;
  for (int n : {1, 2})
    for (const FieldSpec& f : {quad, hold, mix}) {
      const DomainPtr d = build_domain(unit_ball(n), n == 1 ? 256 : 20);
      const GridFunction phi = sample(d, make_subsolution(f, unit_ball(n)).f);
      for (const GridMeasure& mu : {scheme_measure(phi), 0.5 * scheme_measure(phi)}) {
        const SolveReport r = solve_dirichlet({d, mu, zero_field(), phi});
        ok = ok && r.converged && r.sandwich_checked && r.sandwich_ok && r.sandwich_violation <= 10.0 * d->h();
        worst = std::max(worst, r.sandwich_violation / d->h());
        ++count;
      }
    }
  detail = fmt("%d solves (quad, holder 1/2, max; n = 1, 2), worst violation %.3g h", count, worst);
  return {ok, detail};
}

struct HeadlineRuns {
  HolderReport quad;
  HolderReport holder;
};

const HeadlineRuns& headline() {
  static const HeadlineRuns runs = [] {
    HeadlineRuns h;
    TheoremBInput in;
    in.domain = disc();
    in.phi = make_subsolution({}, disc());
    in.psi = make_boundary_data({"zero"}, disc());
    h.quad = theorem_b_pipeline(in);
    FieldSpec hs;
    hs.name = "holder";
    hs.alpha = 0.5;
    in.phi = make_subsolution(hs, disc());
    h.holder = theorem_b_pipeline(in);
    return h;
  }();
  return runs;
}

Outcome criterion8() {
  const HolderReport& r = headline().quad;
  return {r.lap_ok && r.rows.size() == 5 && r.lap_fit.slope >= 0.9,
          fmt("L1 gap slope %.4f over %zu deltas (>= 0.9), %d lattice nodes per axis", r.lap_fit.slope, r.rows.size(),
              r.u.lattice().m)};
}

Outcome criterion9() {
  const HolderReport& q = headline().quad;
  const HolderReport& h = headline().holder;
  const bool quad_ok = q.converged && q.empirical_exponent >= q.alpha4;
  const bool hold_ok = h.converged && h.empirical_exponent > 0.0 && h.gluing_ok && h.coupling_ok && h.collar_bound_ok;
  return {quad_ok && hold_ok,
          fmt("quad: exponent %.4f >= alpha4 %.4f (alpha2 %.4f, alpha3 %.4f); holder: exponent %.4f, gluing %d, "
              "coupling %d, collar bound %d",
              q.empirical_exponent, q.alpha4, q.alpha2, q.alpha3, h.empirical_exponent, h.gluing_ok, h.coupling_ok,
              h.collar_bound_ok)};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome criterion10(const fs::path& golden) {
  const int max_threads = std::max(4, static_cast<int>(std::thread::hardware_concurrency()));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(golden))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  const fs::path root = fs::temp_directory_path() / "malab-acceptance";
  std::size_t compared = 0;
  std::size_t differing = 0;
  for (const auto& f : files) {
    Scenario s = load_scenario(f);
    std::vector<fs::path> dirs;
    for (int threads : {1, max_threads}) {
      set_thread_count(threads);
      s.output_dir = (root / std::to_string(threads)).string();
      fs::remove_all(fs::path(s.output_dir) / s.name);
      run_scenario(s);
      dirs.push_back(fs::path(s.output_dir) / s.name);
    }
    for (const auto& e : fs::directory_iterator(golden / s.name)) {
      const auto ext = e.path().extension();
      if (ext != ".csv" && ext != ".json") continue;
      const std::string want = slurp(e.path());
      for (const auto& d : dirs) {
        ++compared;
        if (slurp(d / e.path().filename()) != want) ++differing;
      }
    }
  }
  set_thread_count(0);
  return {!files.empty() && compared > 0 && differing == 0,
          fmt("%zu scenarios, %zu CSV/JSON comparisons against golden at threads {1, %d}, %zu differ", files.size(),
              compared, max_threads, differing)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  fs::path golden = MALAB_GOLDEN_DIR;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
    if (!std::strcmp(argv[i], "--golden") && i + 1 < argc) golden = argv[++i];
  }
  const std::function<Outcome()> criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                               criterion6, criterion7, criterion8, criterion9,
                                               [&] { return criterion10(golden); }};
  int failed = 0;
  for (int k = 1; k <= 10; ++k) {
    if (only && k != only) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d: %s  %s [%.1f s]\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
