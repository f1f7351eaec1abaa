#include "malab/catalog.hpp"
#include "malab/parallel.hpp"
#include "malab/scenario.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace malab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "malab-unit" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("report_io") {

TEST_CASE("number format") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2.5e-7) == "-2.5e-07");
  CHECK(format_number(3.0) == "3");
}

TEST_CASE("inequality report csv layout") {
  InequalityReport r;
  r.id = "demo";
  r.parameter = "s";
  r.add_point(1.0, 0.5, 1.0, 0.01);
  r.add_point(2.0, 0.25, 0.2, 0.01);
  r.instrument.columns = {"a", "b"};
  r.instrument.rows = {{1.0, 2.0}};
  const fs::path dir = scratch("csv");
  write_csv(r, dir);
  CHECK(slurp(dir / "demo.csv") == "s,lhs,rhs,slack,tolerance\n1,0.5,1,0.5,0.01\n2,0.25,0.2,-0.05,0.01\n");
  CHECK(slurp(dir / "demo_instrument.csv") == "a,b\n1,2\n");
  CHECK(r.violations == 1);
  write_svg(r, dir);
  CHECK(slurp(dir / "demo.svg").rfind("<svg", 0) == 0);
  const auto j = to_json(r);
  CHECK(j["id"] == "demo");
  CHECK(j["points"] == 2);  // point count; the rows live in the csv
  CHECK(j["violations"] == 1);
}

TEST_CASE("lattice dump round trip") {
  const DomainPtr d = build_domain(disc(), 17);
  const GridFunction f = sample(d, make_subsolution({}, disc()).f);
  const fs::path dir = scratch("dump");
  write_dump(f, dir / "u");
  CHECK(fs::file_size(dir / "u.bin") == f.lattice().size() * 9);
  const Dump back = read_dump(dir / "u");
  CHECK(back.n == 1);
  CHECK(back.m == f.lattice().m);
  CHECK(back.h == doctest::Approx(d->h()));
  CHECK((back.values - f.values).norm() == 0.0);
  for (std::size_t i = 0; i < back.interior.size(); ++i) CHECK(bool(back.interior[i]) == d->interior(i));
  const auto hdr = nlohmann::json::parse(slurp(dir / "u.json"));
  CHECK(hdr["layout"].get<std::string>().find("first axis fastest") != std::string::npos);
}

}

TEST_SUITE("scenario") {

TEST_CASE("malformed JSON reports line and column") {
  try {
    parse_scenario("{\n  \"name\": \"x\",\n  \"resolution\": 32,,\n}\n");
    FAIL("no error");
  } catch (const ScenarioError& e) {
    CHECK(e.line == 3);
    CHECK(e.column == 20);
  }
}

TEST_CASE("unknown and invalid keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_scenario(R"({"nmae": "x"})"), doctest::Contains("nmae"), ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario(R"({"domain": {"n": 2, "radus": 1}})"), doctest::Contains("radus"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"resolution": 4})"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"domain": {"n": 2}, "resolution": 64})"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"pipeline": "verify:nothing"})"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"subsolution": {"name": "nothing"}})"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"resolution": "many"})"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"defaults": {"version": 99}})"), ScenarioError);
}

TEST_CASE("pipeline dependent defaults") {
  CHECK(parse_scenario("{}").resolution == 64);
  CHECK(parse_scenario(R"({"domain": {"n": 2}})").resolution == 20);
  CHECK(parse_scenario(R"({"pipeline": "theorem-b"})").resolution == 1281);
  CHECK(parse_scenario(R"({"pipeline": "verify:sublevel_decay"})").radial);
  CHECK_FALSE(parse_scenario(R"({"pipeline": "verify:sublevel_decay", "v_field": {"name": "quad"}})").radial);
  CHECK(defaults_block()["version"] == 1);
}

TEST_CASE("solve scenario writes a dump and a summary") {
  Scenario s = parse_scenario(R"({"name": "s1", "pipeline": "solve", "resolution": 33,
                                  "measure": {"kind": "lebesgue", "density": 4}})");
  s.output_dir = scratch("run").string();
  const RunResult r = run_scenario(s);
  CHECK(r.exit_code == kExitPass);
  const fs::path dir = fs::path(s.output_dir) / "s1";
  CHECK(fs::exists(dir / "u.bin"));
  const auto sm = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(sm["pass"] == true);
  CHECK(sm["defaults"]["version"] == 1);
  CHECK(sm["config"]["resolution"] == 33);
}

TEST_CASE("format selects the artifacts and the exit code reflects the solver") {
  Scenario s = parse_scenario(R"({"name": "cap", "pipeline": "capacity", "resolution": 65, "format": "csv"})");
  s.output_dir = scratch("fmt").string();
  const RunResult r = run_scenario(s);
  CHECK(r.exit_code == kExitPass);
  const fs::path dir = fs::path(s.output_dir) / "cap";
  CHECK(fs::exists(dir / "capacity.csv"));
  CHECK_FALSE(fs::exists(dir / "capacity.svg"));

  Scenario nc = parse_scenario(R"({"name": "nc", "domain": {"n": 2}, "resolution": 16, "solver": {"max_sweeps": 2}})");
  nc.output_dir = s.output_dir;
  CHECK(run_scenario(nc).exit_code == kExitSolver);
}

TEST_CASE("an inequality failure exits with 4") {
  // the capacity of a disc is well off a 5% band at 17 nodes per axis
  Scenario s = parse_scenario(R"({"name": "coarse", "pipeline": "capacity", "resolution": 17,
                                  "ladders": {"k_radii": [0.2, 0.3]}})");
  s.output_dir = scratch("fail").string();
  const RunResult r = run_scenario(s);
  CHECK(r.exit_code == kExitInequality);
  CHECK_FALSE(r.summary["failures"].empty());
}

}

TEST_SUITE("parallel") {

TEST_CASE("chunk layout ignores the worker count") {
  CHECK(chunk_count(10, 3) == 4);
  CHECK(chunk_count(0, 3) == 0);
  const auto run = [](int threads) {
    set_thread_count(threads);
    std::vector<double> part(chunk_count(1000, 64), 0.0);
    parallel_chunks(1000, 64, [&](std::size_t c, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) part[c] += 1.0 / double(i + 1);
    });
    double s = 0.0;
    for (double p : part) s += p;
    return s;
  };
  const double one = run(1);
  CHECK(run(4) == one);
  set_thread_count(0);
}

}
