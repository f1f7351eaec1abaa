// malab: command line front end of the Monge-Ampere lab.
//
//   malab solve|capacity|theorem-b|corollary-c [--config FILE] [options]
//   malab verify <id> [--config FILE] [options]
//   malab regress [--golden DIR] [--update]
//
// Exit codes: 0 pass, 2 parse/validation error, 3 solver failure, 4 inequality failure.

#include "malab/parallel.hpp"
#include "malab/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>

#ifndef MALAB_GOLDEN_DIR
#define MALAB_GOLDEN_DIR "tests/golden"
#endif

namespace fs = std::filesystem;
using namespace malab;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<int> resolution;
  std::optional<std::uint64_t> seed;
  std::string format;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config,-c", o.config, "scenario JSON file")->check(CLI::ExistingFile);
  app->add_option("--out,-o", o.out, "output root (default: the scenario's, else ./out)");
  app->add_option("--resolution,-r", o.resolution, "lattice nodes per axis");
  app->add_option("--seed", o.seed, "RNG seed of the random suites");
  app->add_option("--format", o.format, "all | csv | svg | json");
}

std::string slurp(const fs::path& p);

// The verb fills in a missing "pipeline"; a config written for another pipeline is an error.
Scenario build(const std::string& pipeline, const Overrides& o) {
  Scenario s;
  if (o.config.empty()) {
    s = parse_scenario(nlohmann::json{{"pipeline", pipeline}}.dump());
  } else {
    const std::string text = slurp(o.config);
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      s = parse_scenario(text);  // throws with line and column
    } else if (!j.contains("pipeline")) {
      auto k = j;
      k["pipeline"] = pipeline;
      s = parse_scenario(k.dump());
    } else {
      s = parse_scenario(text);
      if (s.pipeline != pipeline)
        throw ScenarioError("config pipeline '" + s.pipeline + "' does not match the verb '" + pipeline + "'");
    }
  }
  if (o.config.empty()) s.name = pipeline == "theorem-b" || pipeline == "corollary-c" ? pipeline : pipeline.substr(pipeline.find(':') + 1);
  if (!o.out.empty()) s.output_dir = o.out;
  if (o.resolution) s.resolution = *o.resolution;
  if (o.seed) s.seed = *o.seed;
  if (!o.format.empty()) s.format = o.format;
  return s;
}

int run(const std::string& pipeline, const Overrides& o) {
  try {
    const RunResult r = run_scenario(build(pipeline, o));
    const auto& sm = r.summary;
    std::cout << sm["scenario"].get<std::string>() << ": " << (r.exit_code == kExitPass ? "pass" : "fail")
              << " (exit " << r.exit_code << ")\n";
    for (const auto& f : sm["failures"]) std::cout << "  failed: " << f.get<std::string>() << '\n';
    std::cout << "  output: " << (r.files.empty() ? fs::path() : r.files.back().parent_path()).string() << '\n';
    return r.exit_code;
  } catch (const ScenarioError& e) {
    std::cerr << "malab: " << e.what() << '\n';
    return kExitParse;
  } catch (const IoError& e) {
    std::cerr << "malab: " << e.what() << '\n';
    return kExitParse;
  } catch (const NotConverged& e) {
    std::cerr << "malab: " << e.what() << '\n';
    return kExitSolver;
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::vector<fs::path> listing(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out.push_back(e.path().filename());
  std::sort(out.begin(), out.end());
  return out;
}

// Runs every tests/golden/<name>.json and compares its output directory with
// tests/golden/<name>/ byte for byte.
int regress(const fs::path& golden, bool update, const fs::path& scratch) {
  std::vector<fs::path> scenarios;
  for (const auto& e : fs::directory_iterator(golden))
    if (e.is_regular_file() && e.path().extension() == ".json") scenarios.push_back(e.path());
  std::sort(scenarios.begin(), scenarios.end());
  if (scenarios.empty()) {
    std::cerr << "malab: no scenarios in " << golden << '\n';
    return kExitParse;
  }
  int bad = 0;
  for (const auto& file : scenarios) {
    Scenario s;
    try {
      s = load_scenario(file);
    } catch (const ScenarioError& e) {
      std::cerr << "malab: " << file.filename().string() << ": " << e.what() << '\n';
      return kExitParse;
    }
    s.output_dir = scratch.string();
    fs::remove_all(scratch / s.name);
    const RunResult r = run_scenario(s);
    const fs::path got = scratch / s.name;
    const fs::path want = golden / s.name;
    if (update) {
      fs::remove_all(want);
      fs::create_directories(want);
      for (const auto& f : listing(got)) fs::copy_file(got / f, want / f);
      std::cout << s.name << ": updated (" << listing(want).size() << " files, exit " << r.exit_code << ")\n";
      continue;
    }
    std::vector<std::string> diffs;
    const auto a = listing(got);
    const auto b = listing(want);
    if (a != b) diffs.push_back("file sets differ");
    for (const auto& f : b)
      if (fs::exists(got / f) && slurp(got / f) != slurp(want / f)) diffs.push_back(f.string());
    std::cout << s.name << ": " << (diffs.empty() ? "identical" : "DIFFERS") << '\n';
    for (const auto& d : diffs) std::cout << "  " << d << '\n';
    if (!diffs.empty()) ++bad;
  }
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"malab: complex Monge-Ampere solver, capacities and inequality checks (n = 1, 2)"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker count (default: MA_LAB_THREADS, else all cores)");

  Overrides o;
  std::string verify_id;
  std::vector<std::pair<CLI::App*, std::string>> verbs;
  for (const char* v : {"solve", "capacity", "theorem-b", "corollary-c"}) {
    CLI::App* sub = app.add_subcommand(v, std::string("run the ") + v + " pipeline");
    add_common(sub, o);
    verbs.emplace_back(sub, v);
  }
  CLI::App* verify = app.add_subcommand("verify", "run one inequality check");
  verify->add_option("id", verify_id, "blocki | cegrell | sublevel_decay | volume_capacity | mass_est | phi_eps | stability | l1_l1")
      ->required();
  add_common(verify, o);

  CLI::App* reg = app.add_subcommand("regress", "rerun the golden scenarios and compare outputs byte for byte");
  std::string golden = MALAB_GOLDEN_DIR;
  std::string scratch = (fs::temp_directory_path() / "malab-regress").string();
  bool update = false;
  reg->add_option("--golden", golden, "directory of golden scenarios")->check(CLI::ExistingDirectory);
  reg->add_option("--scratch", scratch, "where the fresh outputs go");
  reg->add_flag("--update", update, "overwrite the golden outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }
  if (threads > 0) set_thread_count(threads);

  if (reg->parsed()) return regress(golden, update, scratch);
  if (verify->parsed()) return run("verify:" + verify_id, o);
  for (const auto& [sub, name] : verbs)
    if (sub->parsed()) return run(name, o);
  return kExitParse;
}
