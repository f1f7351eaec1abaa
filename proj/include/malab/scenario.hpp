#pragma once

#include "malab/report_io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace malab {

/// Parse or validation failure; line/column are 0 when not applicable.
struct ScenarioError : Error {
  ScenarioError(const std::string& what, std::size_t line_ = 0, std::size_t column_ = 0)
      : Error(what), line(line_), column(column_) {}
  std::size_t line;
  std::size_t column;
};

/// Measure request. kind: ma_phi | scaled_ma_phi | lebesgue | zero.
/// ma_phi resolves to the solver's node operator of phi in solver-facing pipelines and to
/// the cell-averaged (dd^c phi)^n in inequality scans.
struct MeasureSpec {
  std::string kind = "ma_phi";
  double density = 4.0;  // lebesgue
  double factor = 1.0;   // scaled_ma_phi
};

/// Density f of the corollary-c pipeline. kind: one | rho_power | half_plane.
struct DensitySpec {
  std::string kind = "one";
  double exponent = -0.25;  // rho_power: f = (-rho)^exponent
};

/// Radial profile on the unit ball. kind: quad | holder | log_pole | smooth_pole.
struct RadialSpec {
  std::string kind = "log_pole";
  double a = 1.0;       // quad coefficient, holder exponent
  double w = 1.0;       // holder weight
  double c = -1.0;      // pole coefficient (< 0: 1/(2 pi))
  double depth = 8.0;   // log_pole truncation
  double eta = 0.15;    // smooth_pole regularization
};

struct Scenario {
  std::string name = "scenario";
  std::string pipeline = "solve";  // solve | capacity | verify:<id> | theorem-b | corollary-c
  DomainSpec domain;
  int resolution = 64;
  int pad = kDefaultPad;
  FieldSpec subsolution;
  FieldSpec boundary;
  MeasureSpec measure;
  DensitySpec density;
  double p = 2.0;
  double collar = 0.25;
  std::uint64_t seed = 1;
  int instances = 100;
  int k = 1;  // mass_est level

  // ladders
  std::vector<double> deltas;
  std::vector<double> s_grid;
  std::vector<double> eps_grid;
  std::vector<double> k_radii;
  std::vector<double> k_center{0.0, 0.0, 0.0, 0.0};
  double tau = 1.0;
  double probe_eps = 0.1;
  int probe_resolution = -1;
  int probe_pad = -1;
  int probe_rungs = 6;
  double delta0 = -1.0;
  int ladder_points = 5;

  // sublevel_decay
  bool radial = false;  // default: true for sublevel_decay without v_field
  RadialSpec radial_v;
  RadialSpec radial_phi{"quad"};
  FieldSpec v_field;  // grid sublevel scan: v

  bool dump = false;
  std::string format = "all";  // all | csv | svg | json
  std::string output_dir = "out";
  SolverOptions solver;
};

/// Versioned defaults block echoed into every summary.
nlohmann::json defaults_block();

/// Parses a scenario; malformed JSON or unknown keys raise ScenarioError with line/column.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& file);

/// Exit codes of run_scenario.
enum ExitCode : int { kExitPass = 0, kExitParse = 2, kExitSolver = 3, kExitInequality = 4 };

struct RunResult {
  int exit_code = kExitPass;
  nlohmann::json summary;
  std::vector<std::filesystem::path> files;  // written artifacts, in write order
};

/// Runs the selected pipeline and writes <output_dir>/<name>/{<id>.csv, <id>.svg, summary.json, ...}.
RunResult run_scenario(const Scenario& s);

}  // namespace malab
