#pragma once

#include "malab/pipelines.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace malab {

struct IoError : Error {
  using Error::Error;
};

/// %.12g: the fixed format every CSV cell uses.
std::string format_number(double x);

nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const HolderReport& r);

/// <dir>/<id>.csv with columns parameter, lhs, rhs, slack, tolerance; the instrument
/// table, if any, goes to <dir>/<id>_instrument.csv.
void write_csv(const InequalityReport& r, const std::filesystem::path& dir);
/// <dir>/holder.csv (delta, eps, sup_gap, fit) and <dir>/holder_detail.csv (every row field).
void write_csv(const HolderReport& r, const std::filesystem::path& dir);

/// Log-log plot of lhs against the parameter with the fitted bound (rhs) as a line.
/// Axes fall back to linear when a series has nonpositive values.
void write_svg(const InequalityReport& r, const std::filesystem::path& dir);
/// holder.svg: sup_gap against delta with the fitted power law; lap.svg for the L1 gap.
void write_svg(const HolderReport& r, const std::filesystem::path& dir);

void write_json(const nlohmann::json& j, const std::filesystem::path& file);

/// Flat little-endian float64 lattice values followed by the uint8 interior mask, plus a
/// JSON header <stem>.json with dims, spacing, origin and the dd^c convention.
void write_dump(const GridFunction& f, const std::filesystem::path& stem);

struct Dump {
  int n = 0;
  int m = 0;
  double h = 0.0;
  Eigen::VectorXd values;
  std::vector<std::uint8_t> interior;
};
Dump read_dump(const std::filesystem::path& stem);

}  // namespace malab
