#pragma once

#include "malab/lattice.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace malab {

/// Catalog entry for a quadratic strictly pseudoconvex domain
///   rho(z) = scale * (sum_i a_i |z_i|^2 - radius^2).
/// "ball" (the disc for n = 1) has a_i = 1; "ellipsoid" takes a_i >= 1.
struct DomainSpec {
  std::string shape = "ball";
  int n = 1;
  double radius = 1.0;
  std::array<double, 2> a{1.0, 1.0};
  double scale = 1.0;

  double rho(const Point& p) const;
  /// Largest |x_k| reached by the closed domain.
  double extent() const;
  /// Distance from the centre to the boundary along the shortest semi-axis.
  double inradius() const;
};

DomainSpec disc(double radius = 1.0);
DomainSpec unit_ball(int n);
DomainSpec ellipsoid(double a1, double a2);

/// Boundary crossing of a stencil arm: the point where rho changes sign on
/// the segment from an interior node towards an exterior neighbour.
struct Crossing {
  Point x;
  std::size_t node = 0;
  int direction = 0;
  int sign = 1;
  double theta = 1.0;  // fraction of the full arm length
};

class GridDomain {
 public:
  static constexpr int kMaxArms = 24;
  using ArmTable = std::array<std::int32_t, kMaxArms>;

  GridDomain(DomainSpec spec, Lattice lattice);

  const DomainSpec& spec() const { return spec_; }
  const Lattice& lattice() const { return lat_; }
  int n() const { return lat_.n; }
  double h() const { return lat_.h; }

  const Eigen::VectorXd& rho() const { return rho_; }
  bool interior(std::size_t idx) const { return interior_[idx] != 0; }
  const std::vector<std::uint8_t>& interior_mask() const { return interior_; }
  const std::vector<std::size_t>& interior_nodes() const { return interior_nodes_; }
  /// Interior nodes with at least one stencil arm cut by the boundary.
  const std::vector<std::size_t>& boundary_nodes() const { return boundary_nodes_; }

  const std::vector<Crossing>& crossings() const { return crossings_; }
  /// Arm table of a node, or nullptr when no arm is cut.
  /// Entry 2*d + (sign < 0) holds the crossing id or -1.
  const ArmTable* arms(std::size_t idx) const {
    const auto s = cut_slot_[idx];
    return s < 0 ? nullptr : &cuts_[static_cast<std::size_t>(s)];
  }

  /// Distance from an interior node to the nearest boundary crossing (0 outside).
  double dist(std::size_t idx) const { return dist_[static_cast<Eigen::Index>(idx)]; }
  const Eigen::VectorXd& dist() const { return dist_; }
  std::int32_t nearest_crossing(std::size_t idx) const { return nearest_[idx]; }

  double inradius() const { return spec_.inradius(); }
  /// Minimum over interior nodes of lambda_min(complex Hessian of rho) - 1.
  double psd_margin() const { return psd_margin_; }
  double min_rho() const { return min_rho_; }

 private:
  void classify();
  void find_crossings();
  void compute_distances();

  DomainSpec spec_;
  Lattice lat_;
  Eigen::VectorXd rho_;
  std::vector<std::uint8_t> interior_;
  std::vector<std::size_t> interior_nodes_;
  std::vector<std::size_t> boundary_nodes_;
  std::vector<Crossing> crossings_;
  std::vector<std::int32_t> cut_slot_;
  std::vector<ArmTable> cuts_;
  Eigen::VectorXd dist_;
  std::vector<std::int32_t> nearest_;
  double psd_margin_ = 0.0;
  double min_rho_ = 0.0;

  friend std::shared_ptr<const GridDomain> build_domain(const DomainSpec&, const Lattice&, double);
};

using DomainPtr = std::shared_ptr<const GridDomain>;

struct PsdViolation : Error {
  using Error::Error;
};
struct EmptyInterior : Error {
  using Error::Error;
};

inline constexpr double kPsdTolerance = 1e-10;
inline constexpr int kDefaultPad = 3;
/// Interior nodes closer to the boundary than this fraction of a stencil arm are
/// reclassified as exterior (the boundary then passes through the node's cell).
inline constexpr double kMinArmFraction = 0.1;

/// Builds the domain on a given lattice and validates dd^c rho >= beta.
DomainPtr build_domain(const DomainSpec& spec, const Lattice& lattice,
                       double psd_tol = kPsdTolerance);
/// Builds the domain on a lattice with `resolution` nodes across [-extent, extent].
DomainPtr build_domain(const DomainSpec& spec, int resolution, int pad = kDefaultPad);

enum class RegionKind { InteriorShrink, RhoSublevel, FunctionSublevel, CompactK };

struct RegionMask {
  DomainPtr domain;
  std::vector<std::uint8_t> mask;
  RegionKind kind = RegionKind::CompactK;

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool contains(std::size_t idx) const { return mask[idx] != 0; }
  bool subset_of(const RegionMask& other) const;
  std::vector<std::size_t> nodes() const;
};

RegionMask full_interior(const DomainPtr& d);
/// Omega_delta: interior nodes farther than delta from the boundary.
RegionMask shrink(const DomainPtr& d, double delta);
/// D_eps = {rho < -eps}.
RegionMask rho_sublevel(const DomainPtr& d, double eps);
/// Interior nodes inside the Euclidean ball |x - c| <= r.
RegionMask ball_region(const DomainPtr& d, const Point& center, double r);
RegionMask region_union(const RegionMask& a, const RegionMask& b);
/// Interior nodes sharing a lattice cell with a node of k (the discrete closure that
/// collects the full mass of the cells touching k).
RegionMask cell_closure(const RegionMask& k);
/// True if no node of the region has a stencil arm cut by the boundary.
bool compactly_inside(const RegionMask& k);

/// Largest c0 in (0, 1] with |rho| >= c0 dist(., boundary) at every interior node.
double hopf_constant(const GridDomain& d);

}  // namespace malab
