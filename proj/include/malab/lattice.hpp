#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace malab {

/// Real coordinates (x1, y1, x2, y2). For n = 1 only the first two are used.
using Point = Eigen::Vector4d;
using Offset = Eigen::Vector4i;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform lattice over the cube [-B, B]^{2n}, node k at (k - (m-1)/2) h.
struct Lattice {
  int n = 1;      // complex dimension
  int m = 0;      // nodes per real axis
  double h = 0.0; // spacing

  Lattice() = default;
  Lattice(int n_, int m_, double h_);

  /// Lattice with spacing 2*extent/(resolution-1) and `pad` extra layers outside [-extent, extent].
  static Lattice covering(int n, double extent, int resolution, int pad);

  int dim() const { return 2 * n; }
  std::size_t size() const { return size_; }
  double half_width() const { return 0.5 * (m - 1) * h; }
  double cell_volume() const;

  std::ptrdiff_t stride(int axis) const { return strides_[axis]; }
  std::ptrdiff_t offset_of(const Offset& v) const;

  std::array<int, 4> multi(std::size_t idx) const;
  std::size_t index(const std::array<int, 4>& mi) const;
  Point coord(std::size_t idx) const;
  double axis_coord(int k) const { return (k - 0.5 * (m - 1)) * h; }

  /// True if every node idx + v lies inside the lattice.
  bool contains_shift(std::size_t idx, const Offset& v) const;

  /// Nearest-node multi-index of a point (clamped).
  std::array<int, 4> locate(const Point& p) const;

  /// Multilinear interpolation of node values at an arbitrary point.
  double interpolate(const Eigen::VectorXd& values, const Point& p) const;

  bool same_as(const Lattice& o) const { return n == o.n && m == o.m && h == o.h; }

 private:
  std::size_t size_ = 0;
  std::array<std::ptrdiff_t, 4> strides_{0, 0, 0, 0};
};

/// Stencil directions used to assemble the complex Hessian.
/// n = 1: the two axes. n = 2: the four axes plus the eight diagonals
/// e_i +/- e_j for the real pairs entering the off-diagonal entry.
const std::vector<Offset>& hessian_directions(int n);

}  // namespace malab
