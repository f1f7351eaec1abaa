#include "malab/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace malab {

Lattice::Lattice(int n_, int m_, double h_) : n(n_), m(m_), h(h_) {
  if (n < 1 || n > 2) throw Error("lattice: complex dimension must be 1 or 2");
  if (m < 3) throw Error("lattice: need at least 3 nodes per axis");
  if (!(h > 0.0)) throw Error("lattice: spacing must be positive");
  std::ptrdiff_t s = 1;
  for (int k = 0; k < 4; ++k) {
    if (k < dim()) {
      strides_[k] = s;
      s *= m;
    } else {
      strides_[k] = 0;
    }
  }
  size_ = static_cast<std::size_t>(s);
}

Lattice Lattice::covering(int n, double extent, int resolution, int pad) {
  if (resolution < 3) throw Error("lattice: resolution too small");
  const double h = 2.0 * extent / (resolution - 1);
  return Lattice(n, resolution + 2 * pad, h);
}

double Lattice::cell_volume() const { return std::pow(h, dim()); }

std::ptrdiff_t Lattice::offset_of(const Offset& v) const {
  std::ptrdiff_t o = 0;
  for (int k = 0; k < dim(); ++k) o += v[k] * strides_[k];
  return o;
}

std::array<int, 4> Lattice::multi(std::size_t idx) const {
  std::array<int, 4> mi{0, 0, 0, 0};
  for (int k = 0; k < dim(); ++k) {
    mi[k] = static_cast<int>(idx % m);
    idx /= m;
  }
  return mi;
}

std::size_t Lattice::index(const std::array<int, 4>& mi) const {
  std::size_t idx = 0;
  for (int k = dim() - 1; k >= 0; --k) idx = idx * m + mi[k];
  return idx;
}

Point Lattice::coord(std::size_t idx) const {
  Point p = Point::Zero();
  for (int k = 0; k < dim(); ++k) {
    p[k] = axis_coord(static_cast<int>(idx % m));
    idx /= m;
  }
  return p;
}

bool Lattice::contains_shift(std::size_t idx, const Offset& v) const {
  const auto mi = multi(idx);
  for (int k = 0; k < dim(); ++k) {
    const int j = mi[k] + v[k];
    if (j < 0 || j >= m) return false;
  }
  return true;
}

std::array<int, 4> Lattice::locate(const Point& p) const {
  std::array<int, 4> mi{0, 0, 0, 0};
  for (int k = 0; k < dim(); ++k) {
    const int j = static_cast<int>(std::lround(p[k] / h + 0.5 * (m - 1)));
    mi[k] = std::clamp(j, 0, m - 1);
  }
  return mi;
}

double Lattice::interpolate(const Eigen::VectorXd& values, const Point& p) const {
  std::array<int, 4> base{0, 0, 0, 0};
  std::array<double, 4> frac{0, 0, 0, 0};
  for (int k = 0; k < dim(); ++k) {
    const double s = std::clamp(p[k] / h + 0.5 * (m - 1), 0.0, double(m - 1));
    int j = static_cast<int>(std::floor(s));
    if (j >= m - 1) j = m - 2;
    base[k] = j;
    frac[k] = s - j;
  }
  double acc = 0.0;
  const int corners = 1 << dim();
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, 4> mi = base;
    for (int k = 0; k < dim(); ++k) {
      if (c & (1 << k)) {
        mi[k] += 1;
        w *= frac[k];
      } else {
        w *= 1.0 - frac[k];
      }
    }
    if (w != 0.0) acc += w * values[static_cast<Eigen::Index>(index(mi))];
  }
  return acc;
}

const std::vector<Offset>& hessian_directions(int n) {
  static const std::vector<Offset> one = {Offset(1, 0, 0, 0), Offset(0, 1, 0, 0)};
  static const std::vector<Offset> two = {
      Offset(1, 0, 0, 0),  Offset(0, 1, 0, 0),  Offset(0, 0, 1, 0),  Offset(0, 0, 0, 1),
      Offset(1, 0, 1, 0),  Offset(1, 0, -1, 0), Offset(0, 1, 0, 1),  Offset(0, 1, 0, -1),
      Offset(1, 0, 0, 1),  Offset(1, 0, 0, -1), Offset(0, 1, 1, 0),  Offset(0, 1, -1, 0),
  };
  return n == 1 ? one : two;
}

}  // namespace malab
