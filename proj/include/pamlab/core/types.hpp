#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace pamlab {

// Lattice and point coordinates are stored in fixed arrays; components at
// index >= dim are kept at zero.
inline constexpr int kMaxDim = 3;

using Site = std::array<int, kMaxDim>;
using Point = std::array<double, kMaxDim>;

inline double norm(const Point& p, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

inline double norm(const Site& p, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += double(p[i]) * double(p[i]);
  return std::sqrt(s);
}

inline long long norm2(const Site& p, int dim) {
  long long s = 0;
  for (int i = 0; i < dim; ++i) s += (long long)p[i] * p[i];
  return s;
}

inline Point to_point(const Site& s) { return {double(s[0]), double(s[1]), double(s[2])}; }

inline Site operator+(const Site& a, const Site& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Site operator-(const Site& a, const Site& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept {
    std::uint64_t h = 14695981039346656037ull;
    for (int v : s) {
      h ^= std::uint64_t(std::uint32_t(v));
      h *= 1099511628211ull;
    }
    return std::size_t(h);
  }
};

/// Axis-aligned box of lattice sites, inclusive bounds.  Axes >= dim are
/// collapsed to the single coordinate 0.
struct LatticeBox {
  int dim = 1;
  Site lo{0, 0, 0};
  Site hi{-1, 0, 0};

  static LatticeBox cube(int dim, int lo, int hi) {
    LatticeBox b;
    b.dim = dim;
    for (int i = 0; i < kMaxDim; ++i) {
      b.lo[i] = i < dim ? lo : 0;
      b.hi[i] = i < dim ? hi : 0;
    }
    return b;
  }

  static LatticeBox from_bounds(int dim, const Site& lo, const Site& hi) {
    LatticeBox b;
    b.dim = dim;
    for (int i = 0; i < kMaxDim; ++i) {
      b.lo[i] = i < dim ? lo[i] : 0;
      b.hi[i] = i < dim ? hi[i] : 0;
    }
    return b;
  }

  bool empty() const {
    for (int i = 0; i < kMaxDim; ++i)
      if (hi[i] < lo[i]) return true;
    return false;
  }

  int extent(int axis) const { return hi[axis] - lo[axis] + 1; }

  std::size_t size() const {
    if (empty()) return 0;
    std::size_t n = 1;
    for (int i = 0; i < kMaxDim; ++i) n *= std::size_t(extent(i));
    return n;
  }

  bool contains(const Site& s) const {
    for (int i = 0; i < kMaxDim; ++i)
      if (s[i] < lo[i] || s[i] > hi[i]) return false;
    return true;
  }

  bool contains(const LatticeBox& other) const {
    return other.empty() || (contains(other.lo) && contains(other.hi));
  }

  std::size_t index(const Site& s) const {
    std::size_t idx = 0;
    for (int i = 0; i < kMaxDim; ++i) idx = idx * std::size_t(extent(i)) + std::size_t(s[i] - lo[i]);
    return idx;
  }

  Site site(std::size_t idx) const {
    Site s{};
    for (int i = kMaxDim - 1; i >= 0; --i) {
      const auto e = std::size_t(extent(i));
      s[i] = lo[i] + int(idx % e);
      idx /= e;
    }
    return s;
  }
};

}  // namespace pamlab
