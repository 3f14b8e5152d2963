#pragma once

// Lattice geometry: points of Z^d, graph adjacency for the nearest-neighbor
// and spread-out models, boxes, boundaries and surface patches.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "percap/rng.hpp"

namespace percap {

inline constexpr int kMaxDim = 16;
// Coordinate cap: keeps every L1/Linf norm and coordinate difference well
// inside int64 range.
inline constexpr int64_t kCoordLimit = int64_t(1) << 40;

struct Point {
  std::array<int64_t, kMaxDim> c{};
  int dim = 0;

  static Point zero(int d) {
    Point p;
    p.dim = d;
    return p;
  }
  static Point of(std::vector<int64_t> coords) {
    if (coords.size() > size_t(kMaxDim)) throw std::invalid_argument("point dimension exceeds limit");
    Point p;
    p.dim = int(coords.size());
    for (int i = 0; i < p.dim; ++i) p.c[i] = coords[i];
    return p;
  }
  // Axis-aligned point v * e_axis in dimension d.
  static Point axis(int d, int axis_index, int64_t v) {
    Point p = zero(d);
    p.c[axis_index] = v;
    return p;
  }

  int64_t operator[](int i) const { return c[i]; }
  int64_t& operator[](int i) { return c[i]; }

  bool operator==(const Point& o) const {
    if (dim != o.dim) return false;
    for (int i = 0; i < dim; ++i)
      if (c[i] != o.c[i]) return false;
    return true;
  }
  bool operator!=(const Point& o) const { return !(*this == o); }

  // Lexicographic order; used everywhere a deterministic order is needed.
  bool operator<(const Point& o) const {
    for (int i = 0; i < dim; ++i) {
      if (c[i] != o.c[i]) return c[i] < o.c[i];
    }
    return false;
  }

  std::vector<int64_t> coords() const { return std::vector<int64_t>(c.begin(), c.begin() + dim); }
  std::string str() const;
};

inline Point operator+(const Point& a, const Point& b) {
  Point r = a;
  for (int i = 0; i < a.dim; ++i) r.c[i] += b.c[i];
  return r;
}
inline Point operator-(const Point& a, const Point& b) {
  Point r = a;
  for (int i = 0; i < a.dim; ++i) r.c[i] -= b.c[i];
  return r;
}

inline int64_t linf(const Point& a, const Point& b) {
  int64_t m = 0;
  for (int i = 0; i < a.dim; ++i) {
    const int64_t d = a.c[i] >= b.c[i] ? a.c[i] - b.c[i] : b.c[i] - a.c[i];
    if (d > m) m = d;
  }
  return m;
}
inline int64_t linf(const Point& a) {
  int64_t m = 0;
  for (int i = 0; i < a.dim; ++i) {
    const int64_t d = a.c[i] >= 0 ? a.c[i] : -a.c[i];
    if (d > m) m = d;
  }
  return m;
}
inline int64_t l1(const Point& a, const Point& b) {
  int64_t s = 0;
  for (int i = 0; i < a.dim; ++i) s += a.c[i] >= b.c[i] ? a.c[i] - b.c[i] : b.c[i] - a.c[i];
  return s;
}
// Squared Euclidean distance; exact in unsigned __int128, returned as double.
double dist2(const Point& a, const Point& b);
inline double euclid(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }
double euclid_norm(const Point& a);

struct PointHash {
  size_t operator()(const Point& p) const {
    rng::Digest d;
    d.absorb(uint64_t(p.dim));
    for (int i = 0; i < p.dim; ++i) d.absorb(uint64_t(p.c[i]));
    return size_t(d.lo ^ d.hi);
  }
};

void check_point(const Point& p, int expect_dim);  // dim match + coordinate cap

enum class Connectivity { NearestNeighbor, SpreadOut };

struct GraphSpec {
  int dim = 0;
  Connectivity connectivity = Connectivity::NearestNeighbor;
  int range = 1;  // spread-out range rho; ignored for nearest-neighbor
  double p = 0.0;

  static GraphSpec nn(int d, double p);
  static GraphSpec spread_out(int d, int rho, double p);
  void validate() const;

  uint64_t degree() const;  // 2d or (2rho+1)^d - 1
  // Fingerprint of the instance geometry; excludes p so that configurations
  // at different p share uniforms (monotone coupling).
  uint64_t fingerprint() const;
};

struct Edge {
  Point a, b;  // canonical: a < b lexicographically
};

// Canonical form of an edge given by its two endpoints; validates adjacency.
Edge canonical_edge(const Point& x, const Point& y, const GraphSpec& spec);
bool adjacent(const Point& x, const Point& y, const GraphSpec& spec);

struct Region {
  enum class Kind { FullLattice, Box, BoxComplement, HalfSpace, Annulus };
  Kind kind = Kind::FullLattice;
  Point center;      // Box / BoxComplement / Annulus
  int64_t radius = 0;       // Box / BoxComplement outer radius
  int64_t inner = 0;        // Annulus: inner < |x-c| <= radius
  int axis = 0;             // HalfSpace
  int64_t threshold = 0;    // HalfSpace: x[axis] >= threshold

  static Region full();
  static Region box(const Point& center, int64_t r);
  static Region box_complement(const Point& center, int64_t r);
  static Region half_space(int axis, int64_t threshold);
  static Region annulus(const Point& center, int64_t inner, int64_t outer);

  bool contains(const Point& x) const {
    switch (kind) {
      case Kind::FullLattice: return true;
      case Kind::Box: return linf(x, center) <= radius;
      case Kind::BoxComplement: return linf(x, center) > radius;
      case Kind::HalfSpace: return x.c[axis] >= threshold;
      case Kind::Annulus: {
        const int64_t d = linf(x, center);
        return d > inner && d <= radius;
      }
    }
    return false;
  }
  std::string str() const;
};

// Iteration over graph neighbors. Offsets are listed in lexicographic order;
// the positive half (lexicographically greater than 0) identifies canonical
// edge directions.
class NeighborTable {
 public:
  explicit NeighborTable(const GraphSpec& spec);

  const GraphSpec& spec() const { return spec_; }
  const std::vector<Point>& offsets() const { return offsets_; }
  const std::vector<Point>& positive_offsets() const { return positive_; }

  // For offsets()[i]: index into positive_offsets() of the offset or its
  // negation, and whether offsets()[i] itself is the positive one.
  int canonical_index(size_t i) const { return canon_index_[i]; }
  bool is_positive(size_t i) const { return positive_flag_[i]; }

  // Rank of (y - x) within positive_offsets(); -1 if not adjacent in the
  // positive direction.
  int positive_rank(const Point& diff) const;

 private:
  GraphSpec spec_;
  std::vector<Point> offsets_;
  std::vector<Point> positive_;
  std::vector<int> canon_index_;
  std::vector<char> positive_flag_;
};

// Spec operations -----------------------------------------------------------

// All lattice neighbors of x, in deterministic (lexicographic offset) order.
std::vector<Point> neighbors(const Point& x, const GraphSpec& spec);

// True iff some neighbor of x lies outside the region. Precondition: x is in
// the region.
bool is_inner_boundary(const Point& x, const Region& region, const GraphSpec& spec);

// Surface patch around a boundary point: every y in B(x,s) that lies on the
// inner boundary of the region. For a half-space region, `thin` selects the
// one-layer hyperplane boundary instead of the graph boundary (which is
// rho-thick for a spread-out graph); the thin hyperplane is the default.
std::vector<Point> surface_patch(const Point& x, int64_t s, const Region& region,
                                 const GraphSpec& spec, bool thin_half_space = true);

// All points of the box B(center, r), lexicographic order. Throws if the box
// has more than max_points points.
std::vector<Point> box_points(const Point& center, int64_t r, uint64_t max_points);
uint64_t box_size(int dim, int64_t r);  // (2r+1)^d, saturating at uint64 max

}  // namespace percap
