#include "percap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace percap {

std::string Point::str() const {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < dim; ++i) {
    if (i) os << ",";
    os << c[i];
  }
  os << ")";
  return os.str();
}

double dist2(const Point& a, const Point& b) {
  unsigned __int128 s = 0;
  for (int i = 0; i < a.dim; ++i) {
    const int64_t d = a.c[i] - b.c[i];
    s += (unsigned __int128)(d < 0 ? -d : d) * (unsigned __int128)(d < 0 ? -d : d);
  }
  return double(uint64_t(s >> 64)) * 0x1.0p64 + double(uint64_t(s));
}

double euclid_norm(const Point& a) { return std::sqrt(dist2(a, Point::zero(a.dim))); }

void check_point(const Point& p, int expect_dim) {
  if (p.dim != expect_dim) throw std::invalid_argument("point dimension mismatch");
  for (int i = 0; i < p.dim; ++i) {
    if (p.c[i] > kCoordLimit || p.c[i] < -kCoordLimit)
      throw std::invalid_argument("coordinate exceeds +-2^40 cap");
  }
}

GraphSpec GraphSpec::nn(int d, double p) {
  GraphSpec s;
  s.dim = d;
  s.connectivity = Connectivity::NearestNeighbor;
  s.range = 1;
  s.p = p;
  s.validate();
  return s;
}

GraphSpec GraphSpec::spread_out(int d, int rho, double p) {
  GraphSpec s;
  s.dim = d;
  s.connectivity = Connectivity::SpreadOut;
  s.range = rho;
  s.p = p;
  s.validate();
  return s;
}

void GraphSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be in [1," + std::to_string(kMaxDim) + "]");
  if (connectivity == Connectivity::SpreadOut && range < 1)
    throw std::invalid_argument("spread-out range must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
}

uint64_t GraphSpec::degree() const {
  if (connectivity == Connectivity::NearestNeighbor) return uint64_t(2 * dim);
  uint64_t n = 1;
  for (int i = 0; i < dim; ++i) n *= uint64_t(2 * range + 1);
  return n - 1;
}

uint64_t GraphSpec::fingerprint() const {
  uint64_t f = rng::splitmix64(uint64_t(dim));
  f = rng::splitmix64(f ^ (connectivity == Connectivity::SpreadOut ? uint64_t(range) + 1000 : 0));
  return f;
}

bool adjacent(const Point& x, const Point& y, const GraphSpec& spec) {
  if (x == y) return false;
  if (spec.connectivity == Connectivity::NearestNeighbor) return l1(x, y) == 1;
  return linf(x, y) <= spec.range;
}

Edge canonical_edge(const Point& x, const Point& y, const GraphSpec& spec) {
  if (!adjacent(x, y, spec)) throw std::invalid_argument("points are not adjacent under the graph spec");
  if (x < y) return Edge{x, y};
  return Edge{y, x};
}

Region Region::full() { return Region{}; }
Region Region::box(const Point& center, int64_t r) {
  if (r < 0) throw std::invalid_argument("box radius must be >= 0");
  Region g;
  g.kind = Kind::Box;
  g.center = center;
  g.radius = r;
  return g;
}
Region Region::box_complement(const Point& center, int64_t r) {
  Region g;
  g.kind = Kind::BoxComplement;
  g.center = center;
  g.radius = r;
  return g;
}
Region Region::half_space(int axis, int64_t threshold) {
  Region g;
  g.kind = Kind::HalfSpace;
  g.axis = axis;
  g.threshold = threshold;
  return g;
}
Region Region::annulus(const Point& center, int64_t inner, int64_t outer) {
  if (inner >= outer) throw std::invalid_argument("annulus requires inner < outer");
  Region g;
  g.kind = Kind::Annulus;
  g.center = center;
  g.inner = inner;
  g.radius = outer;
  return g;
}

std::string Region::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::FullLattice: os << "full"; break;
    case Kind::Box: os << "box" << center.str() << "r" << radius; break;
    case Kind::BoxComplement: os << "boxc" << center.str() << "r" << radius; break;
    case Kind::HalfSpace: os << "half[ax" << axis << ">=" << threshold << "]"; break;
    case Kind::Annulus: os << "ann" << center.str() << "(" << inner << "," << radius << "]"; break;
  }
  return os.str();
}

namespace {

std::vector<Point> build_offsets(const GraphSpec& spec) {
  std::vector<Point> out;
  const int d = spec.dim;
  if (spec.connectivity == Connectivity::NearestNeighbor) {
    for (int i = 0; i < d; ++i) {
      Point m = Point::zero(d);
      m.c[i] = -1;
      out.push_back(m);
    }
    for (int i = d - 1; i >= 0; --i) {
      Point p = Point::zero(d);
      p.c[i] = 1;
      out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  const int rho = spec.range;
  Point cur = Point::zero(d);
  for (int i = 0; i < d; ++i) cur.c[i] = -rho;
  while (true) {
    if (linf(cur) != 0) out.push_back(cur);
    int i = d - 1;
    while (i >= 0 && cur.c[i] == rho) {
      cur.c[i] = -rho;
      --i;
    }
    if (i < 0) break;
    ++cur.c[i];
  }
  // odometer enumeration is already lexicographic
  return out;
}

bool lex_positive(const Point& p) {
  for (int i = 0; i < p.dim; ++i) {
    if (p.c[i] != 0) return p.c[i] > 0;
  }
  return false;
}

}  // namespace

NeighborTable::NeighborTable(const GraphSpec& spec) : spec_(spec) {
  spec_.validate();
  offsets_ = build_offsets(spec_);
  canon_index_.resize(offsets_.size());
  positive_flag_.resize(offsets_.size());
  for (const Point& o : offsets_) {
    if (lex_positive(o)) positive_.push_back(o);
  }
  for (size_t i = 0; i < offsets_.size(); ++i) {
    const bool pos = lex_positive(offsets_[i]);
    positive_flag_[i] = pos ? 1 : 0;
    Point key = offsets_[i];
    if (!pos) {
      for (int k = 0; k < key.dim; ++k) key.c[k] = -key.c[k];
    }
    canon_index_[i] = positive_rank(key);
  }
}

int NeighborTable::positive_rank(const Point& diff) const {
  if (spec_.connectivity == Connectivity::NearestNeighbor) {
    // positive offsets are +e_k in lexicographic order: e_{d-1}, ..., e_0 is
    // NOT the order; lexicographic on vectors puts e_k before e_j iff k > j
    // is false. (1,0,..) > (0,1,0,..): e_0 is the largest. Sorted ascending:
    // e_{d-1} first. Rank accordingly.
    int axis = -1;
    for (int i = 0; i < diff.dim; ++i) {
      if (diff.c[i] == 1) {
        if (axis >= 0) return -1;
        axis = i;
      } else if (diff.c[i] != 0) {
        return -1;
      }
    }
    if (axis < 0) return -1;
    return diff.dim - 1 - axis;
  }
  // Mixed-radix lexicographic rank among all vectors in [-rho,rho]^d, then
  // shifted so that the first lex-positive offset has rank 0.
  const int rho = spec_.range;
  const uint64_t base = uint64_t(2 * rho + 1);
  if (linf(diff) > rho || linf(diff) == 0) return -1;
  uint64_t rank = 0;
  for (int i = 0; i < diff.dim; ++i) rank = rank * base + uint64_t(diff.c[i] + rho);
  uint64_t zero_rank = 0;
  for (int i = 0; i < diff.dim; ++i) zero_rank = zero_rank * base + uint64_t(rho);
  if (rank <= zero_rank) return -1;
  return int(rank - zero_rank - 1);
}

std::vector<Point> neighbors(const Point& x, const GraphSpec& spec) {
  check_point(x, spec.dim);
  NeighborTable table(spec);
  std::vector<Point> out;
  out.reserve(table.offsets().size());
  for (const Point& o : table.offsets()) out.push_back(x + o);
  return out;
}

bool is_inner_boundary(const Point& x, const Region& region, const GraphSpec& spec) {
  if (!region.contains(x)) throw std::invalid_argument("is_inner_boundary: point not in region");
  // Box and half-space admit arithmetic shortcuts: a point has a neighbor
  // outside iff it is within `range` of the region's edge.
  const int64_t rho = spec.connectivity == Connectivity::NearestNeighbor ? 1 : spec.range;
  switch (region.kind) {
    case Region::Kind::Box:
      return linf(x, region.center) > region.radius - rho;
    case Region::Kind::HalfSpace:
      return x.c[region.axis] < region.threshold + rho;
    default: break;
  }
  NeighborTable table(spec);
  for (const Point& o : table.offsets()) {
    if (!region.contains(x + o)) return true;
  }
  return false;
}

std::vector<Point> surface_patch(const Point& x, int64_t s, const Region& region,
                                 const GraphSpec& spec, bool thin_half_space) {
  check_point(x, spec.dim);
  if (s < 0) throw std::invalid_argument("surface_patch: s must be >= 0");
  if (!region.contains(x)) throw std::invalid_argument("surface_patch: x not in region");
  const bool thin = thin_half_space && region.kind == Region::Kind::HalfSpace;
  if (!thin && !is_inner_boundary(x, region, spec))
    throw std::invalid_argument("surface_patch: x not on the inner boundary");
  if (thin && x.c[region.axis] != region.threshold)
    throw std::invalid_argument("surface_patch: x not on the boundary hyperplane");

  std::vector<Point> out;
  for (const Point& y : box_points(x, s, uint64_t(1) << 30)) {
    if (!region.contains(y)) continue;
    if (thin) {
      if (y.c[region.axis] == region.threshold) out.push_back(y);
    } else if (is_inner_boundary(y, region, spec)) {
      out.push_back(y);
    }
  }
  return out;  // box_points order is lexicographic already
}

uint64_t box_size(int dim, int64_t r) {
  const uint64_t side = uint64_t(2 * r + 1);
  uint64_t n = 1;
  for (int i = 0; i < dim; ++i) {
    if (n > UINT64_MAX / side) return UINT64_MAX;
    n *= side;
  }
  return n;
}

std::vector<Point> box_points(const Point& center, int64_t r, uint64_t max_points) {
  if (r < 0) throw std::invalid_argument("box radius must be >= 0");
  const uint64_t n = box_size(center.dim, r);
  if (n > max_points) throw std::invalid_argument("box enumeration exceeds point guard");
  std::vector<Point> out;
  out.reserve(n);
  Point cur = center;
  for (int i = 0; i < center.dim; ++i) cur.c[i] -= r;
  while (true) {
    out.push_back(cur);
    int i = center.dim - 1;
    while (i >= 0 && cur.c[i] == center.c[i] + r) {
      cur.c[i] = center.c[i] - r;
      --i;
    }
    if (i < 0) break;
    ++cur.c[i];
  }
  return out;
}

}  // namespace percap
