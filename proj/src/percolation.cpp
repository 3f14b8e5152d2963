#include "percap/percolation.hpp"

#include <algorithm>
#include <sstream>

namespace percap {

Configuration::Configuration(const GraphSpec& spec, uint64_t master_seed, uint64_t replica,
                             bool enable_memo)
    : spec_(spec),
      table_(spec),
      master_seed_(master_seed),
      replica_(replica),
      edge_key_(rng::stream_key(master_seed ^ spec.fingerprint(), replica,
                                rng::StreamTag::EdgeState)) {
  spec_.validate();
  if (enable_memo) memo_.emplace();
}

bool Configuration::edge_open(const Edge& e) const {
  const Edge ce = canonical_edge(e.a, e.b, spec_);
  check_point(ce.a, spec_.dim);
  check_point(ce.b, spec_.dim);
  const int rank = table_.positive_rank(ce.b - ce.a);
  if (rank < 0) throw std::invalid_argument("edge_open: not a canonical edge direction");
  return edge_open_offset(ce.a, rank);
}

bool Cluster::contains(const Point& p) const {
  for (const Point& v : vertices) {
    if (v == p) return true;
  }
  return false;
}

std::string Cluster::serialize() const {
  std::vector<Point> sorted = vertices;
  std::sort(sorted.begin(), sorted.end());
  std::ostringstream os;
  for (const Point& v : sorted) {
    for (int i = 0; i < v.dim; ++i) {
      if (i) os << ' ';
      os << v.c[i];
    }
    os << '\n';
  }
  return os.str();
}

Cluster explore(const Configuration& cfg, const Point& x, const Region& region,
                uint64_t budget) {
  check_point(x, cfg.spec().dim);
  if (!region.contains(x)) throw std::invalid_argument("explore: origin not in region");
  if (budget < 1) throw std::invalid_argument("explore: budget must be >= 1");

  Cluster cl;
  cl.spec = cfg.spec();
  cl.origin = x;
  cl.region = region;

  PointIndexMap index(&cl.vertices);
  std::vector<uint32_t> parent;
  cl.vertices.push_back(x);
  index.insert(x, 0);
  parent.push_back(UINT32_MAX);

  const NeighborTable& table = cfg.table();
  const auto& offsets = table.offsets();

  // The whole admission queue is processed even after the budget is hit, so
  // open_edges is complete over the admitted vertex set; truncation then
  // means exactly that an admissible vertex beyond the budget was seen.
  for (size_t head = 0; head < cl.vertices.size(); ++head) {
    const Point u = cl.vertices[head];
    const uint32_t u_idx = uint32_t(head);
    for (size_t oi = 0; oi < offsets.size(); ++oi) {
      const Point w = u + offsets[oi];
      if (!region.contains(w)) continue;
      const bool positive = table.is_positive(oi);
      const Point& base = positive ? u : w;
      if (!cfg.edge_open_offset(base, table.canonical_index(oi))) continue;
      const uint32_t w_idx = index.find(w);
      if (w_idx == UINT32_MAX) {
        if (cl.vertices.size() >= budget) {
          cl.truncated = true;
          continue;
        }
        const uint32_t idx = uint32_t(cl.vertices.size());
        cl.vertices.push_back(w);
        index.insert(w, idx);
        parent.push_back(u_idx);
        cl.open_edges.emplace_back(u_idx, idx);
      } else if (w_idx < u_idx && w_idx != parent[u_idx]) {
        // Non-tree edge, recorded exactly once at the later endpoint's pop.
        cl.open_edges.emplace_back(w_idx, u_idx);
      }
    }
  }
  cl.budget_used = cl.vertices.size();
  return cl;
}

namespace {

struct SetTarget {
  const std::vector<Point>* pts;
  bool operator()(const Point& p) const {
    for (const Point& t : *pts) {
      if (t == p) return true;
    }
    return false;
  }
};

struct HashedSetTarget {
  std::vector<Point> arena;
  PointIndexMap index{&arena};
  explicit HashedSetTarget(const std::vector<Point>& pts) {
    for (const Point& p : pts) {
      if (index.find(p) == UINT32_MAX) {
        arena.push_back(p);
        index.insert(p, uint32_t(arena.size() - 1));
      }
    }
  }
  bool operator()(const Point& p) const { return index.find(p) != UINT32_MAX; }
};

}  // namespace

ConnectivityVerdict connects(const Configuration& cfg, const Point& x,
                             const std::vector<Point>& target, const Region& region,
                             uint64_t budget) {
  return connects_sets(cfg, {x}, target, region, budget);
}

ConnectivityVerdict connects_sets(const Configuration& cfg, const std::vector<Point>& sources,
                                  const std::vector<Point>& target, const Region& region,
                                  uint64_t budget) {
  if (sources.empty()) throw std::invalid_argument("connects: empty source set");
  if (target.empty()) {
    // Documented degenerate: nothing to hit.
    ConnectivityVerdict v;
    v.status = ConnectivityVerdict::Status::Disconnected;
    return v;
  }
  if (target.size() <= 8) {
    SetTarget t{&target};
    return connects_pred(cfg, sources, t, region, budget);
  }
  HashedSetTarget t(target);
  return connects_pred(cfg, sources, t, region, budget);
}

std::vector<Point> pioneers(const Cluster& cluster) {
  if (cluster.region.kind != Region::Kind::Box)
    throw std::invalid_argument("pioneers: cluster region must be a box");
  std::vector<Point> out;
  for (const Point& v : cluster.vertices) {
    if (is_inner_boundary(v, cluster.region, cluster.spec)) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

AnnulusCount annulus_count(const Configuration& cfg, const Point& z, const Point& center,
                           int64_t r, int64_t L, uint64_t budget, bool outward) {
  if (L < 1 || (!outward && L >= r)) throw std::invalid_argument("annulus_count: need 1 <= L < r");
  if (!outward && linf(z, center) <= r)
    throw std::invalid_argument("annulus_count: inward variant requires z outside the box");
  const int64_t lo = outward ? r : r - L;
  const int64_t hi = outward ? r + L : r;
  Cluster cl = explore(cfg, z, Region::full(), budget);
  AnnulusCount out;
  out.truncated = cl.truncated;
  out.cluster_size = cl.vertices.size();
  for (const Point& v : cl.vertices) {
    const int64_t d = linf(v, center);
    if (d > lo && d <= hi) ++out.count;
  }
  return out;
}

}  // namespace percap
