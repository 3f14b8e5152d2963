#include "percap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace percap::oracle {

namespace {

std::vector<Point> region_points(const Region& region, int dim, uint64_t max_points) {
  int64_t r = 0;
  Point center = Point::zero(dim);
  switch (region.kind) {
    case Region::Kind::Box:
    case Region::Kind::Annulus:
      r = region.radius;
      center = region.center;
      break;
    default:
      throw std::invalid_argument("oracle: only box or annulus regions can be enumerated");
  }
  std::vector<Point> pts;
  for (const Point& p : box_points(center, r, max_points)) {
    if (region.contains(p)) pts.push_back(p);
  }
  return pts;
}

struct UnionFind {
  std::vector<uint32_t> parent;
  void reset(size_t n) {
    parent.resize(n);
    for (size_t i = 0; i < n; ++i) parent[i] = uint32_t(i);
  }
  uint32_t find(uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

}  // namespace

TinyGraph build_tiny_graph(const GraphSpec& spec, const Region& region, uint64_t max_edges,
                           uint64_t max_points) {
  TinyGraph g;
  g.spec = spec;
  g.region = region;
  g.points = region_points(region, spec.dim, max_points);
  NeighborTable table(spec);
  for (const Point& a : g.points) {
    for (const Point& o : table.positive_offsets()) {
      const Point b = a + o;
      if (!region.contains(b)) continue;
      g.edges.push_back(Edge{a, b});
    }
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& x, const Edge& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  if (g.edges.size() > max_edges)
    throw std::invalid_argument("oracle: region has " + std::to_string(g.edges.size()) +
                                " edges, above the enumeration guard of " +
                                std::to_string(max_edges));
  return g;
}

Result enumerate(const TinyGraph& graph, const Request& req) {
  const size_t np = graph.points.size();
  const size_t ne = graph.edges.size();
  if (ne > kMaxEdges) throw std::invalid_argument("oracle: too many edges");
  if (req.cluster_law && np > 64)
    throw std::invalid_argument("oracle: cluster law needs <= 64 region points");

  auto index_of = [&](const Point& p) -> uint32_t {
    const auto it = std::lower_bound(graph.points.begin(), graph.points.end(), p);
    if (it == graph.points.end() || !(*it == p))
      throw std::invalid_argument("oracle: point not in region: " + p.str());
    return uint32_t(it - graph.points.begin());
  };

  const uint32_t source = index_of(req.source);
  std::vector<uint32_t> targets;
  for (const Point& t : req.targets) targets.push_back(index_of(t));
  int feature = -1;
  if (req.feature_edge) {
    for (size_t i = 0; i < ne; ++i) {
      if (graph.edges[i].a == req.feature_edge->a && graph.edges[i].b == req.feature_edge->b)
        feature = int(i);
    }
    if (feature < 0) throw std::invalid_argument("oracle: feature edge not in region");
  }

  std::vector<char> boundary(np, 0);
  for (size_t i = 0; i < np; ++i)
    boundary[i] = is_inner_boundary(graph.points[i], graph.region, graph.spec) ? 1 : 0;

  // Edge-weight tables: weight(mask) = p^k (1-p)^(E-k).
  const double p = graph.spec.p;
  std::vector<double> pow_open(ne + 1, 1.0), pow_closed(ne + 1, 1.0);
  for (size_t i = 1; i <= ne; ++i) {
    pow_open[i] = pow_open[i - 1] * p;
    pow_closed[i] = pow_closed[i - 1] * (1.0 - p);
  }

  std::vector<std::pair<uint32_t, uint32_t>> edge_idx;
  edge_idx.reserve(ne);
  for (const Edge& e : graph.edges) edge_idx.emplace_back(index_of(e.a), index_of(e.b));

  Result res;
  res.edge_count = ne;
  res.pioneer_distribution.assign(np + 1, 0.0);
  double w_connect = 0.0, w_feature_and_connect = 0.0;
  std::unordered_map<uint64_t, double> law;

  UnionFind uf;
  std::vector<char> in_cluster(np);
  const uint64_t total = uint64_t(1) << ne;
  for (uint64_t mask = 0; mask < total; ++mask) {
    const int k = __builtin_popcountll(mask);
    const double w = pow_open[k] * pow_closed[ne - k];
    uf.reset(np);
    for (size_t e = 0; e < ne; ++e) {
      if (mask & (uint64_t(1) << e)) uf.unite(edge_idx[e].first, edge_idx[e].second);
    }
    const uint32_t root = uf.find(source);
    uint64_t size = 0, boundary_count = 0, shape = 0;
    for (uint32_t i = 0; i < np; ++i) {
      const bool inc = uf.find(i) == root;
      in_cluster[i] = inc;
      if (inc) {
        ++size;
        if (boundary[i]) ++boundary_count;
        if (req.cluster_law && i < 64) shape |= uint64_t(1) << i;
      }
    }
    bool connected = false;
    for (uint32_t t : targets) {
      if (in_cluster[t]) connected = true;
    }
    res.expected_cluster_size += w * double(size);
    res.pioneer_distribution[boundary_count] += w;
    if (connected) {
      w_connect += w;
      if (feature >= 0 && (mask & (uint64_t(1) << feature))) w_feature_and_connect += w;
    }
    if (req.cluster_law && (!req.cluster_law_conditional || connected)) law[shape] += w;
  }

  res.p_connect = w_connect;
  if (feature >= 0) res.p_feature_given_connect = w_connect > 0 ? w_feature_and_connect / w_connect : -1.0;
  if (req.cluster_law) {
    double norm = req.cluster_law_conditional ? w_connect : 1.0;
    for (const auto& [shape, w] : law) res.cluster_law.emplace_back(shape, w / norm);
    std::sort(res.cluster_law.begin(), res.cluster_law.end());
  }
  return res;
}

}  // namespace percap::oracle
