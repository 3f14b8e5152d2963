#pragma once

// Exhaustive enumeration over all 2^E edge configurations of a small finite
// region. This is the exact reference for the Monte Carlo estimators; it
// shares only the lattice geometry with them and none of the sampling or
// exploration machinery.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "percap/geometry.hpp"

namespace percap::oracle {

inline constexpr uint64_t kMaxEdges = 24;

struct TinyGraph {
  GraphSpec spec;
  Region region;
  std::vector<Point> points;  // region points, lexicographic
  std::vector<Edge> edges;    // edges with both endpoints in region, sorted
};

// Enumerates the region (box or annulus-sized pieces only; the region must
// enumerate within `max_points`) and its internal edges. Throws when the
// edge count exceeds max_edges.
TinyGraph build_tiny_graph(const GraphSpec& spec, const Region& region,
                           uint64_t max_edges = kMaxEdges, uint64_t max_points = 4096);

struct Request {
  Point source;
  std::vector<Point> targets;            // may be empty (no connectivity event)
  std::optional<Edge> feature_edge;      // P(open | source <-> targets)
  bool cluster_law = false;              // law of the source cluster's vertex set
  bool cluster_law_conditional = false;  // condition the law on the connect event
};

struct Result {
  double p_connect = 0.0;
  double expected_cluster_size = 0.0;
  // P(X = k) where X counts cluster vertices on the region's inner boundary.
  std::vector<double> pioneer_distribution;
  double p_feature_given_connect = -1.0;
  // Vertex-set law of the source cluster: bitmask over point indices -> prob.
  std::vector<std::pair<uint64_t, double>> cluster_law;
  uint64_t edge_count = 0;
};

Result enumerate(const TinyGraph& graph, const Request& req);

}  // namespace percap::oracle
