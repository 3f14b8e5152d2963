#pragma once

// Random walk on percolation clusters: hitting distributions, equilibrium
// measure estimators, and the rejection-sampled incipient-infinite-cluster
// approximation.

#include <cstdint>
#include <optional>
#include <vector>

#include "percap/capacity.hpp"  // Measure
#include "percap/estimators.hpp"
#include "percap/geometry.hpp"
#include "percap/percolation.hpp"
#include "percap/stats.hpp"

namespace percap {

struct ClusterGraph {
  std::vector<Point> vertices;
  std::vector<std::vector<uint32_t>> adj;

  uint32_t index_of(const Point& p) const;  // UINT32_MAX when absent
};

// Graph view of an explored cluster (adjacency from its open edge list).
ClusterGraph cluster_graph(const Cluster& cluster);

struct HitRecord {
  bool timed_out = false;
  Point hit_point;
  uint64_t steps = 0;
};

// Uniform-neighbor walk from `start` until it enters A or exceeds max_steps.
// A must intersect the graph; a start inside A hits immediately.
HitRecord srw_hit(const ClusterGraph& g, const Point& start, const std::vector<Point>& A,
                  uint64_t max_steps, rng::Sequence& rng);

// Exact hitting distribution of the walk from `start` absorbed on A, by
// solving the absorbing-chain linear system (residual <= 1e-10). Guarded to
// 10^4 vertices.
Measure exact_hit_distribution(const ClusterGraph& g, const Point& start,
                               const std::vector<Point>& A);

struct EquilibriumOptions {
  McOptions mc;
  uint64_t max_walk_steps = 1000000;
};

// Per-point equilibrium estimates e_A(a) = P(hit A first at a, cluster of z
// meets A) / tau(z).
struct EquilibriumResult {
  std::vector<Point> points;
  std::vector<RatioEstimate> e;   // one per point of A
  RatioEstimate sum;              // all hit points pooled
  Estimate tau;
  uint64_t walk_timeouts = 0;
  uint64_t truncated = 0;
};

// Walk-based equilibrium measure: per replica, explore the cluster of z; if
// it meets A, the walk from z picks the first-hit point. Denominator tau(z)
// comes from an offset replica stream.
EquilibriumResult estimate_equilibrium(const GraphSpec& spec, const std::vector<Point>& A,
                                       const Point& z, const EquilibriumOptions& opts);

// Ordering-based equilibrium measure: e(a_i) counts replicas whose cluster
// of z contains a_i but none of a_1..a_{i-1}. Full exploration per replica.
EquilibriumResult ordering_equilibrium(const GraphSpec& spec,
                                       const std::vector<Point>& ordered_A, const Point& z,
                                       const McOptions& opts);

struct IicSample {
  bool exhausted = false;
  Cluster cluster;           // the accepted replica's cluster of x
  uint64_t attempts = 0;     // attempts consumed (including the accepted one)
  uint64_t truncated_attempts = 0;
};

// Rejection sampler for the IIC approximation: fresh configurations until
// the cluster of x connects to w; returns that cluster. The optional region
// restricts both the conditioning event and the cluster (used by the
// exhaustive small-box cross-checks).
IicSample iic_sample(const GraphSpec& spec, const Point& x, const Point& w, uint64_t budget,
                     uint64_t max_attempts, uint64_t master_seed, uint64_t replica_base = 0,
                     const Region& region = Region::full());

struct IicHitResult {
  uint64_t attempts = 0;
  uint64_t accepted = 0;
  uint64_t hits = 0;
  uint64_t truncated_attempts = 0;  // rejection tests cut off by the budget
  uint64_t truncated_hits = 0;      // hit tests cut off by the budget
  double acceptance_rate = 0.0;
  double frequency = 0.0;       // P(cluster of z meets A | accepted)
  double frequency_se = 0.0;
  double scale = 0.0;           // |z|_2^{d-4}
  double scaled_value = 0.0;    // scale * frequency
  double scaled_se = 0.0;
};

// Scaled IIC hitting estimate: frequency of {cluster of z meets A} among
// accepted samples conditioned on z <-> w, scaled by |z|^{d-4}. w sits at
// w_norm on the first axis. Requires |z| >= 2 diam(A) + 2 and at least 100
// accepted samples (else UnderpoweredError). opts.n is the attempt count.
IicHitResult estimate_iic_hit(const GraphSpec& spec, const std::vector<Point>& A, const Point& z,
                              int64_t w_norm, const McOptions& opts);

}  // namespace percap
