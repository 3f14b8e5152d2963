#pragma once

// Pioneer-point classification by cluster density conditions, K-regular and
// K-line-good points, and the regular-fraction experiment.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "percap/estimators.hpp"
#include "percap/geometry.hpp"
#include "percap/percolation.hpp"

namespace percap {

// Surface-count threshold exponent: s^2 (log s)^7 by default, or the weaker
// s^3 (log s)^7 variant.
enum class SurfaceBound { Squared, Cubed };

struct DensityCheck {
  bool pass = false;
  bool volume_ok = false;
  bool surface_ok = false;
  uint64_t volume_count = 0;
  uint64_t surface_count = 0;
  double volume_threshold = 0.0;
  double surface_threshold = 0.0;
};

// Density condition at scale s for a pioneer x of a box-restricted cluster:
// the cluster has at most s^4 (log s)^7 points in B(x,s) and at most
// s^2 (log s)^7 (or s^3 with the Cubed variant) of them on the box boundary.
// Natural logarithm; defined for s >= 3.
DensityCheck density_check(const Cluster& cluster, const Point& x, int64_t s,
                           SurfaceBound bound = SurfaceBound::Squared);

struct RegularityFailure {
  Point x;
  int64_t first_failing_s = 0;
  bool volume_failed = false;
  bool surface_failed = false;
};

struct RegularityReport {
  int64_t r = 0;
  int64_t K = 0;
  SurfaceBound bound = SurfaceBound::Squared;
  std::vector<Point> pioneer_points;
  std::vector<Point> regular;
  std::vector<Point> separated_regular;     // greedy lexicographic 2K-separated subset
  std::vector<Point> line_good;
  std::vector<Point> projected_line_good;   // the outer endpoints on dB(0, r+K)
  std::vector<RegularityFailure> failures;  // one per irregular pioneer

  std::string to_json() const;
};

// A pioneer is K-regular when the density condition holds at every integer
// scale s in [K, 2r]; beyond 2r the counts are constant while the thresholds
// grow, so larger scales are vacuous.
RegularityReport classify_regular(const Cluster& cluster, int64_t K,
                                  SurfaceBound bound = SurfaceBound::Squared);

// Fills the line-good fields: for each separated regular point, the straight
// outward segment of K unit edges (face = lowest axis on which |x_i| = r,
// sign outward) must be fully open. Nearest-neighbor graphs only.
void line_good(const Configuration& cfg, RegularityReport& report);

struct LocalDensityCheck {
  enum class Outcome { Pass, Fail, Infeasible };
  Outcome outcome = Outcome::Infeasible;
  uint64_t max_volume_count = 0;
  uint64_t max_surface_count = 0;
  double volume_threshold = 0.0;
  double surface_threshold = 0.0;
  int disjoint_paths = 0;
  int path_limit = 0;
  std::string infeasible_reason;

  bool pass() const { return outcome == Outcome::Pass; }
};

// Local density condition at scale s around a boundary point x: every
// restricted cluster C(y; B(x,s^d) ∩ B(0,r)) with y in B(x,s) has at most
// s^4 (log s)^4 points in B(x,s), boundary clusters at most s^2 (log s)^4
// boundary points there, and at most (log s)^3 disjoint open paths run from
// B(x,s) to the boundary of B(x,s^d). Vertex-disjoint via max-flow by
// default; edge-disjoint behind the flag. Exploration volume is guarded;
// oversize requests return Infeasible rather than Fail.
LocalDensityCheck local_density_check(const Configuration& cfg, const Point& x, int64_t s,
                                      int64_t r, SurfaceBound bound = SurfaceBound::Squared,
                                      bool edge_disjoint = false,
                                      uint64_t volume_guard = 2000000);

// Maximum number of disjoint paths between vertex sets on an explicit graph
// (adjacency lists over vertex indices). Fully vertex-disjoint by default.
int max_disjoint_paths(const std::vector<std::vector<uint32_t>>& adj,
                       const std::vector<uint32_t>& sources, const std::vector<uint32_t>& sinks,
                       bool edge_disjoint = false);

struct RegularFractionResult {
  uint64_t n = 0;
  uint64_t event_count = 0;       // X_r >= M and X_r^{K-reg} <= X_r / 2
  uint64_t reached_count = 0;     // X_r >= 1
  uint64_t truncated = 0;
  double mean_pioneers = 0.0;     // E[X_r]
  double mean_regular = 0.0;      // E[X_r^{K-reg}]
  double mean_line_good = 0.0;    // E[X_r^{K-line-good}]
  Estimate event_frequency;
};

// Frequency of {X_r >= M and X_r^{K-reg} <= X_r/2} plus summary statistics.
RegularFractionResult regular_fraction_experiment(const GraphSpec& spec, int64_t r, int64_t K,
                                                  uint64_t M, const McOptions& opts,
                                                  SurfaceBound bound = SurfaceBound::Squared);

}  // namespace percap
