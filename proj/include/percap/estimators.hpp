#pragma once

// Replica-parallel estimators for connection probabilities and their ratios:
// two-point function, hitting probabilities, p-capacity ratios, one-arm
// probabilities, pioneer tails, and the critical-point calibration heuristic.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "percap/geometry.hpp"
#include "percap/percolation.hpp"
#include "percap/stats.hpp"

namespace percap {

// Replica index offset separating denominator streams from numerator streams.
inline constexpr uint64_t kDenominatorOffset = uint64_t(1) << 31;

struct McOptions {
  uint64_t n = 100000;
  uint64_t budget = 1000000;
  uint64_t master_seed = 0;
  int workers = 1;
  uint64_t replica_base = 0;  // first replica index of this stream
  bool paired = false;        // numerator/denominator on shared configurations
};

// Two-point function tau(z) = P(0 <-> z).
Estimate estimate_tau(const GraphSpec& spec, const Point& z, const McOptions& opts);

// P(z <-> A) with early exit on first contact.
Estimate estimate_hit(const GraphSpec& spec, const std::vector<Point>& A, const Point& z,
                      const McOptions& opts);

// p-capacity ratio P(z <-> A) / tau(z). Requires |z| >= 2 max_{a in A} |a|
// (Euclidean). Denominator replicas come from an offset stream unless
// opts.paired is set, in which case both events are evaluated on shared
// configurations and the delta-method error uses the empirical covariance.
RatioEstimate estimate_pcap(const GraphSpec& spec, const std::vector<Point>& A, const Point& z,
                            const McOptions& opts);

// Two-set ratio P(A <-> z + B) / tau(z).
RatioEstimate estimate_two_sets(const GraphSpec& spec, const std::vector<Point>& A,
                                const std::vector<Point>& B, const Point& z,
                                const McOptions& opts);

// Default source placement for p-capacity experiments: 4 x diameter of A
// (at least 2 max |a| and at least 3), on the last coordinate axis.
Point default_pcap_source(const std::vector<Point>& A, int d);

// One-arm probability P(0 <-> boundary of B(0,r)), explored inside the box.
Estimate estimate_one_arm(const GraphSpec& spec, int64_t r, const McOptions& opts);
// Set variant P(A <-> boundary of B(0,r)); requires A inside B(0, r/2).
Estimate estimate_one_arm_set(const GraphSpec& spec, const std::vector<Point>& A, int64_t r,
                              const McOptions& opts);

// Joint membership counts of a small point family in the cluster of z:
// count[mask] = number of replicas whose cluster's intersection with the
// family is exactly `mask`. One full (budgeted) exploration per replica.
struct MaskCounts {
  std::vector<uint64_t> count;  // size 2^k
  uint64_t n = 0;
  uint64_t truncated = 0;

  uint64_t hits_intersecting(uint64_t set_mask) const {
    uint64_t h = 0;
    for (size_t m = 0; m < count.size(); ++m) {
      if (m & set_mask) h += count[m];
    }
    return h;
  }
  void merge(const MaskCounts& o) {
    if (count.size() < o.count.size()) count.resize(o.count.size(), 0);
    for (size_t i = 0; i < o.count.size(); ++i) count[i] += o.count[i];
    n += o.n;
    truncated += o.truncated;
  }
};
MaskCounts membership_mask_counts(const GraphSpec& spec, const std::vector<Point>& family,
                                  const Point& z, const McOptions& opts);

// Pioneer tail experiment: CCDF of |C_r(0) ∩ Q_s(x)| over a t grid, the
// conditional-on-contact CCDF, and fitted exponential reference curves
// exp(-c t / s^2) and exp(-c t / s^3).
struct PioneerTailTable {
  std::vector<int64_t> t_grid;
  std::vector<Estimate> ccdf;
  std::vector<double> conditional_ccdf;  // NaN where inestimable
  uint64_t contacts = 0;
  uint64_t n = 0;
  uint64_t truncated = 0;
  double fitted_c_s2 = 0.0;
  double fitted_c_s3 = 0.0;
  std::vector<double> ref_s2;
  std::vector<double> ref_s3;
};
PioneerTailTable pioneer_tail(const GraphSpec& spec, int64_t r, int64_t s, const Point& x,
                              const std::vector<int64_t>& t_grid, const McOptions& opts);

// Bisection on f(p) = r2^2 P_p(0 <-> dB(0,r2)) - r1^2 P_p(0 <-> dB(0,r1));
// at the mean-field critical point both terms scale alike. Stochastic: every
// evaluation uses fresh replicas.
struct CalibrationEvaluation {
  double p = 0.0;
  double f = 0.0;
  double se = 0.0;
};
struct CalibrationResult {
  double p_c = 0.0;
  std::vector<CalibrationEvaluation> evaluations;
};
CalibrationResult calibrate_pc(const GraphSpec& spec, std::pair<int64_t, int64_t> r_pair,
                               std::pair<double, double> bracket, uint64_t n, int iterations,
                               const McOptions& opts);

}  // namespace percap
