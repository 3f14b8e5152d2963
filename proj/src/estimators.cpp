#include "percap/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "percap/errors.hpp"
#include "percap/parallel.hpp"

namespace percap {

namespace {

struct BernoulliTally {
  uint64_t n = 0;
  uint64_t hits = 0;
  uint64_t truncated = 0;
  void add(const ConnectivityVerdict& v) {
    ++n;
    if (v.connected()) ++hits;
    if (v.truncated()) ++truncated;
  }
  void merge(const BernoulliTally& o) {
    n += o.n;
    hits += o.hits;
    truncated += o.truncated;
  }
  Estimate estimate() const { return Estimate::bernoulli(hits, truncated, n); }
};

double max_norm2(const std::vector<Point>& A) {
  double m = 0.0;
  for (const Point& a : A) m = std::max(m, euclid_norm(a));
  return m;
}

double diameter2(const std::vector<Point>& A) {
  double m = 0.0;
  for (size_t i = 0; i < A.size(); ++i) {
    for (size_t j = i + 1; j < A.size(); ++j) m = std::max(m, euclid(A[i], A[j]));
  }
  return m;
}

}  // namespace

Estimate estimate_tau(const GraphSpec& spec, const Point& z, const McOptions& opts) {
  spec.validate();
  check_point(z, spec.dim);
  if (opts.n < 1) throw ConfigError("estimate_tau: n must be >= 1");
  const Point origin = Point::zero(spec.dim);
  if (z == origin) return Estimate::exact(1.0, opts.n);
  const std::vector<Point> target{z};
  auto tally = for_each_replica<BernoulliTally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, BernoulliTally& acc) {
        Configuration cfg(spec, opts.master_seed, replica);
        acc.add(connects(cfg, origin, target, Region::full(), opts.budget));
      });
  return tally.estimate();
}

Estimate estimate_hit(const GraphSpec& spec, const std::vector<Point>& A, const Point& z,
                      const McOptions& opts) {
  spec.validate();
  check_point(z, spec.dim);
  for (const Point& a : A) check_point(a, spec.dim);
  if (A.empty()) return Estimate::bernoulli(0, 0, opts.n);  // documented degenerate
  for (const Point& a : A) {
    if (a == z) return Estimate::exact(1.0, opts.n);
  }
  auto tally = for_each_replica<BernoulliTally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, BernoulliTally& acc) {
        Configuration cfg(spec, opts.master_seed, replica);
        acc.add(connects(cfg, z, A, Region::full(), opts.budget));
      });
  return tally.estimate();
}

Point default_pcap_source(const std::vector<Point>& A, int d) {
  const double reach = std::max({4.0 * diameter2(A), 2.0 * max_norm2(A), 3.0});
  return Point::axis(d, d - 1, int64_t(std::ceil(reach)));
}

namespace {

struct PairedTally {
  uint64_t n = 0, num_hits = 0, den_hits = 0, both = 0, truncated = 0;
  void merge(const PairedTally& o) {
    n += o.n;
    num_hits += o.num_hits;
    den_hits += o.den_hits;
    both += o.both;
    truncated += o.truncated;
  }
};

RatioEstimate ratio_from_paired(const PairedTally& t) {
  const Estimate num = Estimate::bernoulli(t.num_hits, t.truncated, t.n);
  const Estimate den = Estimate::bernoulli(t.den_hits, t.truncated, t.n);
  if (den.hits == 0)
    throw UnderpoweredError("all denominator replicas missed (paired mode); increase n");
  RatioEstimate r;
  r.numerator = num;
  r.denominator = den;
  r.ratio = num.value / den.value;
  // Delta method with the empirical covariance of the paired indicators.
  const double pn = num.value, pd = den.value, nn = double(t.n);
  const double cov = double(t.both) / nn - pn * pd;
  const double var = (pn * (1 - pn) / (pd * pd) + pn * pn * pd * (1 - pd) / (pd * pd * pd * pd) -
                      2.0 * pn * cov / (pd * pd * pd)) /
                     nn;
  r.std_error = var > 0 ? std::sqrt(var) : 0.0;
  return r;
}

}  // namespace

RatioEstimate estimate_pcap(const GraphSpec& spec, const std::vector<Point>& A, const Point& z,
                            const McOptions& opts) {
  spec.validate();
  if (A.empty()) throw ConfigError("estimate_pcap: A must be nonempty");
  const double zn = euclid_norm(z);
  if (zn + 1e-9 < 2.0 * max_norm2(A))
    throw ConfigError("estimate_pcap: need |z| >= 2 max_a |a| (source too close to A)");
  const Point origin = Point::zero(spec.dim);

  if (!opts.paired) {
    McOptions den_opts = opts;
    den_opts.replica_base = opts.replica_base + kDenominatorOffset;
    const Estimate num = estimate_hit(spec, A, z, opts);
    const Estimate den = estimate_tau(spec, z, den_opts);
    return RatioEstimate::of(num, den);
  }

  const std::vector<Point> ztarget{z};
  auto tally = for_each_replica<PairedTally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, PairedTally& acc) {
        Configuration cfg(spec, opts.master_seed, replica);
        const auto hit = connects(cfg, z, A, Region::full(), opts.budget);
        const auto tau = connects(cfg, origin, ztarget, Region::full(), opts.budget);
        ++acc.n;
        if (hit.connected()) ++acc.num_hits;
        if (tau.connected()) ++acc.den_hits;
        if (hit.connected() && tau.connected()) ++acc.both;
        if (hit.truncated() || tau.truncated()) ++acc.truncated;
      });
  return ratio_from_paired(tally);
}

RatioEstimate estimate_two_sets(const GraphSpec& spec, const std::vector<Point>& A,
                                const std::vector<Point>& B, const Point& z,
                                const McOptions& opts) {
  spec.validate();
  if (A.empty() || B.empty()) throw ConfigError("estimate_two_sets: A and B must be nonempty");
  std::vector<Point> shifted;
  shifted.reserve(B.size());
  for (const Point& b : B) shifted.push_back(b + z);
  std::vector<Point> all = A;
  all.insert(all.end(), B.begin(), B.end());
  const double zn = euclid_norm(z);
  if (zn + 1e-9 < 2.0 * diameter2(all))
    throw ConfigError("estimate_two_sets: need |z| >= 2 diam(A u B)");

  auto tally = for_each_replica<BernoulliTally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, BernoulliTally& acc) {
        Configuration cfg(spec, opts.master_seed, replica);
        acc.add(connects_sets(cfg, A, shifted, Region::full(), opts.budget));
      });
  McOptions den_opts = opts;
  den_opts.replica_base = opts.replica_base + kDenominatorOffset;
  const Estimate den = estimate_tau(spec, z, den_opts);
  return RatioEstimate::of(tally.estimate(), den);
}

namespace {

// Reached the inner boundary of B(0,r): within `rho` of the box edge.
struct BoundaryTarget {
  int64_t threshold;  // r - rho
  bool operator()(const Point& p) const { return linf(p) > threshold; }
};

}  // namespace

Estimate estimate_one_arm(const GraphSpec& spec, int64_t r, const McOptions& opts) {
  return estimate_one_arm_set(spec, {Point::zero(spec.dim)}, r, opts);
}

Estimate estimate_one_arm_set(const GraphSpec& spec, const std::vector<Point>& A, int64_t r,
                              const McOptions& opts) {
  spec.validate();
  if (r < 1) throw ConfigError("one_arm: r must be >= 1");
  for (const Point& a : A) {
    check_point(a, spec.dim);
    if (2 * linf(a) > r) throw ConfigError("one_arm_set: A must lie inside B(0, r/2)");
  }
  const int64_t rho = spec.connectivity == Connectivity::NearestNeighbor ? 1 : spec.range;
  const BoundaryTarget target{r - rho};
  const Region box = Region::box(Point::zero(spec.dim), r);
  auto tally = for_each_replica<BernoulliTally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, BernoulliTally& acc) {
        Configuration cfg(spec, opts.master_seed, replica);
        acc.add(connects_pred(cfg, A, target, box, opts.budget));
      });
  return tally.estimate();
}

MaskCounts membership_mask_counts(const GraphSpec& spec, const std::vector<Point>& family,
                                  const Point& z, const McOptions& opts) {
  spec.validate();
  if (family.empty() || family.size() > 16)
    throw ConfigError("membership_mask_counts: family size must be in [1,16]");
  for (const Point& p : family) check_point(p, spec.dim);
  check_point(z, spec.dim);

  struct Tally {
    MaskCounts counts;
    void merge(const Tally& o) { counts.merge(o.counts); }
  };
  const size_t k = family.size();
  auto tally = for_each_replica<Tally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, Tally& acc) {
        if (acc.counts.count.empty()) acc.counts.count.assign(size_t(1) << k, 0);
        Configuration cfg(spec, opts.master_seed, replica);
        const Cluster cl = explore(cfg, z, Region::full(), opts.budget);
        uint64_t mask = 0;
        for (size_t i = 0; i < k; ++i) {
          for (const Point& v : cl.vertices) {
            if (v == family[i]) {
              mask |= uint64_t(1) << i;
              break;
            }
          }
        }
        ++acc.counts.n;
        if (cl.truncated) ++acc.counts.truncated;
        acc.counts.count[mask] += 1;
      });
  if (tally.counts.count.empty()) tally.counts.count.assign(size_t(1) << k, 0);
  return tally.counts;
}

PioneerTailTable pioneer_tail(const GraphSpec& spec, int64_t r, int64_t s, const Point& x,
                              const std::vector<int64_t>& t_grid, const McOptions& opts) {
  spec.validate();
  if (s < 1 || s > r) throw ConfigError("pioneer_tail: need 1 <= s <= r");
  check_point(x, spec.dim);
  const Region box = Region::box(Point::zero(spec.dim), r);
  if (!box.contains(x) || !is_inner_boundary(x, box, spec))
    throw ConfigError("pioneer_tail: x must lie on the inner boundary of B(0,r)");
  if (t_grid.empty()) throw ConfigError("pioneer_tail: empty t grid");
  for (int64_t t : t_grid) {
    if (t < 0) throw ConfigError("pioneer_tail: t grid must be nonnegative");
  }
  const int64_t rho = spec.connectivity == Connectivity::NearestNeighbor ? 1 : spec.range;
  const int64_t tmax = *std::max_element(t_grid.begin(), t_grid.end());

  struct Tally {
    std::vector<uint64_t> count_hist;  // histogram of patch counts, capped at tmax+1
    uint64_t n = 0, truncated = 0;
    void merge(const Tally& o) {
      if (count_hist.size() < o.count_hist.size()) count_hist.resize(o.count_hist.size(), 0);
      for (size_t i = 0; i < o.count_hist.size(); ++i) count_hist[i] += o.count_hist[i];
      n += o.n;
      truncated += o.truncated;
    }
  };
  const Point origin = Point::zero(spec.dim);
  auto tally = for_each_replica<Tally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, Tally& acc) {
        if (acc.count_hist.empty()) acc.count_hist.assign(size_t(tmax) + 2, 0);
        Configuration cfg(spec, opts.master_seed, replica);
        const Cluster cl = explore(cfg, origin, box, opts.budget);
        uint64_t count = 0;
        for (const Point& v : cl.vertices) {
          if (linf(v, x) <= s && linf(v) > r - rho) ++count;
        }
        ++acc.n;
        if (cl.truncated) ++acc.truncated;
        acc.count_hist[std::min<uint64_t>(count, uint64_t(tmax) + 1)] += 1;
      });
  if (tally.count_hist.empty()) tally.count_hist.assign(size_t(tmax) + 2, 0);

  PioneerTailTable table;
  table.t_grid = t_grid;
  table.n = tally.n;
  table.truncated = tally.truncated;
  // tail_at_least[t] = number of replicas with count >= t
  std::vector<uint64_t> tail(size_t(tmax) + 2, 0);
  uint64_t acc = 0;
  for (int64_t t = tmax + 1; t >= 0; --t) {
    acc += tally.count_hist[size_t(t)];
    tail[size_t(t)] = acc;
  }
  table.contacts = tmax >= 1 ? tail[1] : (tally.n - tally.count_hist[0]);
  for (int64_t t : t_grid) {
    const uint64_t h = t == 0 ? tally.n : tail[size_t(t)];
    table.ccdf.push_back(Estimate::bernoulli(h, tally.truncated, tally.n));
    table.conditional_ccdf.push_back(
        table.contacts > 0 && t >= 1 ? double(h) / double(table.contacts)
        : t == 0                     ? 1.0
                                     : std::numeric_limits<double>::quiet_NaN());
  }
  // Least-squares fit of -log conditional CCDF against t/s^2 and t/s^3 over
  // the estimable grid points with t >= 1.
  double sxx2 = 0, sxy2 = 0, sxx3 = 0, sxy3 = 0;
  for (size_t i = 0; i < table.t_grid.size(); ++i) {
    const int64_t t = table.t_grid[i];
    const double q = table.conditional_ccdf[i];
    if (t < 1 || !(q > 0.0) || q >= 1.0) continue;
    const double y = -std::log(q);
    const double x2 = double(t) / double(s * s);
    const double x3 = double(t) / double(s * s * s);
    sxx2 += x2 * x2;
    sxy2 += x2 * y;
    sxx3 += x3 * x3;
    sxy3 += x3 * y;
  }
  table.fitted_c_s2 = sxx2 > 0 ? sxy2 / sxx2 : 0.0;
  table.fitted_c_s3 = sxx3 > 0 ? sxy3 / sxx3 : 0.0;
  for (int64_t t : t_grid) {
    table.ref_s2.push_back(std::exp(-table.fitted_c_s2 * double(t) / double(s * s)));
    table.ref_s3.push_back(std::exp(-table.fitted_c_s3 * double(t) / double(s * s * s)));
  }
  return table;
}

CalibrationResult calibrate_pc(const GraphSpec& spec, std::pair<int64_t, int64_t> r_pair,
                               std::pair<double, double> bracket, uint64_t n, int iterations,
                               const McOptions& opts) {
  spec.validate();
  const auto [r1, r2] = r_pair;
  if (!(r1 >= 1 && r1 < r2)) throw ConfigError("calibrate_pc: need 1 <= r1 < r2");
  auto [lo, hi] = bracket;
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw ConfigError("calibrate_pc: bad bracket");

  CalibrationResult result;
  uint64_t eval_counter = 0;
  auto evaluate = [&](double p) {
    GraphSpec at_p = spec;
    at_p.p = p;
    McOptions eo = opts;
    eo.n = n;
    eo.replica_base = opts.replica_base + (eval_counter++) * (uint64_t(1) << 33);
    const Estimate e1 = estimate_one_arm(at_p, r1, eo);
    McOptions eo2 = eo;
    eo2.replica_base += uint64_t(1) << 32;
    const Estimate e2 = estimate_one_arm(at_p, r2, eo2);
    CalibrationEvaluation ev;
    ev.p = p;
    ev.f = double(r2 * r2) * e2.value - double(r1 * r1) * e1.value;
    ev.se = std::sqrt(double(r2 * r2) * double(r2 * r2) * e2.std_error * e2.std_error +
                      double(r1 * r1) * double(r1 * r1) * e1.std_error * e1.std_error);
    result.evaluations.push_back(ev);
    return ev;
  };

  const CalibrationEvaluation at_lo = evaluate(lo);
  const CalibrationEvaluation at_hi = evaluate(hi);
  if (at_lo.f * at_hi.f > 0.0 && std::abs(at_lo.f) > 3.0 * at_lo.se &&
      std::abs(at_hi.f) > 3.0 * at_hi.se)
    throw BracketError("calibrate_pc: no sign change across the bracket");

  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const CalibrationEvaluation ev = evaluate(mid);
    // f is increasing in p (one-arm probabilities rise with p, weighted
    // toward the larger radius above criticality).
    if (ev.f < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  result.p_c = 0.5 * (lo + hi);
  return result;
}

}  // namespace percap
