#include "percap/walker.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "percap/errors.hpp"
#include "percap/parallel.hpp"

namespace percap {

uint32_t ClusterGraph::index_of(const Point& p) const {
  for (uint32_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] == p) return i;
  }
  return UINT32_MAX;
}

ClusterGraph cluster_graph(const Cluster& cluster) {
  ClusterGraph g;
  g.vertices = cluster.vertices;
  g.adj.resize(g.vertices.size());
  for (const auto& [a, b] : cluster.open_edges) {
    g.adj[a].push_back(b);
    g.adj[b].push_back(a);
  }
  return g;
}

namespace {

uint32_t find_index(const ClusterGraph& g, const Point& p, const char* what) {
  const uint32_t i = g.index_of(p);
  if (i == UINT32_MAX) throw std::invalid_argument(std::string(what) + ": point not in graph");
  return i;
}

std::vector<uint32_t> absorbing_indices(const ClusterGraph& g, const std::vector<Point>& A) {
  std::vector<uint32_t> abs;
  for (const Point& a : A) {
    const uint32_t i = g.index_of(a);
    if (i != UINT32_MAX) abs.push_back(i);
  }
  std::sort(abs.begin(), abs.end());
  abs.erase(std::unique(abs.begin(), abs.end()), abs.end());
  if (abs.empty())
    throw std::invalid_argument("walk: target set does not intersect the cluster graph");
  return abs;
}

}  // namespace

HitRecord srw_hit(const ClusterGraph& g, const Point& start, const std::vector<Point>& A,
                  uint64_t max_steps, rng::Sequence& rng) {
  HitRecord rec;
  uint32_t cur = find_index(g, start, "srw_hit");
  const std::vector<uint32_t> abs = absorbing_indices(g, A);
  std::vector<char> absorbing(g.vertices.size(), 0);
  for (uint32_t i : abs) absorbing[i] = 1;

  for (uint64_t step = 0;; ++step) {
    if (absorbing[cur]) {
      rec.hit_point = g.vertices[cur];
      rec.steps = step;
      return rec;
    }
    if (step >= max_steps) {
      rec.timed_out = true;
      rec.steps = step;
      return rec;
    }
    const auto& nb = g.adj[cur];
    if (nb.empty()) {
      // isolated start not in A: the walk can never hit
      rec.timed_out = true;
      rec.steps = step;
      return rec;
    }
    cur = nb[size_t(rng.next_below(nb.size()))];
  }
}

Measure exact_hit_distribution(const ClusterGraph& g, const Point& start,
                               const std::vector<Point>& A) {
  const size_t n = g.vertices.size();
  if (n > 10000) throw std::invalid_argument("exact_hit_distribution: graph exceeds 10^4 vertices");
  const uint32_t start_idx = find_index(g, start, "exact_hit_distribution");
  const std::vector<uint32_t> abs = absorbing_indices(g, A);

  std::vector<char> absorbing(n, 0);
  for (uint32_t i : abs) absorbing[i] = 1;

  Measure out;
  if (absorbing[start_idx]) {
    out.support.push_back(g.vertices[start_idx]);
    out.weights.push_back(1.0);
    return out;
  }

  // Transient-state system (I - Q) X = R, one column per absorbing state.
  std::vector<int32_t> tidx(n, -1);
  std::vector<uint32_t> transient;
  for (uint32_t i = 0; i < n; ++i) {
    if (!absorbing[i]) {
      tidx[i] = int32_t(transient.size());
      transient.push_back(i);
    }
  }
  const size_t nt = transient.size(), na = abs.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(long(nt), long(nt));
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(long(nt), long(na));
  std::vector<int32_t> aidx(n, -1);
  for (size_t k = 0; k < na; ++k) aidx[abs[k]] = int32_t(k);
  for (size_t t = 0; t < nt; ++t) {
    const uint32_t v = transient[t];
    M(long(t), long(t)) = 1.0;
    const auto& nb = g.adj[v];
    if (nb.empty()) continue;  // absorbing-free dead end: hit probability 0
    const double w = 1.0 / double(nb.size());
    for (uint32_t u : nb) {
      if (absorbing[u])
        R(long(t), long(aidx[u])) += w;
      else
        M(long(t), long(tidx[u])) -= w;
    }
  }
  const Eigen::MatrixXd X = Eigen::PartialPivLU<Eigen::MatrixXd>(M).solve(R);
  const double residual = (M * X - R).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-10))
    throw std::runtime_error("exact_hit_distribution: linear solve residual above 1e-10");

  const int32_t srow = tidx[start_idx];
  for (size_t k = 0; k < na; ++k) {
    out.support.push_back(g.vertices[abs[k]]);
    out.weights.push_back(X(long(srow), long(k)));
  }
  // Clamp parasitic signs at solver precision.
  for (double& w : out.weights) {
    if (w < 0 && w > -1e-12) w = 0;
  }
  return out;
}

namespace {

struct EquilibriumTally {
  std::vector<uint64_t> hit_count;  // per point of A
  uint64_t n = 0, truncated = 0, timeouts = 0, met = 0;
  void merge(const EquilibriumTally& o) {
    if (hit_count.size() < o.hit_count.size()) hit_count.resize(o.hit_count.size(), 0);
    for (size_t i = 0; i < o.hit_count.size(); ++i) hit_count[i] += o.hit_count[i];
    n += o.n;
    truncated += o.truncated;
    timeouts += o.timeouts;
    met += o.met;
  }
};

EquilibriumResult assemble_equilibrium(const std::vector<Point>& A, const EquilibriumTally& tally,
                                       const Estimate& tau, uint64_t n) {
  EquilibriumResult res;
  res.points = A;
  res.tau = tau;
  res.walk_timeouts = tally.timeouts;
  res.truncated = tally.truncated;
  uint64_t total = 0;
  for (size_t i = 0; i < A.size(); ++i) {
    const uint64_t h = i < tally.hit_count.size() ? tally.hit_count[i] : 0;
    total += h;
    res.e.push_back(
        RatioEstimate::of(Estimate::bernoulli(h, tally.truncated + tally.timeouts, n), tau));
  }
  res.sum =
      RatioEstimate::of(Estimate::bernoulli(total, tally.truncated + tally.timeouts, n), tau);
  return res;
}

void validate_equilibrium_inputs(const GraphSpec& spec, const std::vector<Point>& A,
                                 const Point& z) {
  spec.validate();
  if (A.empty()) throw ConfigError("equilibrium: A must be nonempty");
  for (const Point& a : A) check_point(a, spec.dim);
  check_point(z, spec.dim);
  double maxn = 0;
  for (const Point& a : A) maxn = std::max(maxn, euclid_norm(a));
  if (euclid_norm(z) + 1e-9 < 2.0 * maxn)
    throw ConfigError("equilibrium: need |z| >= 2 max_a |a|");
}

}  // namespace

EquilibriumResult estimate_equilibrium(const GraphSpec& spec, const std::vector<Point>& A,
                                       const Point& z, const EquilibriumOptions& opts) {
  validate_equilibrium_inputs(spec, A, z);
  const McOptions& mc = opts.mc;

  auto tally = for_each_replica<EquilibriumTally>(
      mc.replica_base, mc.n, mc.workers, [&](uint64_t replica, EquilibriumTally& acc) {
        if (acc.hit_count.empty()) acc.hit_count.assign(A.size(), 0);
        Configuration cfg(spec, mc.master_seed, replica);
        const Cluster cl = explore(cfg, z, Region::full(), mc.budget);
        ++acc.n;
        if (cl.truncated) {
          ++acc.truncated;
          return;  // undecided replica: excluded from the numerator
        }
        bool meets = false;
        for (const Point& a : A) {
          if (cl.contains(a)) {
            meets = true;
            break;
          }
        }
        if (!meets) return;
        ++acc.met;
        const ClusterGraph g = cluster_graph(cl);
        rng::Sequence walk_rng(
            rng::stream_key(mc.master_seed ^ spec.fingerprint(), replica, rng::StreamTag::Walk));
        const HitRecord rec = srw_hit(g, z, A, opts.max_walk_steps, walk_rng);
        if (rec.timed_out) {
          ++acc.timeouts;
          return;
        }
        for (size_t i = 0; i < A.size(); ++i) {
          if (A[i] == rec.hit_point) {
            ++acc.hit_count[i];
            break;
          }
        }
      });

  McOptions tau_opts = mc;
  tau_opts.replica_base = mc.replica_base + kDenominatorOffset;
  const Estimate tau = estimate_tau(spec, z, tau_opts);
  return assemble_equilibrium(A, tally, tau, mc.n);
}

EquilibriumResult ordering_equilibrium(const GraphSpec& spec, const std::vector<Point>& ordered_A,
                                       const Point& z, const McOptions& opts) {
  validate_equilibrium_inputs(spec, ordered_A, z);
  for (size_t i = 0; i < ordered_A.size(); ++i) {
    for (size_t j = i + 1; j < ordered_A.size(); ++j) {
      if (ordered_A[i] == ordered_A[j])
        throw ConfigError("ordering_equilibrium: ordered points must be distinct");
    }
  }

  auto tally = for_each_replica<EquilibriumTally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, EquilibriumTally& acc) {
        if (acc.hit_count.empty()) acc.hit_count.assign(ordered_A.size(), 0);
        Configuration cfg(spec, opts.master_seed, replica);
        // No early exit: membership of every ordered point is needed.
        const Cluster cl = explore(cfg, z, Region::full(), opts.budget);
        ++acc.n;
        if (cl.truncated) {
          ++acc.truncated;
          return;
        }
        for (size_t i = 0; i < ordered_A.size(); ++i) {
          if (cl.contains(ordered_A[i])) {
            ++acc.hit_count[i];  // first point of the ordering inside C(z)
            ++acc.met;
            break;
          }
        }
      });

  McOptions tau_opts = opts;
  tau_opts.replica_base = opts.replica_base + kDenominatorOffset;
  const Estimate tau = estimate_tau(spec, z, tau_opts);
  return assemble_equilibrium(ordered_A, tally, tau, opts.n);
}

IicSample iic_sample(const GraphSpec& spec, const Point& x, const Point& w, uint64_t budget,
                     uint64_t max_attempts, uint64_t master_seed, uint64_t replica_base,
                     const Region& region) {
  spec.validate();
  check_point(x, spec.dim);
  check_point(w, spec.dim);
  if (x == w) throw ConfigError("iic_sample: w must differ from x");
  IicSample out;
  const std::vector<Point> target{w};
  for (uint64_t k = 0; k < max_attempts; ++k) {
    Configuration cfg(spec, master_seed, replica_base + k);
    const auto verdict = connects(cfg, x, target, region, budget);
    ++out.attempts;
    if (verdict.truncated()) ++out.truncated_attempts;
    if (verdict.connected()) {
      out.cluster = explore(cfg, x, region, budget);
      return out;
    }
  }
  out.exhausted = true;
  return out;
}

IicHitResult estimate_iic_hit(const GraphSpec& spec, const std::vector<Point>& A, const Point& z,
                              int64_t w_norm, const McOptions& opts) {
  spec.validate();
  if (A.empty()) throw ConfigError("iic_hit: A must be nonempty");
  for (const Point& a : A) check_point(a, spec.dim);
  check_point(z, spec.dim);
  double diam = 0;
  for (size_t i = 0; i < A.size(); ++i) {
    for (size_t j = i + 1; j < A.size(); ++j) diam = std::max(diam, euclid(A[i], A[j]));
  }
  if (euclid_norm(z) + 1e-9 < 2.0 * diam + 2.0)
    throw ConfigError("iic_hit: need |z| >= 2 diam(A) + 2");
  const Point w = Point::axis(spec.dim, 0, w_norm);
  if (w == z) throw ConfigError("iic_hit: w coincides with z");

  struct Tally {
    uint64_t attempts = 0, accepted = 0, hits = 0, trunc_attempts = 0, trunc_hits = 0;
    void merge(const Tally& o) {
      attempts += o.attempts;
      accepted += o.accepted;
      hits += o.hits;
      trunc_attempts += o.trunc_attempts;
      trunc_hits += o.trunc_hits;
    }
  };
  const std::vector<Point> wtarget{w};
  auto tally = for_each_replica<Tally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, Tally& acc) {
        Configuration cfg(spec, opts.master_seed, replica);
        ++acc.attempts;
        const auto verdict = connects(cfg, z, wtarget, Region::full(), opts.budget);
        if (verdict.truncated()) ++acc.trunc_attempts;
        if (!verdict.connected()) return;
        ++acc.accepted;
        const auto hit = connects(cfg, z, A, Region::full(), opts.budget);
        if (hit.truncated()) ++acc.trunc_hits;
        if (hit.connected()) ++acc.hits;
      });

  if (tally.accepted < 100)
    throw UnderpoweredError("iic_hit: fewer than 100 accepted samples (" +
                            std::to_string(tally.accepted) + " of " +
                            std::to_string(tally.attempts) + " attempts)");

  IicHitResult res;
  res.attempts = tally.attempts;
  res.accepted = tally.accepted;
  res.hits = tally.hits;
  res.truncated_attempts = tally.trunc_attempts;
  res.truncated_hits = tally.trunc_hits;
  res.acceptance_rate = double(tally.accepted) / double(tally.attempts);
  res.frequency = double(tally.hits) / double(tally.accepted);
  res.frequency_se =
      std::sqrt(res.frequency * (1.0 - res.frequency) / double(tally.accepted));
  const double zn = euclid_norm(z);
  const double scale = std::pow(zn, double(spec.dim - 4));
  res.scale = scale;
  res.scaled_value = scale * res.frequency;
  res.scaled_se = scale * res.frequency_se;
  return res;
}

}  // namespace percap
