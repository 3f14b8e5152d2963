#include "percap/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "percap/errors.hpp"
#include "percap/parallel.hpp"

namespace percap {

namespace {

double log_pow7(int64_t s) { return std::pow(std::log(double(s)), 7.0); }

double volume_threshold(int64_t s) { return double(s) * double(s) * double(s) * double(s) * log_pow7(s); }

double surface_threshold(int64_t s, SurfaceBound bound) {
  const double base = bound == SurfaceBound::Squared ? double(s) * double(s)
                                                     : double(s) * double(s) * double(s);
  return base * log_pow7(s);
}

void require_box_cluster(const Cluster& cluster) {
  if (cluster.region.kind != Region::Kind::Box)
    throw std::invalid_argument("regularity: cluster region must be a box");
}

int64_t boundary_threshold(const Cluster& cluster) {
  const int64_t rho =
      cluster.spec.connectivity == Connectivity::NearestNeighbor ? 1 : cluster.spec.range;
  return cluster.region.radius - rho;  // linf > threshold means boundary
}

}  // namespace

DensityCheck density_check(const Cluster& cluster, const Point& x, int64_t s, SurfaceBound bound) {
  require_box_cluster(cluster);
  if (s < 3) throw std::invalid_argument("density_check: s must be >= 3");
  check_point(x, cluster.spec.dim);
  if (!is_inner_boundary(x, cluster.region, cluster.spec) || !cluster.contains(x))
    throw std::invalid_argument("density_check: x must be a pioneer of the cluster");

  DensityCheck out;
  const int64_t bthresh = boundary_threshold(cluster);
  const Point& c = cluster.region.center;
  for (const Point& v : cluster.vertices) {
    if (linf(v, x) > s) continue;
    ++out.volume_count;
    if (linf(v, c) > bthresh) ++out.surface_count;
  }
  out.volume_threshold = volume_threshold(s);
  out.surface_threshold = surface_threshold(s, bound);
  out.volume_ok = double(out.volume_count) <= out.volume_threshold;
  out.surface_ok = double(out.surface_count) <= out.surface_threshold;
  out.pass = out.volume_ok && out.surface_ok;
  return out;
}

RegularityReport classify_regular(const Cluster& cluster, int64_t K, SurfaceBound bound) {
  require_box_cluster(cluster);
  if (K < 3) throw std::invalid_argument("classify_regular: K must be >= 3");
  RegularityReport rep;
  rep.r = cluster.region.radius;
  rep.K = K;
  rep.bound = bound;
  rep.pioneer_points = pioneers(cluster);

  const int64_t r = cluster.region.radius;
  const int64_t s_max = 2 * r < K ? K : 2 * r;
  const int64_t bthresh = boundary_threshold(cluster);
  const Point& c = cluster.region.center;

  // Distance histograms around each pioneer turn the per-scale recount into
  // cumulative sums: one pass over the cluster per pioneer.
  std::vector<uint64_t> vol_hist, surf_hist;
  for (const Point& x : rep.pioneer_points) {
    vol_hist.assign(size_t(s_max) + 1, 0);
    surf_hist.assign(size_t(s_max) + 1, 0);
    for (const Point& v : cluster.vertices) {
      const int64_t dist = linf(v, x);
      if (dist > s_max) continue;
      ++vol_hist[size_t(dist)];
      if (linf(v, c) > bthresh) ++surf_hist[size_t(dist)];
    }
    uint64_t vol = 0, surf = 0;
    for (int64_t dist = 0; dist < K; ++dist) {
      vol += vol_hist[size_t(dist)];
      surf += surf_hist[size_t(dist)];
    }
    bool regular = true;
    RegularityFailure failure;
    for (int64_t s = K; s <= s_max; ++s) {
      vol += vol_hist[size_t(s)];
      surf += surf_hist[size_t(s)];
      const bool vol_ok = double(vol) <= volume_threshold(s);
      const bool surf_ok = double(surf) <= surface_threshold(s, bound);
      if (!vol_ok || !surf_ok) {
        regular = false;
        failure.x = x;
        failure.first_failing_s = s;
        failure.volume_failed = !vol_ok;
        failure.surface_failed = !surf_ok;
        break;
      }
    }
    if (regular)
      rep.regular.push_back(x);
    else
      rep.failures.push_back(failure);
  }

  // Greedy lexicographic maximal packing at pairwise Linf distance >= 2K.
  for (const Point& x : rep.regular) {
    bool ok = true;
    for (const Point& y : rep.separated_regular) {
      if (linf(x, y) < 2 * K) {
        ok = false;
        break;
      }
    }
    if (ok) rep.separated_regular.push_back(x);
  }
  return rep;
}

void line_good(const Configuration& cfg, RegularityReport& report) {
  if (cfg.spec().connectivity != Connectivity::NearestNeighbor)
    throw std::invalid_argument("line_good: nearest-neighbor graphs only");
  report.line_good.clear();
  report.projected_line_good.clear();
  const int64_t r = report.r;
  const int64_t K = report.K;
  for (const Point& x : report.separated_regular) {
    // Face: lowest axis index on which |x_i| = r; outward sign from x itself.
    int axis = -1;
    for (int i = 0; i < x.dim; ++i) {
      if (x.c[i] == r || x.c[i] == -r) {
        axis = i;
        break;
      }
    }
    if (axis < 0) continue;  // not on a face (cannot happen for box pioneers)
    const int64_t step = x.c[axis] > 0 ? 1 : -1;
    bool all_open = true;
    Point cur = x;
    for (int64_t j = 0; j < K; ++j) {
      Point next = cur;
      next.c[axis] += step;
      if (!cfg.edge_open(Edge{cur, next})) {
        all_open = false;
        break;
      }
      cur = next;
    }
    if (all_open) {
      report.line_good.push_back(x);
      report.projected_line_good.push_back(cur);
    }
  }
}

int max_disjoint_paths(const std::vector<std::vector<uint32_t>>& adj,
                       const std::vector<uint32_t>& sources, const std::vector<uint32_t>& sinks,
                       bool edge_disjoint) {
  const uint32_t n = uint32_t(adj.size());
  if (sources.empty() || sinks.empty()) return 0;

  // Flow network: vertex splitting (v_in = 2v, v_out = 2v+1) gives fully
  // vertex-disjoint paths; without splitting, unit arc capacities give
  // edge-disjoint paths. Super source/sink appended at the end.
  const uint32_t base = edge_disjoint ? n : 2 * n;
  const uint32_t S = base, T = base + 1;
  struct Arc {
    uint32_t to;
    int cap;
    uint32_t rev;
  };
  std::vector<std::vector<Arc>> g(base + 2);
  auto add_arc = [&](uint32_t from, uint32_t to, int cap) {
    g[from].push_back(Arc{to, cap, uint32_t(g[to].size())});
    g[to].push_back(Arc{from, 0, uint32_t(g[from].size() - 1)});
  };
  const int inf = 1 << 28;
  if (edge_disjoint) {
    for (uint32_t v = 0; v < n; ++v) {
      for (uint32_t w : adj[v]) {
        if (w > v) {
          add_arc(v, w, 1);
          add_arc(w, v, 1);
        }
      }
    }
    for (uint32_t s : sources) add_arc(S, s, inf);
    for (uint32_t t : sinks) add_arc(t, T, inf);
  } else {
    for (uint32_t v = 0; v < n; ++v) add_arc(2 * v, 2 * v + 1, 1);
    for (uint32_t v = 0; v < n; ++v) {
      for (uint32_t w : adj[v]) add_arc(2 * v + 1, 2 * w, inf);
    }
    for (uint32_t s : sources) add_arc(S, 2 * s, 1);
    for (uint32_t t : sinks) add_arc(2 * t + 1, T, inf);
  }

  // Edmonds-Karp; path counts here are tiny.
  int flow = 0;
  std::vector<int> prev_node(g.size()), prev_arc(g.size());
  while (true) {
    std::fill(prev_node.begin(), prev_node.end(), -1);
    std::queue<uint32_t> q;
    q.push(S);
    prev_node[S] = int(S);
    while (!q.empty() && prev_node[T] < 0) {
      const uint32_t u = q.front();
      q.pop();
      for (size_t i = 0; i < g[u].size(); ++i) {
        const Arc& a = g[u][i];
        if (a.cap > 0 && prev_node[a.to] < 0) {
          prev_node[a.to] = int(u);
          prev_arc[a.to] = int(i);
          q.push(a.to);
        }
      }
    }
    if (prev_node[T] < 0) break;
    uint32_t v = T;
    while (v != S) {
      const uint32_t u = uint32_t(prev_node[v]);
      Arc& a = g[u][size_t(prev_arc[v])];
      a.cap -= 1;
      g[v][a.rev].cap += 1;
      v = u;
    }
    ++flow;
  }
  return flow;
}

LocalDensityCheck local_density_check(const Configuration& cfg, const Point& x, int64_t s,
                                      int64_t r, SurfaceBound bound, bool edge_disjoint,
                                      uint64_t volume_guard) {
  LocalDensityCheck out;
  const GraphSpec& spec = cfg.spec();
  check_point(x, spec.dim);
  if (s < 3) throw std::invalid_argument("local_density_check: s must be >= 3");
  const Region box = Region::box(Point::zero(spec.dim), r);
  if (!box.contains(x) || !is_inner_boundary(x, box, spec))
    throw std::invalid_argument("local_density_check: x must lie on the box boundary");

  // Window radius s^d, with overflow care.
  double window_d = 1.0;
  for (int i = 0; i < spec.dim; ++i) window_d *= double(s);
  if (window_d > double(kCoordLimit)) {
    out.infeasible_reason = "window radius s^d overflows the coordinate cap";
    return out;
  }
  const int64_t window = int64_t(window_d);
  if (box_size(spec.dim, window) > volume_guard) {
    out.infeasible_reason = "window volume (2 s^d + 1)^d exceeds the exploration guard";
    return out;
  }

  // Enumerate the window W = B(x, s^d) ∩ B(0,r) and its open subgraph.
  std::vector<Point> pts;
  for (const Point& p : box_points(x, window, volume_guard)) {
    if (box.contains(p)) pts.push_back(p);
  }
  PointIndexMap index(&pts);
  for (uint32_t i = 0; i < pts.size(); ++i) index.insert(pts[i], i);
  const NeighborTable& table = cfg.table();
  std::vector<std::vector<uint32_t>> adj(pts.size());
  for (uint32_t i = 0; i < pts.size(); ++i) {
    for (const Point& o : table.positive_offsets()) {
      const Point q = pts[i] + o;
      const uint32_t j = index.find(q);
      if (j == UINT32_MAX) continue;
      const int rank = table.positive_rank(o);
      if (!cfg.edge_open_offset(pts[i], rank)) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }

  // Connected components of the open subgraph; per-component counts inside
  // B(x,s) and on the box boundary within B(x,s).
  const int64_t rho = spec.connectivity == Connectivity::NearestNeighbor ? 1 : spec.range;
  const int64_t bthresh = r - rho;
  std::vector<int32_t> comp(pts.size(), -1);
  std::vector<uint64_t> comp_in_ball, comp_on_surface;
  std::vector<uint32_t> stack;
  for (uint32_t i = 0; i < pts.size(); ++i) {
    if (comp[i] >= 0) continue;
    const int32_t id = int32_t(comp_in_ball.size());
    comp_in_ball.push_back(0);
    comp_on_surface.push_back(0);
    stack.assign(1, i);
    comp[i] = id;
    while (!stack.empty()) {
      const uint32_t u = stack.back();
      stack.pop_back();
      if (linf(pts[u], x) <= s) {
        ++comp_in_ball[size_t(id)];
        if (linf(pts[u]) > bthresh) ++comp_on_surface[size_t(id)];
      }
      for (uint32_t w : adj[u]) {
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
      }
    }
  }
  for (uint32_t i = 0; i < pts.size(); ++i) {
    if (linf(pts[i], x) > s) continue;
    out.max_volume_count = std::max(out.max_volume_count, comp_in_ball[size_t(comp[i])]);
    if (linf(pts[i]) > bthresh)
      out.max_surface_count = std::max(out.max_surface_count, comp_on_surface[size_t(comp[i])]);
  }

  const double log4 = std::pow(std::log(double(s)), 4.0);
  out.volume_threshold = double(s) * double(s) * double(s) * double(s) * log4;
  out.surface_threshold =
      (bound == SurfaceBound::Squared ? double(s) * double(s)
                                      : double(s) * double(s) * double(s)) *
      log4;
  out.path_limit = int(std::pow(std::log(double(s)), 3.0));

  // Disjoint open paths from B(x,s) to the inner boundary of B(x, s^d),
  // within the box.
  std::vector<uint32_t> sources, sinks;
  for (uint32_t i = 0; i < pts.size(); ++i) {
    const int64_t dist = linf(pts[i], x);
    if (dist <= s) sources.push_back(i);
    if (dist > window - rho) sinks.push_back(i);
  }
  out.disjoint_paths = max_disjoint_paths(adj, sources, sinks, edge_disjoint);

  const bool volume_ok = double(out.max_volume_count) <= out.volume_threshold;
  const bool surface_ok = double(out.max_surface_count) <= out.surface_threshold;
  const bool paths_ok = out.disjoint_paths <= out.path_limit;
  out.outcome = (volume_ok && surface_ok && paths_ok) ? LocalDensityCheck::Outcome::Pass
                                                      : LocalDensityCheck::Outcome::Fail;
  return out;
}

RegularFractionResult regular_fraction_experiment(const GraphSpec& spec, int64_t r, int64_t K,
                                                  uint64_t M, const McOptions& opts,
                                                  SurfaceBound bound) {
  spec.validate();
  if (M < 1) throw ConfigError("regular_fraction: M must be >= 1");
  const Region box = Region::box(Point::zero(spec.dim), r);
  const Point origin = Point::zero(spec.dim);
  const bool lines = spec.connectivity == Connectivity::NearestNeighbor;

  struct Tally {
    uint64_t n = 0, event = 0, reached = 0, truncated = 0;
    uint64_t sum_pioneers = 0, sum_regular = 0, sum_line_good = 0;
    void merge(const Tally& o) {
      n += o.n;
      event += o.event;
      reached += o.reached;
      truncated += o.truncated;
      sum_pioneers += o.sum_pioneers;
      sum_regular += o.sum_regular;
      sum_line_good += o.sum_line_good;
    }
  };
  auto tally = for_each_replica<Tally>(
      opts.replica_base, opts.n, opts.workers, [&](uint64_t replica, Tally& acc) {
        Configuration cfg(spec, opts.master_seed, replica);
        const Cluster cl = explore(cfg, origin, box, opts.budget);
        ++acc.n;
        if (cl.truncated) ++acc.truncated;
        const std::vector<Point> pio = pioneers(cl);
        if (pio.empty()) return;
        ++acc.reached;
        acc.sum_pioneers += pio.size();
        RegularityReport rep = classify_regular(cl, K, bound);
        acc.sum_regular += rep.regular.size();
        if (lines) {
          line_good(cfg, rep);
          acc.sum_line_good += rep.line_good.size();
        }
        if (pio.size() >= M && 2 * rep.regular.size() <= pio.size()) ++acc.event;
      });

  RegularFractionResult res;
  res.n = tally.n;
  res.event_count = tally.event;
  res.reached_count = tally.reached;
  res.truncated = tally.truncated;
  if (tally.n > 0) {
    res.mean_pioneers = double(tally.sum_pioneers) / double(tally.n);
    res.mean_regular = double(tally.sum_regular) / double(tally.n);
    res.mean_line_good = double(tally.sum_line_good) / double(tally.n);
  }
  res.event_frequency = Estimate::bernoulli(tally.event, tally.truncated, tally.n);
  return res;
}

std::string RegularityReport::to_json() const {
  auto points_json = [](const std::vector<Point>& pts) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) os << ",";
      os << "[";
      for (int k = 0; k < pts[i].dim; ++k) {
        if (k) os << ",";
        os << pts[i].c[k];
      }
      os << "]";
    }
    os << "]";
    return os.str();
  };
  std::ostringstream os;
  os << "{\"r\":" << r << ",\"K\":" << K
     << ",\"surface_bound\":\"" << (bound == SurfaceBound::Squared ? "s2" : "s3") << "\""
     << ",\"pioneers\":" << points_json(pioneer_points) << ",\"regular\":" << points_json(regular)
     << ",\"separated_regular\":" << points_json(separated_regular)
     << ",\"line_good\":" << points_json(line_good)
     << ",\"projected_line_good\":" << points_json(projected_line_good) << ",\"failures\":[";
  for (size_t i = 0; i < failures.size(); ++i) {
    if (i) os << ",";
    os << "{\"point\":" << points_json({failures[i].x})
       << ",\"first_failing_s\":" << failures[i].first_failing_s
       << ",\"volume\":" << (failures[i].volume_failed ? "true" : "false")
       << ",\"surface\":" << (failures[i].surface_failed ? "true" : "false") << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace percap
