#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "percap/regularity.hpp"

using namespace percap;

namespace {

// Synthetic box cluster for threshold arithmetic tests.
Cluster fixture_cluster(const GraphSpec& spec, int64_t r, std::vector<Point> vertices) {
  Cluster c;
  c.spec = spec;
  c.origin = vertices.front();
  c.region = Region::box(Point::zero(spec.dim), r);
  c.vertices = std::move(vertices);
  return c;
}

// Exhaustive Menger dual on tiny graphs: the maximum number of pairwise
// vertex-disjoint S-T paths equals the minimum size of a vertex set (sources
// and sinks removable too) whose deletion separates S from T.
int brute_force_min_vertex_cut(const std::vector<std::vector<uint32_t>>& adj,
                               const std::vector<uint32_t>& sources,
                               const std::vector<uint32_t>& sinks) {
  const uint32_t n = uint32_t(adj.size());
  REQUIRE(n <= 20);
  auto separated = [&](uint32_t removed_mask) {
    std::vector<char> seen(n, 0);
    std::vector<uint32_t> stack;
    for (uint32_t s : sources) {
      if (!(removed_mask & (1u << s)) && !seen[s]) {
        seen[s] = 1;
        stack.push_back(s);
      }
    }
    while (!stack.empty()) {
      const uint32_t v = stack.back();
      stack.pop_back();
      for (uint32_t w : adj[v]) {
        if ((removed_mask & (1u << w)) || seen[w]) continue;
        seen[w] = 1;
        stack.push_back(w);
      }
    }
    for (uint32_t t : sinks) {
      if (!(removed_mask & (1u << t)) && seen[t]) return false;
    }
    return true;
  };
  int best = int(n);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size >= best) continue;
    if (separated(mask)) best = size;
  }
  return best;
}

}  // namespace

TEST_CASE("density thresholds at s=3 match direct arithmetic") {
  const GraphSpec spec = GraphSpec::nn(11, 0.05);
  const int64_t r = 8;
  Point x = Point::axis(11, 0, r);

  // a singleton pioneer passes every scale
  Cluster single = fixture_cluster(spec, r, {x});
  for (int64_t s = 3; s <= 6; ++s) CHECK(density_check(single, x, s).pass);

  // 200 cluster points inside B(x,3): the s=3 volume threshold is
  // 3^4 (ln 3)^7 = 156.46, so the volume condition fails
  std::vector<Point> packed{x};
  for (int64_t a = 1; a <= 3 && packed.size() < 200; ++a) {
    for (int64_t b = -3; b <= 3 && packed.size() < 200; ++b) {
      for (int64_t c = -3; c <= 3 && packed.size() < 200; ++c) {
        for (int64_t e = -3; e <= 3 && packed.size() < 200; ++e) {
          Point p = x;
          p.c[0] -= a;
          p.c[1] = b;
          p.c[2] = c;
          p.c[3] = e;
          if (!(p == x)) packed.push_back(p);
        }
      }
    }
  }
  REQUIRE(packed.size() == 200);
  Cluster dense = fixture_cluster(spec, r, packed);
  const DensityCheck d3 = density_check(dense, x, 3);
  CHECK(d3.volume_count == 200);
  CHECK(d3.volume_threshold == doctest::Approx(156.459).epsilon(1e-3));
  CHECK_FALSE(d3.volume_ok);
  CHECK_FALSE(d3.pass);

  // 15 boundary points in B(x,3) pass the surface condition (17.38), 18 fail
  auto boundary_fixture = [&](int count) {
    std::vector<Point> pts{x};
    for (int i = 1; i < count; ++i) {
      Point p = x;  // stay on the face x0 = r
      p.c[1] = (i % 7) - 3;
      p.c[2] = (i / 7) - 1;
      pts.push_back(p);
    }
    return fixture_cluster(spec, r, pts);
  };
  CHECK(density_check(boundary_fixture(15), x, 3).pass);
  const DensityCheck d18 = density_check(boundary_fixture(18), x, 3);
  CHECK_FALSE(d18.surface_ok);
  CHECK(d18.volume_ok);

  // the weaker s^3 variant tolerates 18 boundary points (threshold 52.2)
  CHECK(density_check(boundary_fixture(18), x, 3, SurfaceBound::Cubed).pass);

  CHECK_THROWS_AS(density_check(single, x, 2), std::invalid_argument);
}

TEST_CASE("classification of fixtures and degenerate clusters") {
  const GraphSpec spec = GraphSpec::nn(2, 0.0);
  // p = 0: cluster of the origin has no pioneers
  Configuration closed(spec, 0, 0);
  const Cluster none = explore(closed, Point::zero(2), Region::box(Point::zero(2), 4), 1000);
  const RegularityReport rep = classify_regular(none, 3);
  CHECK(rep.pioneer_points.empty());
  CHECK(rep.regular.empty());
  CHECK(rep.separated_regular.empty());

  // a singleton pioneer is regular for any K
  const GraphSpec spec11 = GraphSpec::nn(11, 0.05);
  Point x = Point::axis(11, 0, 8);
  Cluster single = fixture_cluster(spec11, 8, {x});
  const RegularityReport srep = classify_regular(single, 4);
  CHECK(srep.regular == std::vector<Point>{x});

  // the packed fixture is irregular with first failing scale 3
  std::vector<Point> packed{x};
  for (int64_t b = -3; b <= 3; ++b) {
    for (int64_t c = -3; c <= 3; ++c) {
      for (int64_t e = -2; e <= 2 && packed.size() < 200; ++e) {
        Point p = x;
        p.c[0] -= 1 + ((b + c + e) & 1);
        p.c[1] = b;
        p.c[2] = c;
        p.c[3] = e;
        if (std::find(packed.begin(), packed.end(), p) == packed.end()) packed.push_back(p);
      }
    }
  }
  while (packed.size() < 200) {
    Point p = x;
    p.c[0] -= 3;
    p.c[1] = int64_t(packed.size() % 7) - 3;
    p.c[2] = int64_t(packed.size() / 7 % 7) - 3;
    p.c[3] = 3;
    if (std::find(packed.begin(), packed.end(), p) == packed.end())
      packed.push_back(p);
    else
      break;
  }
  if (packed.size() >= 180) {
    Cluster dense = fixture_cluster(spec11, 8, packed);
    const RegularityReport drep = classify_regular(dense, 3);
    const bool x_regular =
        std::find(drep.regular.begin(), drep.regular.end(), x) != drep.regular.end();
    if (packed.size() >= 157) {
      CHECK_FALSE(x_regular);
      bool found = false;
      for (const auto& f : drep.failures) {
        if (f.x == x) {
          found = true;
          CHECK(f.first_failing_s == 3);
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("regularity is monotone in K and the separated subset is maximal") {
  const GraphSpec spec = GraphSpec::nn(2, 0.55);
  const Region box = Region::box(Point::zero(2), 6);
  for (uint64_t rep = 0; rep < 400; ++rep) {
    Configuration cfg(spec, 42, rep);
    const Cluster cl = explore(cfg, Point::zero(2), box, 100000);
    if (pioneers(cl).empty()) continue;
    const RegularityReport r3 = classify_regular(cl, 3);
    const RegularityReport r5 = classify_regular(cl, 5);
    std::set<std::vector<int64_t>> reg5;
    for (const Point& p : r5.regular) reg5.insert(p.coords());
    for (const Point& p : r3.regular) CHECK(reg5.count(p.coords()));

    // maximality: every regular point sits within 2K of some selected point
    for (const Point& p : r3.regular) {
      bool covered = false;
      for (const Point& q : r3.separated_regular) {
        if (linf(p, q) < 2 * 3) covered = true;
      }
      CHECK(covered);
    }
    for (size_t i = 0; i < r3.separated_regular.size(); ++i) {
      for (size_t j = i + 1; j < r3.separated_regular.size(); ++j)
        CHECK(linf(r3.separated_regular[i], r3.separated_regular[j]) >= 2 * 3);
    }
  }
}

TEST_CASE("line-good points: degenerate probabilities and the binomial rate") {
  const int64_t r = 6, K = 3;
  const Region box = Region::box(Point::zero(2), r);

  // p = 1: every separated regular point is line-good
  Configuration open(GraphSpec::nn(2, 1.0), 0, 0);
  const Cluster full = explore(open, Point::zero(2), box, 100000);
  RegularityReport rep = classify_regular(full, K);
  line_good(open, rep);
  CHECK(rep.line_good.size() == rep.separated_regular.size());
  CHECK(rep.projected_line_good.size() == rep.line_good.size());
  for (const Point& p : rep.projected_line_good) CHECK(linf(p) == r + K);

  // the fraction of line-good points concentrates at p^K
  const double p = 0.55;
  const GraphSpec spec = GraphSpec::nn(2, p);
  uint64_t separated = 0, good = 0;
  for (uint64_t seed = 0; seed < 4000; ++seed) {
    Configuration cfg(spec, 7, seed);
    const Cluster cl = explore(cfg, Point::zero(2), box, 100000);
    if (pioneers(cl).empty()) continue;
    RegularityReport rr = classify_regular(cl, K);
    line_good(cfg, rr);
    separated += rr.separated_regular.size();
    good += rr.line_good.size();
  }
  REQUIRE(separated > 500);
  const double expect = std::pow(p, double(K));
  const double frac = double(good) / double(separated);
  CHECK(std::abs(frac - expect) <= 3 * std::sqrt(expect * (1 - expect) / double(separated)));

  Configuration so(GraphSpec::spread_out(2, 1, 0.5), 0, 0);
  RegularityReport dummy;
  CHECK_THROWS_AS(line_good(so, dummy), std::invalid_argument);
}

TEST_CASE("disjoint path counter matches the exhaustive Menger dual") {
  // path graph: one path
  std::vector<std::vector<uint32_t>> path{{1}, {0, 2}, {1, 3}, {2}};
  CHECK(max_disjoint_paths(path, {0}, {3}) == 1);
  CHECK(max_disjoint_paths(path, {0}, {3}, true) == 1);  // edge-disjoint variant

  // three parallel chains with distinct starts and ends
  std::vector<std::vector<uint32_t>> three(9);
  auto link = [&](uint32_t a, uint32_t b) {
    three[a].push_back(b);
    three[b].push_back(a);
  };
  link(0, 3);
  link(3, 6);
  link(1, 4);
  link(4, 7);
  link(2, 5);
  link(5, 8);
  CHECK(max_disjoint_paths(three, {0, 1, 2}, {6, 7, 8}) == 3);

  // a shared mid-vertex collapses the three chains to one path
  std::vector<std::vector<uint32_t>> pinched(7);
  auto plink = [&](uint32_t a, uint32_t b) {
    pinched[a].push_back(b);
    pinched[b].push_back(a);
  };
  plink(0, 3);
  plink(1, 3);
  plink(2, 3);
  plink(3, 4);
  plink(3, 5);
  plink(3, 6);
  CHECK(max_disjoint_paths(pinched, {0, 1, 2}, {4, 5, 6}) == 1);

  // randomized cross-check on graphs of up to 12 vertices
  rng::Sequence seq(31337);
  int nontrivial = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const uint32_t n = 5 + uint32_t(seq.next_below(8));
    std::vector<std::vector<uint32_t>> adj(n);
    for (uint32_t i = 0; i < n; ++i) {
      for (uint32_t j = i + 1; j < n; ++j) {
        if (seq.next_unit() < 0.3) {
          adj[i].push_back(j);
          adj[j].push_back(i);
        }
      }
    }
    std::vector<uint32_t> sources{0}, sinks{n - 1};
    if (seq.next_unit() < 0.5 && n > 6) {
      sources.push_back(1);
      sinks.push_back(n - 2);
    }
    const int expect = brute_force_min_vertex_cut(adj, sources, sinks);
    CHECK(max_disjoint_paths(adj, sources, sinks) == expect);
    if (expect >= 2) ++nontrivial;
  }
  CHECK(nontrivial > 10);
}

TEST_CASE("local density outcomes") {
  // p = 0: all window clusters are singletons, no crossings
  Configuration closed(GraphSpec::nn(2, 0.0), 0, 0);
  const LocalDensityCheck clean = local_density_check(closed, Point::of({6, 0}), 3, 6);
  CHECK(clean.pass());
  CHECK(clean.disjoint_paths == 0);

  // p = 1 floods the window: the path condition fails
  Configuration open(GraphSpec::nn(2, 1.0), 0, 0);
  const LocalDensityCheck flooded = local_density_check(open, Point::of({6, 0}), 3, 6);
  CHECK(flooded.outcome == LocalDensityCheck::Outcome::Fail);
  CHECK(flooded.disjoint_paths > flooded.path_limit);

  // oversized window in high dimension is infeasible, not a failure
  Configuration big(GraphSpec::nn(11, 0.05), 0, 0);
  const LocalDensityCheck guard = local_density_check(big, Point::axis(11, 0, 8), 3, 8);
  CHECK(guard.outcome == LocalDensityCheck::Outcome::Infeasible);
}

TEST_CASE("local density implies the global density condition on fixtures") {
  // d=2 and d=3 random instances: whenever the local condition passes at
  // s=3 for a pioneer, the global condition passes at the same scale
  for (const GraphSpec spec : {GraphSpec::nn(2, 0.55), GraphSpec::nn(3, 0.35)}) {
    const int64_t r = 5;
    const Region box = Region::box(Point::zero(spec.dim), r);
    int checked = 0;
    for (uint64_t seed = 0; seed < 120 && checked < 60; ++seed) {
      Configuration cfg(spec, 1000 + seed, 0);
      const Cluster cl = explore(cfg, Point::zero(spec.dim), box, 100000);
      for (const Point& x : pioneers(cl)) {
        const LocalDensityCheck loc = local_density_check(cfg, x, 3, r);
        if (loc.outcome != LocalDensityCheck::Outcome::Pass) continue;
        CHECK(density_check(cl, x, 3).pass);
        ++checked;
      }
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("regular fraction experiment basics") {
  // p = 0: the event X_r >= M never happens
  const RegularFractionResult zero = regular_fraction_experiment(
      GraphSpec::nn(2, 0.0), 5, 3, 1, [] {
        McOptions o;
        o.n = 200;
        o.master_seed = 1;
        return o;
      }());
  CHECK(zero.event_frequency.value == 0.0);
  CHECK(zero.mean_pioneers == 0.0);

  // frequencies are nonincreasing in M (same seed)
  McOptions o;
  o.n = 3000;
  o.master_seed = 21;
  const GraphSpec spec = GraphSpec::nn(2, 0.55);
  const double f1 = regular_fraction_experiment(spec, 5, 3, 1, o).event_frequency.value;
  const double f2 = regular_fraction_experiment(spec, 5, 3, 4, o).event_frequency.value;
  const double f3 = regular_fraction_experiment(spec, 5, 3, 8, o).event_frequency.value;
  CHECK(f2 <= f1 + 1e-12);
  CHECK(f3 <= f2 + 1e-12);
}

TEST_CASE("report serializes to JSON") {
  Configuration open(GraphSpec::nn(2, 1.0), 0, 0);
  const Cluster full = explore(open, Point::zero(2), Region::box(Point::zero(2), 3), 1000);
  RegularityReport rep = classify_regular(full, 3);
  line_good(open, rep);
  const std::string js = rep.to_json();
  CHECK(js.find("\"pioneers\"") != std::string::npos);
  CHECK(js.find("\"line_good\"") != std::string::npos);
}
