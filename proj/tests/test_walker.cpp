#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "percap/errors.hpp"
#include "percap/oracle.hpp"
#include "percap/walker.hpp"

using namespace percap;

namespace {

ClusterGraph chain(int len) {
  // path graph 0 - 1 - ... - len-1 embedded on the first axis
  ClusterGraph g;
  for (int i = 0; i < len; ++i) g.vertices.push_back(Point::axis(1, 0, i));
  g.adj.resize(len);
  for (int i = 0; i + 1 < len; ++i) {
    g.adj[i].push_back(i + 1);
    g.adj[i + 1].push_back(i);
  }
  return g;
}

McOptions mc(uint64_t n, uint64_t seed = 1, uint64_t budget = 1000000) {
  McOptions o;
  o.n = n;
  o.budget = budget;
  o.master_seed = seed;
  o.workers = 1;
  return o;
}

double total_variation(const Measure& a, const std::map<std::vector<int64_t>, double>& b) {
  double tv = 0;
  std::map<std::vector<int64_t>, double> bb = b;
  for (size_t i = 0; i < a.support.size(); ++i) {
    const auto key = a.support[i].coords();
    const double q = bb.count(key) ? bb[key] : 0.0;
    tv += std::abs(a.weights[i] - q);
    bb.erase(key);
  }
  for (const auto& [k, v] : bb) tv += v;
  return tv / 2;
}

}  // namespace

TEST_CASE("cluster graphs carry the open adjacency") {
  Configuration open(GraphSpec::nn(2, 1.0), 0, 0);
  const Cluster cl = explore(open, Point::zero(2), Region::box(Point::zero(2), 1), 100);
  const ClusterGraph g = cluster_graph(cl);
  REQUIRE(g.vertices.size() == 9);
  uint64_t degree_total = 0;
  for (const auto& nb : g.adj) degree_total += nb.size();
  CHECK(degree_total == 24);  // 12 edges, both directions
  // symmetry
  for (uint32_t v = 0; v < g.vertices.size(); ++v) {
    for (uint32_t w : g.adj[v]) {
      CHECK(std::count(g.adj[w].begin(), g.adj[w].end(), v) == 1);
    }
  }
}

TEST_CASE("walks hit immediately when started inside the target") {
  const ClusterGraph g = chain(3);
  rng::Sequence rng(1);
  const HitRecord rec = srw_hit(g, Point::axis(1, 0, 1), {Point::axis(1, 0, 1)}, 100, rng);
  CHECK_FALSE(rec.timed_out);
  CHECK(rec.steps == 0);
  CHECK(rec.hit_point == Point::axis(1, 0, 1));
}

TEST_CASE("symmetric chain splits hits evenly") {
  // a - z - b with A = {a, b}: each side hit with probability 1/2
  const ClusterGraph g = chain(3);
  const std::vector<Point> A{Point::axis(1, 0, 0), Point::axis(1, 0, 2)};
  rng::Sequence rng(77);
  int left = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const HitRecord rec = srw_hit(g, Point::axis(1, 0, 1), A, 1000000, rng);
    REQUIRE_FALSE(rec.timed_out);
    if (rec.hit_point == A[0]) ++left;
  }
  CHECK(std::abs(double(left) / n - 0.5) < 3 * std::sqrt(0.25 / n));

  const Measure exact = exact_hit_distribution(g, Point::axis(1, 0, 1), A);
  REQUIRE(exact.support.size() == 2);
  CHECK(exact.weights[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(exact.weights[1] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("exact distribution degenerate cases and guards") {
  const ClusterGraph g = chain(4);
  const Measure self = exact_hit_distribution(g, Point::axis(1, 0, 2), {Point::axis(1, 0, 2)});
  REQUIRE(self.support.size() == 1);
  CHECK(self.weights[0] == 1.0);
  CHECK_THROWS_AS(exact_hit_distribution(g, Point::axis(1, 0, 1), {Point::axis(1, 0, 9)}),
                  std::invalid_argument);
  rng::Sequence rng(5);
  CHECK_THROWS_AS(srw_hit(g, Point::axis(1, 0, 1), {Point::axis(1, 0, 9)}, 10, rng),
                  std::invalid_argument);
}

TEST_CASE("gambler's ruin probabilities on a chain") {
  // start at position k of a chain absorbed at both ends: P(hit right) = k/(L-1)
  const int len = 6;
  const ClusterGraph g = chain(len);
  const std::vector<Point> ends{Point::axis(1, 0, 0), Point::axis(1, 0, len - 1)};
  for (int k = 1; k + 1 < len; ++k) {
    const Measure m = exact_hit_distribution(g, Point::axis(1, 0, k), ends);
    REQUIRE(m.support.size() == 2);
    CHECK(m.weights[1] == doctest::Approx(double(k) / (len - 1)).epsilon(1e-10));
  }
}

TEST_CASE("empirical walks match the exact solve on random clusters") {
  const GraphSpec spec = GraphSpec::nn(2, 0.55);
  int fixtures = 0;
  for (uint64_t seed = 0; fixtures < 10 && seed < 200; ++seed) {
    Configuration cfg(spec, 900 + seed, 0);
    const Cluster cl = explore(cfg, Point::zero(2), Region::box(Point::zero(2), 3), 1000);
    if (cl.vertices.size() < 6 || cl.vertices.size() > 50) continue;
    const ClusterGraph g = cluster_graph(cl);
    // absorb on up to three spread-out cluster vertices
    std::vector<Point> A{cl.vertices.back()};
    if (cl.vertices.size() > 10) A.push_back(cl.vertices[cl.vertices.size() / 2]);
    const Measure exact = exact_hit_distribution(g, Point::zero(2), A);

    const int n_walks = 4000;
    std::map<std::vector<int64_t>, double> freq;
    rng::Sequence rng(seed);
    for (int i = 0; i < n_walks; ++i) {
      const HitRecord rec = srw_hit(g, Point::zero(2), A, 1000000, rng);
      REQUIRE_FALSE(rec.timed_out);
      freq[rec.hit_point.coords()] += 1.0 / n_walks;
    }
    CHECK(total_variation(exact, freq) <= 4 * std::sqrt(double(A.size()) / n_walks));
    ++fixtures;
  }
  CHECK(fixtures == 10);
}

TEST_CASE("walk-based equilibrium: single point reduces to the pcap ratio") {
  const GraphSpec spec = GraphSpec::nn(2, 0.4);
  EquilibriumOptions eo;
  eo.mc = mc(120000, 33);
  const EquilibriumResult eq =
      estimate_equilibrium(spec, {Point::zero(2)}, Point::of({3, 0}), eo);
  const RatioEstimate ref = estimate_pcap(spec, {Point::zero(2)}, Point::of({3, 0}), mc(120000, 34));
  REQUIRE(eq.e.size() == 1);
  CHECK(std::abs(eq.e[0].ratio - ref.ratio) <=
        3 * pooled_se(eq.e[0].std_error, ref.std_error));
  CHECK(eq.walk_timeouts == 0);
}

TEST_CASE("mirror-symmetric two-point targets get equal equilibrium mass") {
  const GraphSpec spec = GraphSpec::nn(2, 0.45);
  const std::vector<Point> A{Point::of({0, 1}), Point::of({0, -1})};
  EquilibriumOptions eo;
  eo.mc = mc(200000, 35);
  const EquilibriumResult eq = estimate_equilibrium(spec, A, Point::of({4, 0}), eo);
  REQUIRE(eq.e.size() == 2);
  CHECK(std::abs(eq.e[0].ratio - eq.e[1].ratio) <=
        3 * pooled_se(eq.e[0].std_error, eq.e[1].std_error));
}

TEST_CASE("equilibrium mass sums to the capacity ratio") {
  const GraphSpec spec = GraphSpec::nn(2, 0.45);
  const std::vector<Point> A{Point::zero(2), Point::of({1, 0}), Point::of({0, 1})};
  const Point z = Point::of({4, 0});
  EquilibriumOptions eo;
  eo.mc = mc(200000, 36);
  const EquilibriumResult eq = estimate_equilibrium(spec, A, z, eo);
  const RatioEstimate cap = estimate_pcap(spec, A, z, mc(200000, 37));
  CHECK(std::abs(eq.sum.ratio - cap.ratio) <= 3 * pooled_se(eq.sum.std_error, cap.std_error));

  // ordering variant: the same sum identity, plus ordering independence
  const EquilibriumResult ord1 = ordering_equilibrium(spec, A, z, mc(200000, 38));
  CHECK(std::abs(ord1.sum.ratio - cap.ratio) <=
        3 * pooled_se(ord1.sum.std_error, cap.std_error));
  std::vector<Point> reversed(A.rbegin(), A.rend());
  const EquilibriumResult ord2 = ordering_equilibrium(spec, reversed, z, mc(200000, 39));
  CHECK(std::abs(ord1.sum.ratio - ord2.sum.ratio) <=
        3 * pooled_se(ord1.sum.std_error, ord2.sum.std_error));

  // k = 1 ordering is the single-point capacity ratio, consistent with 1
  const EquilibriumResult single =
      ordering_equilibrium(spec, {Point::zero(2)}, Point::of({3, 0}), mc(200000, 40));
  CHECK(std::abs(single.e[0].ratio - 1.0) <= 3 * single.e[0].std_error);
}

TEST_CASE("rejection sampler accepts immediately at p=1") {
  const IicSample s =
      iic_sample(GraphSpec::nn(2, 1.0), Point::zero(2), Point::of({3, 0}), 100000, 10, 1);
  CHECK_FALSE(s.exhausted);
  CHECK(s.attempts == 1);
  CHECK(s.cluster.contains(Point::of({3, 0})));
}

TEST_CASE("rejection acceptance rate estimates the two-point function") {
  const GraphSpec spec = GraphSpec::nn(2, 0.45);
  const Point z = Point::zero(2);
  const Point w = Point::of({2, 0});
  uint64_t attempts = 0, accepted = 0;
  uint64_t replica = 0;
  for (int k = 0; k < 400; ++k) {
    const IicSample s = iic_sample(spec, z, w, 100000, 100000, 77, replica);
    REQUIRE_FALSE(s.exhausted);
    attempts += s.attempts;
    accepted += 1;
    replica += s.attempts;
  }
  const double rate = double(accepted) / double(attempts);
  const Estimate tau = estimate_tau(spec, w, mc(200000, 78));
  const double se = std::sqrt(tau.value * (1 - tau.value) / double(attempts));
  CHECK(std::abs(rate - tau.value) <= 3 * pooled_se(se, tau.std_error));
}

TEST_CASE("conditioned local statistics match the exhaustive oracle") {
  // tiny 3x3 box: law of C(0) given 0 <-> (1,1) inside the box
  const GraphSpec spec = GraphSpec::nn(2, 0.5);
  const Region box = Region::box(Point::zero(2), 1);
  const Point w = Point::of({1, 1});

  const auto graph = oracle::build_tiny_graph(spec, box);
  oracle::Request req;
  req.source = Point::zero(2);
  req.targets = {w};
  req.feature_edge = canonical_edge(Point::zero(2), Point::of({1, 0}), spec);
  req.cluster_law = true;
  req.cluster_law_conditional = true;
  const auto exact = oracle::enumerate(graph, req);

  // sample accepted clusters; count the designated open edge and the shapes
  const uint64_t samples = 4000;
  uint64_t feature_open = 0;
  std::map<uint64_t, uint64_t> shape_counts;
  uint64_t replica = 0;
  auto shape_mask = [&](const Cluster& cl) {
    uint64_t m = 0;
    for (const Point& v : cl.vertices) {
      const auto it = std::lower_bound(graph.points.begin(), graph.points.end(), v);
      m |= uint64_t(1) << uint64_t(it - graph.points.begin());
    }
    return m;
  };
  for (uint64_t k = 0; k < samples; ++k) {
    const IicSample s = iic_sample(spec, Point::zero(2), w, 100000, 1000000, 555, replica, box);
    REQUIRE_FALSE(s.exhausted);
    replica += s.attempts;
    shape_counts[shape_mask(s.cluster)] += 1;
    // designated edge open iff the cluster's edge list contains it
    bool open = false;
    for (const auto& [a, b] : s.cluster.open_edges) {
      if ((s.cluster.vertices[a] == req.feature_edge->a &&
           s.cluster.vertices[b] == req.feature_edge->b) ||
          (s.cluster.vertices[a] == req.feature_edge->b &&
           s.cluster.vertices[b] == req.feature_edge->a))
        open = true;
    }
    if (open) ++feature_open;
  }
  const double phat = double(feature_open) / double(samples);
  const double p0 = exact.p_feature_given_connect;
  CHECK(std::abs(phat - p0) <= 3 * std::sqrt(p0 * (1 - p0) / double(samples)));

  // chi-square on the shape law at the 1% level, merging thin cells
  std::map<uint64_t, double> expected;
  for (const auto& [mask, prob] : exact.cluster_law) expected[mask] = prob * double(samples);
  double chi2 = 0, thin_obs = 0, thin_exp = 0;
  int df = -1;
  for (const auto& [mask, expect] : expected) {
    const double obs = shape_counts.count(mask) ? double(shape_counts[mask]) : 0.0;
    if (expect < 10) {
      thin_obs += obs;
      thin_exp += expect;
      continue;
    }
    chi2 += (obs - expect) * (obs - expect) / expect;
    ++df;
  }
  if (thin_exp > 0) {
    chi2 += (thin_obs - thin_exp) * (thin_obs - thin_exp) / thin_exp;
    ++df;
  }
  REQUIRE(df >= 1);
  // 1% critical values for df up to 40
  auto crit = [](int k) {
    const double table[] = {6.63,  9.21,  11.34, 13.28, 15.09, 16.81, 18.48, 20.09,
                            21.67, 23.21, 24.72, 26.22, 27.69, 29.14, 30.58, 32.00,
                            33.41, 34.81, 36.19, 37.57, 38.93, 40.29, 41.64, 42.98,
                            44.31, 45.64, 46.96, 48.28, 49.59, 50.89};
    return k <= 30 ? table[k - 1] : 60.0;
  };
  CHECK(chi2 < crit(df));
}

TEST_CASE("iic hit scaling degenerate case and the underpowered guard") {
  const GraphSpec spec = GraphSpec::nn(2, 0.45);
  // A containing z itself: every accepted cluster hits, frequency exactly 1
  McOptions opts = mc(20000, 91, 100000);
  const Point z = Point::of({2, 0});
  const IicHitResult res = estimate_iic_hit(spec, {z}, z, 4, opts);
  CHECK(res.frequency == 1.0);
  CHECK(res.scaled_value == doctest::Approx(res.scale));
  CHECK(res.accepted >= 100);

  McOptions tiny = mc(50, 92, 100000);
  CHECK_THROWS_AS(estimate_iic_hit(spec, {Point::zero(2)}, z, 4, tiny), UnderpoweredError);
  CHECK_THROWS_AS(estimate_iic_hit(spec, {Point::zero(2)}, Point::of({1, 0}), 4, mc(100)),
                  ConfigError);  // |z| below 2 diam + 2
}

TEST_CASE("iic hit frequency is monotone under target growth") {
  const GraphSpec spec = GraphSpec::nn(2, 0.45);
  McOptions opts = mc(30000, 93, 100000);
  const Point z = Point::of({4, 0});
  const IicHitResult small = estimate_iic_hit(spec, {Point::zero(2)}, z, 5, opts);
  const IicHitResult large =
      estimate_iic_hit(spec, {Point::zero(2), Point::of({0, 1})}, z, 5, opts);
  CHECK(large.frequency + 3 * pooled_se(large.frequency_se, small.frequency_se) >=
        small.frequency);
}
