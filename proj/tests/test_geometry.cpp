#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "percap/geometry.hpp"
#include "percap/rng.hpp"

using namespace percap;

namespace {

std::set<std::vector<int64_t>> as_set(const std::vector<Point>& pts) {
  std::set<std::vector<int64_t>> s;
  for (const Point& p : pts) s.insert(p.coords());
  return s;
}

}  // namespace

TEST_CASE("nearest-neighbor adjacency in d=2") {
  const GraphSpec spec = GraphSpec::nn(2, 0.5);
  const auto nb = neighbors(Point::of({0, 0}), spec);
  CHECK(nb.size() == 4);
  CHECK(as_set(nb) == as_set({Point::of({1, 0}), Point::of({-1, 0}), Point::of({0, 1}),
                              Point::of({0, -1})}));
}

TEST_CASE("spread-out adjacency counts") {
  CHECK(neighbors(Point::zero(2), GraphSpec::spread_out(2, 1, 0.5)).size() == 8);
  // (2*2+1)^7 - 1 = 78124, counted by enumerating offsets
  const auto nb = neighbors(Point::zero(7), GraphSpec::spread_out(7, 2, 0.1));
  CHECK(nb.size() == 78124);
  std::set<std::vector<int64_t>> uniq = as_set(nb);
  CHECK(uniq.size() == nb.size());
  for (const Point& p : nb) {
    CHECK(linf(p) <= 2);
    CHECK(linf(p) >= 1);
  }
}

TEST_CASE("nearest neighbor is not spread-out range 1") {
  // spread-out range 1 includes diagonals
  const auto nn = neighbors(Point::zero(2), GraphSpec::nn(2, 0.5));
  const auto so = neighbors(Point::zero(2), GraphSpec::spread_out(2, 1, 0.5));
  CHECK(nn.size() == 4);
  CHECK(so.size() == 8);
}

TEST_CASE("neighbor order is deterministic and lexicographic") {
  const auto nb = neighbors(Point::zero(2), GraphSpec::nn(2, 0.5));
  CHECK(std::is_sorted(nb.begin(), nb.end()));
  const auto so = neighbors(Point::zero(3), GraphSpec::spread_out(3, 2, 0.5));
  CHECK(std::is_sorted(so.begin(), so.end()));
}

TEST_CASE("neighbor symmetry on random pairs") {
  rng::Sequence seq(2024);
  for (const GraphSpec& spec :
       {GraphSpec::nn(3, 0.5), GraphSpec::spread_out(3, 2, 0.5), GraphSpec::nn(7, 0.1)}) {
    for (int trial = 0; trial < 3000; ++trial) {
      Point x = Point::zero(spec.dim);
      for (int i = 0; i < spec.dim; ++i) x.c[i] = int64_t(seq.next_below(41)) - 20;
      const auto nb = neighbors(x, spec);
      const Point y = nb[size_t(seq.next_below(nb.size()))];
      const auto back = neighbors(y, spec);
      CHECK(std::find(back.begin(), back.end(), x) != back.end());
    }
  }
}

TEST_CASE("degree matches the spec formula") {
  CHECK(GraphSpec::nn(11, 0.1).degree() == 22);
  CHECK(GraphSpec::spread_out(4, 3, 0.1).degree() == 7 * 7 * 7 * 7 - 1);
}

TEST_CASE("inner boundary of a box") {
  const GraphSpec nn = GraphSpec::nn(2, 0.5);
  const Region box = Region::box(Point::zero(2), 3);
  CHECK(is_inner_boundary(Point::of({3, 0}), box, nn));
  CHECK_FALSE(is_inner_boundary(Point::of({2, 0}), box, nn));
  // spread-out range 2: (2,0) has the neighbor (4,0) outside
  CHECK(is_inner_boundary(Point::of({2, 0}), box, GraphSpec::spread_out(2, 2, 0.5)));
  CHECK_THROWS_AS(is_inner_boundary(Point::of({4, 0}), box, nn), std::invalid_argument);
}

TEST_CASE("inner boundary shortcut agrees with offset enumeration") {
  rng::Sequence seq(77);
  for (const GraphSpec& spec : {GraphSpec::nn(3, 0.5), GraphSpec::spread_out(3, 2, 0.5)}) {
    const Region box = Region::box(Point::of({1, -2, 0}), 4);
    const NeighborTable table(spec);
    for (int trial = 0; trial < 500; ++trial) {
      Point x = box.center;
      for (int i = 0; i < 3; ++i) x.c[i] += int64_t(seq.next_below(9)) - 4;
      bool manual = false;
      for (const Point& o : table.offsets()) {
        if (!box.contains(x + o)) manual = true;
      }
      CHECK(is_inner_boundary(x, box, spec) == manual);
    }
  }
}

TEST_CASE("surface patch on a box") {
  const GraphSpec nn = GraphSpec::nn(2, 0.5);
  const Region box = Region::box(Point::zero(2), 3);
  const auto patch = surface_patch(Point::of({3, 0}), 1, box, nn);
  CHECK(as_set(patch) ==
        as_set({Point::of({3, -1}), Point::of({3, 0}), Point::of({3, 1})}));

  // s = 0 collapses to the point itself
  const auto self_only = surface_patch(Point::of({3, 0}), 0, box, nn);
  CHECK(as_set(self_only) == as_set({Point::of({3, 0})}));

  // s >= 2r saturates to the whole boundary (8 points for r=1)
  const Region small = Region::box(Point::zero(2), 1);
  CHECK(surface_patch(Point::of({1, 0}), 2, small, nn).size() == 8);
}

TEST_CASE("surface patch is monotone in s") {
  const GraphSpec nn = GraphSpec::nn(3, 0.5);
  const Region box = Region::box(Point::zero(3), 4);
  const Point x = Point::of({4, 1, -2});
  for (int64_t s = 0; s < 5; ++s) {
    const auto small = as_set(surface_patch(x, s, box, nn));
    const auto large = as_set(surface_patch(x, s + 1, box, nn));
    CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
}

TEST_CASE("surface patch on a half-space: thin vs graph boundary") {
  const Region half = Region::half_space(0, 0);
  const Point x = Point::of({0, 5, 5});
  const auto thin = surface_patch(x, 2, half, GraphSpec::spread_out(3, 2, 0.5), true);
  for (const Point& y : thin) CHECK(y.c[0] == 0);
  CHECK(thin.size() == 25);
  const auto thick = surface_patch(x, 2, half, GraphSpec::spread_out(3, 2, 0.5), false);
  CHECK(thick.size() == 50);  // layers x0 = 0 and x0 = 1 within reach of outside
}

TEST_CASE("region membership") {
  const Region ann = Region::annulus(Point::zero(2), 2, 4);
  CHECK_FALSE(ann.contains(Point::of({2, 0})));
  CHECK(ann.contains(Point::of({3, 0})));
  CHECK(ann.contains(Point::of({4, 4})));
  CHECK_FALSE(ann.contains(Point::of({5, 0})));
  const Region comp = Region::box_complement(Point::zero(2), 2);
  CHECK(comp.contains(Point::of({3, 0})));
  CHECK_FALSE(comp.contains(Point::of({2, 2})));
}

TEST_CASE("coordinate cap is enforced") {
  Point p = Point::zero(2);
  p.c[0] = kCoordLimit + 1;
  CHECK_THROWS_AS(check_point(p, 2), std::invalid_argument);
  CHECK_THROWS_AS(neighbors(p, GraphSpec::nn(2, 0.5)), std::invalid_argument);
}

TEST_CASE("canonical edges are order-free") {
  const GraphSpec spec = GraphSpec::nn(2, 0.5);
  const Edge e1 = canonical_edge(Point::of({0, 0}), Point::of({1, 0}), spec);
  const Edge e2 = canonical_edge(Point::of({1, 0}), Point::of({0, 0}), spec);
  CHECK(e1.a == e2.a);
  CHECK(e1.b == e2.b);
  CHECK_THROWS_AS(canonical_edge(Point::of({0, 0}), Point::of({2, 0}), spec),
                  std::invalid_argument);
}

TEST_CASE("box enumeration size and order") {
  const auto pts = box_points(Point::zero(2), 1, 100);
  CHECK(pts.size() == 9);
  CHECK(std::is_sorted(pts.begin(), pts.end()));
  CHECK(box_size(7, 4) == 4782969);
  CHECK_THROWS_AS(box_points(Point::zero(7), 4, 1000), std::invalid_argument);
}
