#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "percap/rng.hpp"

using namespace percap;

TEST_CASE("philox matches the published 4x32-10 reference vector") {
  // Known-answer test from the Random123 suite: zero counter, zero key.
  const rng::Block r = rng::philox(rng::Block{{0, 0, 0, 0}}, 0);
  CHECK(r.w[0] == 0x6627e8d5u);
  CHECK(r.w[1] == 0xe169c58du);
  CHECK(r.w[2] == 0xbc57ac4cu);
  CHECK(r.w[3] == 0x9b00dbd8u);
}

TEST_CASE("philox output is pinned for stream reproducibility") {
  const rng::Block r = rng::philox(rng::Block{{1, 2, 3, 4}}, 0x123456789abcdef0ull);
  CHECK(r.w[0] == 0x70538c98u);
  CHECK(r.w[1] == 0x18bdcc1cu);
  CHECK(r.w[2] == 0x0cbf6709u);
  CHECK(r.w[3] == 0x0bb05d21u);

  rng::Sequence seq(42);
  CHECK(seq.next_u64() == 5402353636302480526ull);
  CHECK(seq.next_u64() == 10851271320694303231ull);
  CHECK(seq.next_u64() == 910635341898791129ull);
}

TEST_CASE("sequences are deterministic and key-separated") {
  rng::Sequence a(7), b(7), c(8);
  bool all_equal = true, any_equal_cross = false;
  for (int i = 0; i < 64; ++i) {
    const uint64_t x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
    all_equal = all_equal && (x == y);
    any_equal_cross = any_equal_cross || (x == z);
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_cross);
}

TEST_CASE("unit doubles live in [0,1) and fill bins uniformly") {
  rng::Sequence seq(1234);
  const int bins = 16, n = 100000;
  int hist[16] = {0};
  for (int i = 0; i < n; ++i) {
    const double u = seq.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    hist[int(u * bins)]++;
  }
  double chi2 = 0.0;
  const double expect = double(n) / bins;
  for (int i = 0; i < bins; ++i) chi2 += (hist[i] - expect) * (hist[i] - expect) / expect;
  CHECK(chi2 < 37.7);  // chi2 0.999 quantile at 15 df: 37.70
}

TEST_CASE("next_below is in range and roughly uniform") {
  rng::Sequence seq(555);
  int hist[7] = {0};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const uint64_t v = seq.next_below(7);
    REQUIRE(v < 7);
    hist[v]++;
  }
  for (int i = 0; i < 7; ++i) CHECK(std::abs(hist[i] - n / 7) < 5 * std::sqrt(double(n) / 7));
}

TEST_CASE("digest separates nearby word streams") {
  std::set<std::pair<uint64_t, uint64_t>> seen;
  for (uint64_t i = 0; i < 2000; ++i) {
    for (uint64_t j = 0; j < 8; ++j) {
      rng::Digest d;
      d.absorb(i);
      d.absorb(j);
      seen.insert({d.lo, d.hi});
    }
  }
  CHECK(seen.size() == 2000 * 8);
}

TEST_CASE("stream keys differ across seed, replica and tag") {
  const uint64_t a = rng::stream_key(1, 0, rng::StreamTag::EdgeState);
  CHECK(a != rng::stream_key(2, 0, rng::StreamTag::EdgeState));
  CHECK(a != rng::stream_key(1, 1, rng::StreamTag::EdgeState));
  CHECK(a != rng::stream_key(1, 0, rng::StreamTag::Walk));
}
