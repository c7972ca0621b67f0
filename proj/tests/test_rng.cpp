#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "powertalk/rng.hpp"

using namespace powertalk;

TEST_SUITE("rng") {

TEST_CASE("same seed and label reproduce the stream") {
  Rng a = derive_substream(42, "run:3/node:1");
  Rng b = derive_substream(42, "run:3/node:1");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different labels give different streams") {
  Rng a = derive_substream(42, "node:0");
  Rng b = derive_substream(42, "node:1");
  Rng c = derive_substream(43, "node:0");
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    if (va == b.next_u64()) ++same_ab;
    if (va == c.next_u64()) ++same_ac;
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("label hash is FNV-1a") {
  CHECK(hash_label("") == 0xcbf29ce484222325ull);
  CHECK(hash_label("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hash_label("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("key children compose labels with slashes") {
  RngKey key{42, ""};
  RngKey child = key.child("run:3");
  CHECK(child.label_for("node:1") == "run:3/node:1");
  Rng direct = derive_substream(42, "run:3/node:1");
  Rng via_key = child.stream("node:1");
  for (int i = 0; i < 16; ++i) CHECK(direct.next_u64() == via_key.next_u64());
}

TEST_CASE("uniform stays in the half-open unit interval") {
  Rng rng = derive_substream(7, "uniform");
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u < 3.0);
  }
}

TEST_CASE("below covers every residue and respects the bound") {
  Rng rng = derive_substream(7, "below");
  std::vector<int> hits(6, 0);
  for (int i = 0; i < 6000; ++i) {
    const std::uint64_t v = rng.below(6);
    REQUIRE(v < 6);
    ++hits[static_cast<std::size_t>(v)];
  }
  for (int h : hits) CHECK(h > 0);
}

TEST_CASE("byte-level uniformity passes a chi-square check") {
  Rng rng = derive_substream(2024, "chi");
  constexpr int kBins = 64;
  constexpr int kDraws = 64000;
  std::vector<int> counts(kBins, 0);
  for (int i = 0; i < kDraws; ++i) ++counts[static_cast<std::size_t>(rng.below(kBins))];
  const double expected = static_cast<double>(kDraws) / kBins;
  double chi2 = 0.0;
  for (int c : counts) {
    const double d = c - expected;
    chi2 += d * d / expected;
  }
  // 63 degrees of freedom; 110 is far into the tail.
  CHECK(chi2 < 110.0);
}

TEST_CASE("normal draws have the requested moments") {
  Rng rng = derive_substream(11, "normal");
  constexpr int kDraws = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double x = rng.normal(0.0, 1.0);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / kDraws;
  const double stddev = std::sqrt(sum_sq / kDraws - mean * mean);
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(stddev - 1.0) < 0.01);
  Rng shifted = derive_substream(11, "normal-shifted");
  double s = 0.0;
  for (int i = 0; i < 10000; ++i) s += shifted.normal(5.0, 0.25);
  CHECK(std::abs(s / 10000 - 5.0) < 0.02);
}

}  // TEST_SUITE
