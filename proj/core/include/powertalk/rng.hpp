#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace powertalk {

// Deterministic random number generation.
//
// Reproducibility is part of the simulator's contract: a scenario re-run with
// the same seed must produce byte-identical outputs, and results must not
// depend on the order in which logical nodes or Monte Carlo runs execute.
// To get that, every consumer draws from its own substream, derived from the
// master seed and a human-readable label ("run:17/node:3").  The generator
// and the derivation are pinned algorithms, not stdlib distributions, so the
// stream contents never change behind our back.
//
// Pinned construction:
//   * label hash      : FNV-1a 64-bit over the label bytes
//   * stream key      : splitmix64 applied to (seed XOR label hash)
//   * generator state : four successive splitmix64 outputs of the key
//   * generator       : xoshiro256** (Blackman & Vigna)
//   * uniform         : top 53 bits of next_u64, scaled to [0, 1)
//   * normal          : Box-Muller, exactly two uniforms per draw (no cache)

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Normal draw via Box-Muller; consumes exactly two uniforms.
  double normal(double mean, double stddev);

  // Uniform integer in [0, n).  n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
};

// FNV-1a 64-bit hash of a label; exposed for tests.
std::uint64_t hash_label(std::string_view label);

// Independent, reproducible stream for (seed, label).  Distinct labels give
// statistically independent streams; the same pair always gives the same
// stream.
Rng derive_substream(std::uint64_t seed, std::string_view label);

// A (seed, label-prefix) pair used to hand hierarchical stream families
// around, e.g. key.child("run:3").stream("node:1").
struct RngKey {
  std::uint64_t seed = 0;
  std::string prefix;

  RngKey child(std::string_view segment) const;
  Rng stream(std::string_view segment) const;
  std::string label_for(std::string_view segment) const;
};

}  // namespace powertalk
