#include "powertalk/rng.hpp"

#include <cmath>
#include <numbers>

#include "powertalk/errors.hpp"

namespace powertalk {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  // Seed expansion per the xoshiro authors' recommendation: run splitmix64
  // on the key to fill the state, which cannot end up all-zero.
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  // xoshiro256**
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal(double mean, double stddev) {
  // Box-Muller (cosine branch only).  The sine branch is deliberately not
  // cached: every draw consumes exactly two uniforms, which keeps streams
  // stateless beyond the generator itself.
  const double u1 = 1.0 - uniform();  // (0, 1], safe for log
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgumentError("Rng::below: n must be positive");
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV offset basis
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;  // FNV prime
  }
  return h;
}

Rng derive_substream(std::uint64_t seed, std::string_view label) {
  std::uint64_t key = seed ^ hash_label(label);
  // One extra mixing round so that seed and label hash diffuse into each
  // other before state expansion.
  std::uint64_t sm = key;
  return Rng(splitmix64(sm));
}

RngKey RngKey::child(std::string_view segment) const {
  RngKey k;
  k.seed = seed;
  k.prefix = label_for(segment);
  return k;
}

Rng RngKey::stream(std::string_view segment) const {
  return derive_substream(seed, label_for(segment));
}

std::string RngKey::label_for(std::string_view segment) const {
  if (prefix.empty()) return std::string(segment);
  std::string label = prefix;
  label += '/';
  label += segment;
  return label;
}

}  // namespace powertalk
