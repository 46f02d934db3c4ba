#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace spectraph {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a over the bytes of a name; used to fold dataset names into seeds.
constexpr std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Combines a parent seed with one more component: mix64(seed ^ mix64(part)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t part) {
  return mix64(seed ^ mix64(part));
}

/// Seed of one benchmark cell: user seed, dataset name, noise index, repetition.
std::uint64_t cell_seed(std::uint64_t user_seed, std::string_view dataset, std::uint64_t sigma_index,
                        std::uint64_t repetition);

/// Counter-based generator: the i-th output is mix64(key + i * golden). Any output
/// is addressable without generating its predecessors, and streams with distinct
/// keys are independent for our purposes. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(mix64(key)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Standard normal via Box-Muller (pairs are cached).
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spectraph
