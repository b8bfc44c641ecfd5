/*
 * Copyright 2026 The segaug Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SEGAUG_RANDOM_HPP
#define SEGAUG_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace segaug {

/// Seeded 64-bit generator. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; all draws below are built from raw
/// engine words so sequences match across standard libraries (the std
/// distributions are implementation-defined and are not used).
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Picks k distinct elements uniformly (partial Fisher-Yates); the
  /// returned order is itself uniformly random.
  template <typename T>
  std::vector<T> sample_without_replacement(std::vector<T> items,
                                            std::size_t k) {
    if (k > items.size()) k = items.size();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(items.size() - i));
      std::swap(items[i], items[j]);
    }
    items.resize(k);
    return items;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Per-item seed derivation: splitmix64(master ^ fnv1a64(key)).
inline std::uint64_t hash64(std::uint64_t master_seed, std::string_view key) {
  return splitmix64(master_seed ^ fnv1a64(key));
}

}  // namespace segaug

#endif  // SEGAUG_RANDOM_HPP
