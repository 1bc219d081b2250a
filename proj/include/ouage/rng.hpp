// Copyright 2026 The ouage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OUAGE_RNG_HPP
#define OUAGE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ouage {

/**
 * Seedable, splittable random source.
 *
 * Engine: std::mt19937_64, whose output sequence is fixed by the C++
 * standard. Seeds and child streams are derived with SplitMix64. Variates
 * are produced here rather than by <random> distributions, whose algorithms
 * are implementation-defined:
 *  - uniform(): (u64 >> 11) + 0.5, scaled by 2^-53, so strictly inside (0, 1);
 *  - normal(): Box-Muller, both variates of a pair are used.
 * Together these make a stream reproducible across platforms and languages.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_{seed}, engine_{splitmix64(seed)} {}

  /// Independent child stream; the same (seed, stream) always gives the same child.
  [[nodiscard]] Rng split(std::uint64_t stream) const { return Rng{splitmix64(seed_ ^ splitmix64(stream + 1))}; }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Number of Bernoulli(p) trials up to and including the first success.
  std::uint64_t geometric(double p) {
    if (p >= 1.0) {
      return 1;
    }
    const double m = std::ceil(std::log(uniform()) / std::log1p(-p));
    return m < 1.0 ? 1 : static_cast<std::uint64_t>(m);
  }

  static constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ouage

#endif  // OUAGE_RNG_HPP
