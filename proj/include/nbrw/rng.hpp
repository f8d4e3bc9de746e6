/*
 * Copyright 2026 The nbrw-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Reproducible random streams.
//
// The generator is xoshiro256** (Blackman & Vigna). Its 256-bit state is
// filled from a SplitMix64 sequence. Stream derivation is fixed:
//
//   key     = mix64(seed) ^ mix64(stream + 0x632BE59BD9B4E019)
//   state_j = j-th output of SplitMix64 started at key, j = 0..3
//
// so (seed, stream) fully determines every draw on every platform.
// Bounded integers use Lemire's multiply-and-reject method, which
// depends only on 64-bit integer arithmetic.

#pragma once

#include <array>
#include <cstdint>

namespace nbrw {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  constexpr explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  /// Stream 0 of `seed`.
  constexpr explicit Xoshiro256(std::uint64_t seed) noexcept : Xoshiro256(seed, 0) {}

  constexpr Xoshiro256(std::uint64_t seed, std::uint64_t stream) noexcept : s_{} {
    SplitMix64 sm(mix64(seed) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
    for (auto& word : s_) word = sm.next();
  }

  /// Generator with an explicit raw state (must not be all zero).
  static constexpr Xoshiro256 from_state(const std::array<std::uint64_t, 4>& state) noexcept {
    Xoshiro256 g(0);
    g.s_ = state;
    return g;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
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

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept {
    std::uint64_t x = (*this)();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<unsigned __int128>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_;
};

using Rng = Xoshiro256;

/// In-place Fisher-Yates shuffle driven by `rng`.
template <typename Container>
void shuffle(Container& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace nbrw
