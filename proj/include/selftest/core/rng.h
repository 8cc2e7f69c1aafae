// Copyright 2026 The selftest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace selftest {

// SplitMix64 finalizer. Used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed of the `stream`-th child of `parent`. Pure function, so a session's
// randomness depends only on (master seed, session index).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

// Stable 64-bit hash of a byte string (FNV-1a followed by mix64).
std::uint64_t hash_bytes(std::span<const std::uint8_t> bytes);
std::uint64_t hash_string(std::string_view text);

// Deterministic random stream. All draws are implemented on top of the raw
// 64-bit engine output so results do not depend on the standard library's
// distribution implementations.
class Rng {
   public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next();
    // Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);
    bool bit();
    // Uniform double in [0, 1).
    double uniform();
    bool bernoulli(double p);
    // Standard normal deviate (Box-Muller).
    double normal();
    // Child stream; does not advance this stream.
    Rng fork(std::uint64_t stream) const;

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

   private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace selftest
