// Copyright 2026 The stab-lab Authors
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

namespace stablab {

using Rng = std::mt19937_64;

/// Independent stream for item `index` of a run seeded with `master`, so results
/// do not depend on evaluation order.
inline Rng derived_rng(std::uint64_t master, std::uint64_t index, std::uint64_t salt = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return Rng(seq);
}

inline std::uint64_t derived_seed(std::uint64_t master, std::uint64_t index, std::uint64_t salt = 0) {
    return derived_rng(master, index, salt)();
}

inline double uniform01(Rng &rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// SplitMix64 counter stream keyed by (master, index, salt). Much cheaper to set up
/// than derived_rng, for per-shot draws.
class ShotStream {
   public:
    ShotStream(std::uint64_t master, std::uint64_t index, std::uint64_t salt)
        : state_(mix(mix(master ^ 0x9e3779b97f4a7c15ULL) ^ index) ^ mix(salt)) {
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

   private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace stablab
