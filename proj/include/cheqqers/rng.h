// Copyright 2026 The Cheqqers Authors
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

#include <cstddef>
#include <cstdint>
#include <random>

namespace cheqqers {

/// Seeded generator shared by everything that samples during a game.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard)
/// and counts the raw draws taken, so a generator can be reconstructed
/// from (seed, position) when a game is deserialized.
class Rng {
   public:
    explicit Rng(uint64_t seed = 0);

    static Rng at_position(uint64_t seed, uint64_t position);

    uint64_t next();
    /// Uniform double in [0, 1) built from the top 53 bits of one draw.
    double uniform();
    /// Uniform integer in [0, n). Requires n > 0.
    size_t below(size_t n);

    uint64_t seed() const {
        return seed_;
    }
    uint64_t position() const {
        return position_;
    }

    bool operator==(const Rng &other) const;

   private:
    std::mt19937_64 engine_;
    uint64_t seed_;
    uint64_t position_ = 0;
};

/// Mixes a base seed with a stream index (splitmix64 finalizer).
uint64_t derive_seed(uint64_t base, uint64_t stream);

}  // namespace cheqqers
