/*
 * Copyright 2026 the tdcsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TDCSIM_RANDOM_HPP
#define TDCSIM_RANDOM_HPP

#include <cstdint>

#include "tdcsim/time.hpp"

namespace tdcsim {

/// Largest |z| the inverse-CDF normal sampler can produce from a 53-bit
/// uniform. Anything farther than kNormalTailBound sigma from a threshold
/// can never flip a comparison, which lets conversion skip those taps
/// without changing a single bit.
constexpr double kNormalTailBound = 8.5;

/// Inverse of the standard normal CDF (Wichura's AS 241 rational
/// approximation, double precision). p must lie in (0, 1).
double inverse_normal_cdf(double p);

/// Counter-based deterministic random source.
///
/// Every draw is a pure function of (stream identity, slot index), so
/// variates can be addressed by (channel, trigger, tap) coordinates and the
/// result is independent of evaluation order. Sequential draws and addressed
/// draws use disjoint slot planes and never collide.
///
/// Two instances constructed from the same seed produce bitwise-identical
/// outputs for the same call sequence. Instances are cheap to copy; derive
/// one substream per parallel unit instead of sharing.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed);

    /// Independent child stream for the given key pair. Children with
    /// different keys, and children of different parents, are uncorrelated.
    RandomSource substream(std::uint64_t key_a, std::uint64_t key_b = 0) const;

    /// Stable identity of this stream, used for provenance fingerprints.
    std::uint64_t fingerprint() const { return state_; }

    // -- sequential draws (advance the internal counter) --

    std::uint64_t next_u64();
    /// Uniform in the open interval (0, 1).
    double next_unit();
    /// Uniform integer in [0, bound); bound must be positive.
    std::int64_t next_below(std::int64_t bound);
    /// Zero-mean Gaussian deviate rounded to the nearest femtosecond.
    /// sigma must be >= 0; sigma == 0 returns exactly 0.
    Duration gaussian(Duration sigma);

    // -- addressed draws (pure reads of a slot; do not advance state) --

    std::uint64_t u64_at(std::uint64_t slot) const;
    double unit_at(std::uint64_t slot) const;
    std::int64_t below_at(std::uint64_t slot, std::int64_t bound) const;
    Duration gaussian_at(std::uint64_t slot, Duration sigma) const;

private:
    explicit RandomSource(std::uint64_t state, bool) : state_(state) {}

    std::uint64_t word(std::uint64_t plane, std::uint64_t index) const;

    std::uint64_t state_;
    std::uint64_t counter_ = 0;
};

} // namespace tdcsim

#endif
