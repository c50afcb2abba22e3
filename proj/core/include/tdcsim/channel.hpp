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

#ifndef TDCSIM_CHANNEL_HPP
#define TDCSIM_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "tdcsim/clock.hpp"
#include "tdcsim/random.hpp"
#include "tdcsim/reference_bank.hpp"
#include "tdcsim/time.hpp"

namespace tdcsim {

/// Per-channel conversion parameters.
struct ChannelConfig {
    int n_taps = 600;
    int triggers_per_measurement = 1000;
    Duration input_jitter_sigma = Duration(0); // jitter of the event edge itself
    bool coarse_enabled = true;

    void validate() const;
};

/// Dense triggers x taps bit matrix, stored row-major per trigger.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int triggers, int taps);

    int triggers() const { return triggers_; }
    int taps() const { return taps_; }

    bool get(int trigger, int tap) const;
    void set(int trigger, int tap, bool value);
    /// Sets taps [0, count) of a row to 1 in one pass.
    void fill_prefix(int trigger, int count);

    std::uint64_t popcount() const;
    std::uint32_t row_popcount(int trigger) const;

    /// Wire layout: bit index = tap * triggers + trigger, zero-padded to a
    /// byte boundary.
    std::vector<std::uint8_t> packed_tap_major() const;
    static BitMatrix from_packed_tap_major(const std::vector<std::uint8_t>& bytes,
                                           int triggers, int taps);

private:
    int triggers_ = 0;
    int taps_ = 0;
    int words_per_row_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Result of one conversion: coarse cycle count plus the per-trigger,
/// per-tap comparison bits and their population count.
struct Measurement {
    std::uint32_t coarse = 0;                   // cycle count of the first trigger
    BitMatrix bitstream;                        // triggers x taps
    std::uint64_t raw_code = 0;                 // popcount of the bitstream

    // Simulation-side detail, never serialized to the wire.
    std::vector<std::uint32_t> trigger_coarse;  // per-trigger cycle counts
    std::vector<std::uint32_t> trigger_codes;   // per-trigger popcounts
    std::optional<Duration> true_delay_echo;    // requested ground-truth delay
};

/// Converts one input delay: per trigger, the jittered event edge is binned
/// against the clock (when coarse is enabled) and its fractional part is
/// compared to every reference tap; bit(t, i) = 1 iff fractional(t) strictly
/// exceeds the tap's threshold. Deterministic given the stream identity;
/// triggers draw from independent substreams addressed by trigger index.
Measurement convert(const ChannelConfig& config, const ReferenceBank& bank,
                    const ClockModel& clock, Duration true_delay, const RandomSource& rng);

/// Population count of the bitstream, recomputed from the bits.
std::uint64_t sum_bits(const Measurement& m);

/// Linear decode: raw_code / (triggers * n_taps) * period, rounded to fs.
Duration decode_uncalibrated(std::uint64_t raw_code, const ChannelConfig& config,
                             Duration period);

/// Linear decode of a single-trigger code against an n_taps ladder.
Duration decode_fine_code(std::uint32_t code, int n_taps, Duration period);

/// coarse * nominal_period + fine, exact integer arithmetic.
/// fine must lie in [0, nominal_period).
Duration combine_coarse_fine(std::uint64_t coarse, Duration fine, const ClockModel& clock);

namespace stream_scope {
// Substream keys used inside convert(); exposed so tests and the device can
// reproduce a conversion draw-for-draw.
constexpr std::uint64_t kTapNoise = 0;
constexpr std::uint64_t kClockEdges = 1;
constexpr std::uint64_t kInputEdge = 2;
} // namespace stream_scope

} // namespace tdcsim

#endif
