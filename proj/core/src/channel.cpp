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

#include "tdcsim/channel.hpp"

#include <bit>
#include <cmath>

namespace tdcsim {

void ChannelConfig::validate() const {
    if (n_taps < 2) throw ConfigError("channel needs at least 2 taps");
    if (triggers_per_measurement < 1) throw ConfigError("triggers_per_measurement must be >= 1");
    if (input_jitter_sigma.is_negative()) throw ConfigError("input jitter sigma must be >= 0");
}

BitMatrix::BitMatrix(int triggers, int taps)
    : triggers_(triggers), taps_(taps), words_per_row_((taps + 63) / 64) {
    if (triggers < 0 || taps < 0) throw UsageError("bit matrix dimensions must be non-negative");
    words_.assign(static_cast<std::size_t>(triggers) * words_per_row_, 0);
}

bool BitMatrix::get(int trigger, int tap) const {
    if (trigger < 0 || trigger >= triggers_ || tap < 0 || tap >= taps_) {
        throw UsageError("bit matrix index out of range");
    }
    const std::uint64_t word =
        words_[static_cast<std::size_t>(trigger) * words_per_row_ + tap / 64];
    return (word >> (tap % 64)) & 1u;
}

void BitMatrix::set(int trigger, int tap, bool value) {
    if (trigger < 0 || trigger >= triggers_ || tap < 0 || tap >= taps_) {
        throw UsageError("bit matrix index out of range");
    }
    std::uint64_t& word = words_[static_cast<std::size_t>(trigger) * words_per_row_ + tap / 64];
    const std::uint64_t mask = 1ULL << (tap % 64);
    if (value) {
        word |= mask;
    } else {
        word &= ~mask;
    }
}

void BitMatrix::fill_prefix(int trigger, int count) {
    if (trigger < 0 || trigger >= triggers_ || count < 0 || count > taps_) {
        throw UsageError("bit matrix prefix out of range");
    }
    std::uint64_t* row = words_.data() + static_cast<std::size_t>(trigger) * words_per_row_;
    int full = count / 64;
    for (int w = 0; w < full; ++w) row[w] = ~0ULL;
    int rest = count % 64;
    if (rest > 0) row[full] |= (1ULL << rest) - 1;
}

std::uint64_t BitMatrix::popcount() const {
    std::uint64_t total = 0;
    for (std::uint64_t w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
    return total;
}

std::uint32_t BitMatrix::row_popcount(int trigger) const {
    if (trigger < 0 || trigger >= triggers_) throw UsageError("bit matrix row out of range");
    const std::uint64_t* row = words_.data() + static_cast<std::size_t>(trigger) * words_per_row_;
    std::uint32_t total = 0;
    for (int w = 0; w < words_per_row_; ++w) {
        total += static_cast<std::uint32_t>(std::popcount(row[w]));
    }
    return total;
}

std::vector<std::uint8_t> BitMatrix::packed_tap_major() const {
    const std::size_t nbits = static_cast<std::size_t>(triggers_) * taps_;
    std::vector<std::uint8_t> out((nbits + 7) / 8, 0);
    std::size_t bit = 0;
    for (int tap = 0; tap < taps_; ++tap) {
        for (int trig = 0; trig < triggers_; ++trig, ++bit) {
            if (get(trig, tap)) out[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
        }
    }
    return out;
}

BitMatrix BitMatrix::from_packed_tap_major(const std::vector<std::uint8_t>& bytes,
                                           int triggers, int taps) {
    const std::size_t nbits = static_cast<std::size_t>(triggers) * taps;
    if (bytes.size() != (nbits + 7) / 8) {
        throw UsageError("packed bitstream length does not match triggers * taps");
    }
    BitMatrix m(triggers, taps);
    std::size_t bit = 0;
    for (int tap = 0; tap < taps; ++tap) {
        for (int trig = 0; trig < triggers; ++trig, ++bit) {
            if ((bytes[bit / 8] >> (bit % 8)) & 1u) m.set(trig, tap, true);
        }
    }
    return m;
}

namespace {

// Exact evaluation window: a tap whose nominal offset lies farther than this
// bound from the fractional delay has a fixed comparison outcome for every
// deviate the sampler can produce.
std::int64_t window_bound(const ReferenceBank& bank) {
    double jit = static_cast<double>(bank.tap_jitter_sigma().femtoseconds);
    std::int64_t jitter_reach = static_cast<std::int64_t>(std::ceil(kNormalTailBound * jit));
    return jitter_reach + bank.max_abs_static_error().femtoseconds + 1;
}

// First tap index with nominal offset > bound (nominal offsets ascend).
int upper_tap_index(const ReferenceBank& bank, std::int64_t bound) {
    int lo = 0;
    int hi = bank.size();
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        if (bank.tap(mid).nominal_offset.femtoseconds > bound) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

} // namespace

Measurement convert(const ChannelConfig& config, const ReferenceBank& bank,
                    const ClockModel& clock, Duration true_delay, const RandomSource& rng) {
    config.validate();
    clock.validate();
    if (config.n_taps != bank.size()) {
        throw UsageError("channel n_taps does not match the attached reference bank");
    }
    if (true_delay.is_negative()) throw DomainError("conversion delay must be >= 0");
    if (!config.coarse_enabled && true_delay >= clock.nominal_period) {
        throw RangeError("delay exceeds one period and the coarse counter is disabled");
    }

    const int n_taps = config.n_taps;
    const int n_triggers = config.triggers_per_measurement;
    const std::int64_t guard = window_bound(bank);

    Measurement m;
    m.bitstream = BitMatrix(n_triggers, n_taps);
    m.trigger_coarse.resize(static_cast<std::size_t>(n_triggers));
    m.trigger_codes.resize(static_cast<std::size_t>(n_triggers));
    m.true_delay_echo = true_delay;

    for (int t = 0; t < n_triggers; ++t) {
        RandomSource trig = rng.substream(static_cast<std::uint64_t>(t));
        RandomSource tap_rng = trig.substream(stream_scope::kTapNoise);
        RandomSource clk_rng = trig.substream(stream_scope::kClockEdges);
        RandomSource input_rng = trig.substream(stream_scope::kInputEdge);

        Duration jittered =
            checked_add(true_delay, input_rng.gaussian_at(0, config.input_jitter_sigma));

        std::uint64_t cycles = 0;
        Duration fractional = jittered;
        if (config.coarse_enabled) {
            cycles = coarse_cycles_at(clock, jittered, clk_rng);
            fractional = checked_sub(jittered, edge_time(clock, cycles, clk_rng));
        } else {
            fractional = checked_sub(jittered, edge_time(clock, 0, clk_rng));
        }
        if (cycles > UINT32_MAX) throw RangeError("coarse cycle count exceeds 32 bits");
        m.trigger_coarse[static_cast<std::size_t>(t)] = static_cast<std::uint32_t>(cycles);

        const std::int64_t frac = fractional.femtoseconds;
        // Taps below the window compare 1 with certainty, taps above it 0;
        // only the window needs noise draws.
        const int sure_ones = upper_tap_index(bank, frac - guard - 1);
        const int window_end = upper_tap_index(bank, frac + guard);

        m.bitstream.fill_prefix(t, sure_ones);
        std::uint32_t code = static_cast<std::uint32_t>(sure_ones);
        for (int i = sure_ones; i < window_end; ++i) {
            Duration threshold = tap_threshold(bank, i, tap_rng);
            if (frac > threshold.femtoseconds) {
                m.bitstream.set(t, i, true);
                ++code;
            }
        }
        m.trigger_codes[static_cast<std::size_t>(t)] = code;
        m.raw_code += code;
    }

    m.coarse = m.trigger_coarse.empty() ? 0 : m.trigger_coarse[0];
    return m;
}

std::uint64_t sum_bits(const Measurement& m) { return m.bitstream.popcount(); }

Duration decode_uncalibrated(std::uint64_t raw_code, const ChannelConfig& config,
                             Duration period) {
    config.validate();
    const std::uint64_t max_code = static_cast<std::uint64_t>(config.n_taps) *
                                   static_cast<std::uint64_t>(config.triggers_per_measurement);
    if (raw_code > max_code) throw DomainError("raw code exceeds triggers * n_taps");
    return mul_div_round(period, static_cast<std::int64_t>(raw_code),
                         static_cast<std::int64_t>(max_code));
}

Duration decode_fine_code(std::uint32_t code, int n_taps, Duration period) {
    if (n_taps < 2) throw UsageError("decode needs at least 2 taps");
    if (code > static_cast<std::uint32_t>(n_taps)) {
        throw DomainError("fine code exceeds n_taps");
    }
    return mul_div_round(period, static_cast<std::int64_t>(code), n_taps);
}

Duration combine_coarse_fine(std::uint64_t coarse, Duration fine, const ClockModel& clock) {
    clock.validate();
    if (fine.is_negative() || fine >= clock.nominal_period) {
        throw DomainError("fine part must lie in [0, nominal_period)");
    }
    if (coarse > static_cast<std::uint64_t>(INT64_MAX)) {
        throw RangeError("coarse count exceeds the time range");
    }
    Duration base = checked_mul(clock.nominal_period, static_cast<std::int64_t>(coarse));
    return checked_add(base, fine);
}

} // namespace tdcsim
