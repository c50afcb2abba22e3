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

#include "tdcsim/reference_bank.hpp"

#include <algorithm>
#include <cstdlib>

namespace tdcsim {

ReferenceBank ReferenceBank::build(int n_taps, Duration period, Duration mismatch_sigma,
                                   Duration tap_jitter_sigma, const RandomSource& bank_rng) {
    if (n_taps < 2) throw ConfigError("reference bank needs at least 2 taps");
    if (period.femtoseconds <= 0) throw ConfigError("reference bank period must be positive");
    if (mismatch_sigma.is_negative() || tap_jitter_sigma.is_negative()) {
        throw ConfigError("reference bank sigmas must be >= 0");
    }
    if (period.femtoseconds < n_taps) {
        throw ConfigError("tap pitch falls below 1 fs; reduce n_taps or raise the period");
    }

    ReferenceBank bank;
    bank.period_ = period;
    bank.pitch_ = mul_div_round(period, 1, n_taps);
    bank.mismatch_sigma_ = mismatch_sigma;
    bank.tap_jitter_sigma_ = tap_jitter_sigma;
    bank.taps_.reserve(static_cast<std::size_t>(n_taps));

    std::int64_t max_abs = 0;
    for (int i = 0; i < n_taps; ++i) {
        ReferenceTap tap;
        tap.index = i;
        tap.nominal_offset = mul_div_round(period, i, n_taps);
        tap.static_error = bank_rng.gaussian_at(static_cast<std::uint64_t>(i), mismatch_sigma);
        max_abs = std::max<std::int64_t>(max_abs, std::llabs(tap.static_error.femtoseconds));
        bank.taps_.push_back(tap);
    }
    bank.max_abs_static_error_ = Duration(max_abs);
    return bank;
}

const ReferenceTap& ReferenceBank::tap(int index) const {
    if (index < 0 || index >= size()) {
        throw UsageError("tap index out of range");
    }
    return taps_[static_cast<std::size_t>(index)];
}

Duration ReferenceBank::static_threshold(int index) const {
    const ReferenceTap& t = tap(index);
    return checked_add(t.nominal_offset, t.static_error);
}

std::vector<Duration> ReferenceBank::sorted_static_thresholds() const {
    std::vector<Duration> out;
    out.reserve(taps_.size());
    for (const auto& t : taps_) out.push_back(checked_add(t.nominal_offset, t.static_error));
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t ReferenceBank::fingerprint() const {
    // FNV-1a over the defining integers.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto absorb = [&h](std::int64_t v) {
        auto u = static_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (u >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    absorb(period_.femtoseconds);
    absorb(size());
    absorb(tap_jitter_sigma_.femtoseconds);
    for (const auto& t : taps_) absorb(t.static_error.femtoseconds);
    return h;
}

Duration tap_threshold(const ReferenceBank& bank, int tap_index, const RandomSource& trigger_rng) {
    Duration base = bank.static_threshold(tap_index); // range-checks the index
    Duration jitter = trigger_rng.gaussian_at(static_cast<std::uint64_t>(tap_index),
                                              bank.tap_jitter_sigma());
    return checked_add(base, jitter);
}

} // namespace tdcsim
