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

#include "tdcsim/clock.hpp"

#include <cmath>

namespace tdcsim {

void ClockModel::validate() const {
    if (nominal_period.femtoseconds <= 0) {
        throw ConfigError("clock period must be positive");
    }
    if (cycle_jitter_sigma.is_negative()) {
        throw ConfigError("clock jitter sigma must be >= 0");
    }
}

Duration edge_time(const ClockModel& clock, std::uint64_t k, const RandomSource& edge_rng) {
    clock.validate();
    __int128 base = static_cast<__int128>(clock.nominal_period.femtoseconds) *
                    static_cast<__int128>(k);
    if (base > INT64_MAX) throw RangeError("clock edge index exceeds the time range");
    std::int64_t nominal = static_cast<std::int64_t>(base);
    std::int64_t drifted = nominal;
    if (clock.drift_ppm != 0.0) {
        // The nominal product is exact in double for any supported horizon
        // (< 2^53 fs ~ 9 s).
        std::int64_t shift =
            std::llround(static_cast<double>(nominal) * clock.drift_ppm * 1e-6);
        if (__builtin_add_overflow(nominal, shift, &drifted)) {
            throw RangeError("clock drift pushes an edge outside the time range");
        }
    }
    Duration jitter = edge_rng.gaussian_at(k, clock.cycle_jitter_sigma);
    return checked_add(Duration(drifted), jitter);
}

std::uint64_t coarse_cycles_at(const ClockModel& clock, Duration t, const RandomSource& edge_rng) {
    clock.validate();
    if (t.is_negative()) return 0;
    double period_eff = static_cast<double>(clock.nominal_period.femtoseconds) *
                        (1.0 + clock.drift_ppm * 1e-6);
    if (period_eff <= 0.0) throw ConfigError("effective clock period must be positive");
    auto k = static_cast<std::uint64_t>(
        std::max(0.0, std::floor(static_cast<double>(t.femtoseconds) / period_eff)));

    constexpr int kMaxSteps = 4096;
    int steps = 0;
    while (k > 0 && edge_time(clock, k, edge_rng) > t) {
        --k;
        if (++steps > kMaxSteps) throw RangeError("clock jitter too large for coarse binning");
    }
    while (edge_time(clock, k + 1, edge_rng) <= t) {
        ++k;
        if (++steps > kMaxSteps) throw RangeError("clock jitter too large for coarse binning");
    }
    return k;
}

} // namespace tdcsim
