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

#include "tdcsim/time.hpp"

#include <cstdio>

namespace tdcsim {

Duration mul_div_round(Duration value, std::int64_t num, std::int64_t den) {
    if (den <= 0) throw UsageError("mul_div_round: denominator must be positive");
    __int128 scaled = static_cast<__int128>(value.femtoseconds) * num;
    // round half away from zero
    __int128 half = den / 2;
    __int128 out = scaled >= 0 ? (scaled + half) / den : (scaled - half) / den;
    if (out > INT64_MAX || out < INT64_MIN) {
        throw RangeError("mul_div_round result exceeds the femtosecond range");
    }
    return Duration(static_cast<std::int64_t>(out));
}

std::string to_ps_string(Duration d) {
    std::int64_t ps = d.femtoseconds / kFsPerPs;
    std::int64_t rem = d.femtoseconds % kFsPerPs;
    char buf[48];
    if (rem == 0) {
        std::snprintf(buf, sizeof(buf), "%lld ps", static_cast<long long>(ps));
    } else {
        if (rem < 0) rem = -rem;
        double v = static_cast<double>(d.femtoseconds) / 1000.0;
        std::snprintf(buf, sizeof(buf), "%.3f ps", v);
    }
    return buf;
}

} // namespace tdcsim
