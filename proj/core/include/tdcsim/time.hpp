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

#ifndef TDCSIM_TIME_HPP
#define TDCSIM_TIME_HPP

#include <compare>
#include <cstdint>
#include <string>

#include "tdcsim/errors.hpp"

namespace tdcsim {

/// Signed time interval counted in integer femtoseconds (1 ps = 1000 fs).
///
/// All timing in the simulator is exact integer arithmetic on this type;
/// overflow raises RangeError instead of wrapping. The usable range is
/// roughly +/-9.2e18 fs (~2.5 hours), far beyond any supported sweep.
struct Duration {
    std::int64_t femtoseconds = 0;

    constexpr Duration() = default;
    constexpr explicit Duration(std::int64_t fs) : femtoseconds(fs) {}

    constexpr auto operator<=>(const Duration&) const = default;

    constexpr bool is_zero() const { return femtoseconds == 0; }
    constexpr bool is_negative() const { return femtoseconds < 0; }

    /// Lossy view in picoseconds, for display and statistics only.
    constexpr double as_ps() const { return static_cast<double>(femtoseconds) / 1000.0; }
    constexpr double as_ns() const { return static_cast<double>(femtoseconds) / 1.0e6; }
};

/// A point on the simulation time axis; same representation as Duration.
using TimePoint = Duration;

constexpr std::int64_t kFsPerPs = 1000;
constexpr std::int64_t kFsPerNs = 1000 * 1000;

constexpr Duration from_fs(std::int64_t v) { return Duration(v); }

inline Duration from_ps(std::int64_t v) {
    if (v > INT64_MAX / kFsPerPs || v < INT64_MIN / kFsPerPs) {
        throw RangeError("picosecond value does not fit the femtosecond range");
    }
    return Duration(v * kFsPerPs);
}

inline Duration from_ns(std::int64_t v) {
    if (v > INT64_MAX / kFsPerNs || v < INT64_MIN / kFsPerNs) {
        throw RangeError("nanosecond value does not fit the femtosecond range");
    }
    return Duration(v * kFsPerNs);
}

inline Duration checked_add(Duration a, Duration b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a.femtoseconds, b.femtoseconds, &out)) {
        throw RangeError("duration addition overflows");
    }
    return Duration(out);
}

inline Duration checked_sub(Duration a, Duration b) {
    std::int64_t out = 0;
    if (__builtin_sub_overflow(a.femtoseconds, b.femtoseconds, &out)) {
        throw RangeError("duration subtraction overflows");
    }
    return Duration(out);
}

inline Duration checked_mul(Duration a, std::int64_t k) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a.femtoseconds, k, &out)) {
        throw RangeError("duration scaling overflows");
    }
    return Duration(out);
}

inline Duration operator+(Duration a, Duration b) { return checked_add(a, b); }
inline Duration operator-(Duration a, Duration b) { return checked_sub(a, b); }
inline Duration operator*(Duration a, std::int64_t k) { return checked_mul(a, k); }
inline Duration operator*(std::int64_t k, Duration a) { return checked_mul(a, k); }
inline Duration operator-(Duration a) {
    if (a.femtoseconds == INT64_MIN) throw RangeError("duration negation overflows");
    return Duration(-a.femtoseconds);
}

/// Rounds value*num/den to the nearest integer femtosecond using 128-bit
/// intermediates. den must be positive.
Duration mul_div_round(Duration value, std::int64_t num, std::int64_t den);

/// Human-facing formatting in picoseconds (e.g. "1502.5 ps").
std::string to_ps_string(Duration d);

} // namespace tdcsim

#endif
