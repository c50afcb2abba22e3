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

#include "tdcsim/random.hpp"

#include <cmath>

namespace tdcsim {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kRootSalt = 0xd1b54a32d192ed03ULL;
constexpr std::uint64_t kChildSaltA = 0xaf251af3b0f025b5ULL;
constexpr std::uint64_t kChildSaltB = 0xb564ef22ec7aece5ULL;

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline double unit_from_word(std::uint64_t w) {
    // 53 high bits, offset to the bin center: uniform on (0, 1), symmetric
    // about 1/2, never exactly 0 or 1.
    return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

inline std::int64_t below_from_word(std::uint64_t w, std::int64_t bound) {
    if (bound <= 0) throw UsageError("uniform bound must be positive");
    unsigned __int128 prod =
        static_cast<unsigned __int128>(w) * static_cast<unsigned __int128>(bound);
    return static_cast<std::int64_t>(prod >> 64);
}

inline Duration gaussian_from_word(std::uint64_t w, Duration sigma) {
    if (sigma.is_negative()) throw DomainError("gaussian sigma must be >= 0");
    if (sigma.is_zero()) return Duration(0);
    double z = inverse_normal_cdf(unit_from_word(w));
    return Duration(std::llround(z * static_cast<double>(sigma.femtoseconds)));
}

} // namespace

double inverse_normal_cdf(double p) {
    // AS 241, PPND16. Relative accuracy ~1e-16 over (0, 1).
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                    3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

RandomSource::RandomSource(std::uint64_t seed) : state_(mix64(seed ^ kRootSalt)) {}

RandomSource RandomSource::substream(std::uint64_t key_a, std::uint64_t key_b) const {
    std::uint64_t s = mix64(state_ ^ (kChildSaltA + key_a * kGolden));
    s = mix64(s ^ (kChildSaltB + key_b * kGolden));
    return RandomSource(s, true);
}

std::uint64_t RandomSource::word(std::uint64_t plane, std::uint64_t index) const {
    // Weyl-sequence counter through the SplitMix64 finalizer; planes
    // interleave so sequential and addressed slots stay disjoint.
    return mix64(state_ + kGolden * ((index << 1) | plane));
}

std::uint64_t RandomSource::next_u64() { return word(0, counter_++); }

double RandomSource::next_unit() { return unit_from_word(next_u64()); }

std::int64_t RandomSource::next_below(std::int64_t bound) {
    return below_from_word(next_u64(), bound);
}

Duration RandomSource::gaussian(Duration sigma) {
    return gaussian_from_word(next_u64(), sigma);
}

std::uint64_t RandomSource::u64_at(std::uint64_t slot) const { return word(1, slot); }

double RandomSource::unit_at(std::uint64_t slot) const {
    return unit_from_word(u64_at(slot));
}

std::int64_t RandomSource::below_at(std::uint64_t slot, std::int64_t bound) const {
    return below_from_word(u64_at(slot), bound);
}

Duration RandomSource::gaussian_at(std::uint64_t slot, Duration sigma) const {
    return gaussian_from_word(u64_at(slot), sigma);
}

} // namespace tdcsim
