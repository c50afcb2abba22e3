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

#ifndef TDCSIM_REFERENCE_BANK_HPP
#define TDCSIM_REFERENCE_BANK_HPP

#include <cstdint>
#include <vector>

#include "tdcsim/random.hpp"
#include "tdcsim/time.hpp"

namespace tdcsim {

/// One reference threshold of the comparison ladder.
struct ReferenceTap {
    int index = 0;
    Duration nominal_offset;   // index * period / n_taps, rounded to fs
    Duration static_error;     // frozen at bank construction
};

/// Ordered bank of reference taps partitioning one clock period.
///
/// The ladder is ideal-uniform plus a per-tap static mismatch drawn once at
/// construction and a per-trigger Gaussian jitter applied at query time.
/// Immutable after construction; safe for concurrent reads.
class ReferenceBank {
public:
    /// Builds a bank with n_taps thresholds at i * period / n_taps and
    /// static errors drawn from Gaussian(mismatch_sigma), addressed per tap
    /// on the given stream. Bitwise reproducible for equal stream identity.
    static ReferenceBank build(int n_taps, Duration period, Duration mismatch_sigma,
                               Duration tap_jitter_sigma, const RandomSource& bank_rng);

    int size() const { return static_cast<int>(taps_.size()); }
    Duration period() const { return period_; }
    Duration mismatch_sigma() const { return mismatch_sigma_; }
    Duration tap_jitter_sigma() const { return tap_jitter_sigma_; }

    const ReferenceTap& tap(int index) const;
    Duration nominal_offset(int index) const { return tap(index).nominal_offset; }

    /// nominal_offset + static_error; the jitter-free threshold.
    Duration static_threshold(int index) const;

    /// Nominal tap spacing, period / n_taps rounded to fs.
    Duration pitch() const { return pitch_; }

    /// Bound on |static_error| over all taps, used for exact windowing.
    Duration max_abs_static_error() const { return max_abs_static_error_; }

    /// Jitter-free thresholds in ascending order (mismatch can reorder
    /// neighbors when it exceeds half a pitch).
    std::vector<Duration> sorted_static_thresholds() const;

    /// Hash over geometry and static errors, for calibration provenance.
    std::uint64_t fingerprint() const;

private:
    ReferenceBank() = default;

    std::vector<ReferenceTap> taps_;
    Duration period_;
    Duration pitch_;
    Duration mismatch_sigma_;
    Duration tap_jitter_sigma_;
    Duration max_abs_static_error_;
};

/// Threshold seen by one trigger: static threshold plus a fresh Gaussian
/// deviate addressed by tap index on trigger_rng. Repeated queries for the
/// same (trigger stream, tap) return the same value.
Duration tap_threshold(const ReferenceBank& bank, int tap_index, const RandomSource& trigger_rng);

} // namespace tdcsim

#endif
