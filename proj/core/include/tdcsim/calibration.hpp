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

#ifndef TDCSIM_CALIBRATION_HPP
#define TDCSIM_CALIBRATION_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "tdcsim/channel.hpp"

namespace tdcsim {

/// Histogram of raw codes under uniformly distributed stimulus delays.
struct CodeHistogram {
    std::vector<std::uint64_t> counts; // one bin per raw code value
    std::uint64_t n_samples = 0;
};

/// Monotone raw-code -> time lookup produced by code-density calibration.
struct CalibrationTable {
    std::vector<Duration> code_to_time; // nondecreasing, one entry per code
    Duration period;

    // Build provenance.
    std::uint64_t n_samples = 0;
    std::uint64_t stimulus_fingerprint = 0;
    std::uint64_t bank_fingerprint = 0;

    std::size_t bins() const { return code_to_time.size(); }
};

/// Differential and integral nonlinearity in LSB units.
///
/// Code 0 collapses to the single point zero under the strict ">" comparison
/// rule, so its bin carries no width information; DNL/INL are reported for
/// codes >= 1 (entry 0 of both vectors is fixed at 0).
struct DnlInlReport {
    std::vector<double> dnl;
    std::vector<double> inl;
    double max_abs_dnl = 0.0;
    double max_abs_inl = 0.0;
};

/// Runs a code-density test: draws n_samples delays uniform over
/// [0, period), converts each, and histograms the raw codes. The table entry
/// for code c is period * (count below c + half the count at c) / n_samples;
/// codes never observed inherit the nearest observed neighbor's time, and a
/// final pass enforces monotonicity.
///
/// Requires n_samples >= 100 per code bin. Deterministic and
/// order-independent: sample j draws from rng.substream(j).
std::pair<CodeHistogram, CalibrationTable> code_density_calibrate(
    const ChannelConfig& config, const ReferenceBank& bank, const ClockModel& clock,
    std::uint64_t n_samples, const RandomSource& rng);

/// Table lookup; raw_code must lie inside the table domain.
Duration apply_calibration(const CalibrationTable& table, std::uint64_t raw_code);

/// Calibrated time at a fractional code position, linearly interpolated
/// between the two neighboring table entries. Used to decode aggregate codes
/// when per-trigger bits are unavailable.
Duration apply_calibration_interpolated(const CalibrationTable& table, double code);

/// DNL/INL from a code-density histogram. Bin width estimate is
/// period * counts[c] / n_samples; dnl[c] = width / ideal_lsb - 1 with
/// ideal_lsb = period / (bins - 1); inl is the running sum of dnl.
DnlInlReport compute_dnl_inl(const CodeHistogram& hist, Duration period, int n_taps);

} // namespace tdcsim

#endif
