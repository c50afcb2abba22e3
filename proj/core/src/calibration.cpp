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

#include "tdcsim/calibration.hpp"

#include <cmath>
#include <cstdlib>

namespace tdcsim {

namespace {

constexpr std::uint64_t kMinSamplesPerBin = 100;

Duration midpoint_time(Duration period, std::uint64_t below, std::uint64_t at,
                       std::uint64_t n_samples) {
    // period * (below + at/2) / n = period * (2*below + at) / (2*n)
    const __int128 num = static_cast<__int128>(period.femtoseconds) *
                         (static_cast<__int128>(below) * 2 + at);
    const __int128 den = static_cast<__int128>(n_samples) * 2;
    const __int128 out = (num + den / 2) / den;
    if (out > INT64_MAX) throw RangeError("calibration midpoint exceeds the time range");
    return Duration(static_cast<std::int64_t>(out));
}

} // namespace

std::pair<CodeHistogram, CalibrationTable> code_density_calibrate(
    const ChannelConfig& config, const ReferenceBank& bank, const ClockModel& clock,
    std::uint64_t n_samples, const RandomSource& rng) {
    config.validate();
    const std::uint64_t bins = static_cast<std::uint64_t>(config.n_taps) *
                                   static_cast<std::uint64_t>(config.triggers_per_measurement) +
                               1;
    if (n_samples < kMinSamplesPerBin * bins) {
        throw ConfigError("code-density calibration needs at least 100 samples per code bin");
    }

    const Duration period = bank.period();
    CodeHistogram hist;
    hist.counts.assign(static_cast<std::size_t>(bins), 0);
    hist.n_samples = n_samples;

    for (std::uint64_t j = 0; j < n_samples; ++j) {
        RandomSource sample = rng.substream(j);
        Duration delay(sample.below_at(0, period.femtoseconds));
        Measurement m = convert(config, bank, clock, delay, sample.substream(1));
        ++hist.counts[static_cast<std::size_t>(m.raw_code)];
    }

    CalibrationTable table;
    table.period = period;
    table.n_samples = n_samples;
    table.stimulus_fingerprint = rng.fingerprint();
    table.bank_fingerprint = bank.fingerprint();
    table.code_to_time.assign(static_cast<std::size_t>(bins), Duration(-1));

    std::uint64_t below = 0;
    for (std::size_t c = 0; c < hist.counts.size(); ++c) {
        const std::uint64_t at = hist.counts[c];
        if (at > 0) {
            table.code_to_time[c] = midpoint_time(period, below, at, n_samples);
        }
        below += at;
    }

    // Unobserved codes inherit the nearest observed neighbor's time.
    const std::size_t n = table.code_to_time.size();
    std::vector<std::ptrdiff_t> prev_obs(n, -1), next_obs(n, -1);
    std::ptrdiff_t last = -1;
    for (std::size_t c = 0; c < n; ++c) {
        if (hist.counts[c] > 0) last = static_cast<std::ptrdiff_t>(c);
        prev_obs[c] = last;
    }
    last = -1;
    for (std::size_t c = n; c-- > 0;) {
        if (hist.counts[c] > 0) last = static_cast<std::ptrdiff_t>(c);
        next_obs[c] = last;
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (hist.counts[c] > 0) continue;
        const std::ptrdiff_t lo = prev_obs[c];
        const std::ptrdiff_t hi = next_obs[c];
        std::ptrdiff_t pick;
        if (lo < 0) {
            pick = hi;
        } else if (hi < 0) {
            pick = lo;
        } else {
            pick = (static_cast<std::ptrdiff_t>(c) - lo <= hi - static_cast<std::ptrdiff_t>(c))
                       ? lo
                       : hi;
        }
        table.code_to_time[c] = table.code_to_time[static_cast<std::size_t>(pick)];
    }

    // Monotone repair.
    for (std::size_t c = 1; c < n; ++c) {
        if (table.code_to_time[c] < table.code_to_time[c - 1]) {
            table.code_to_time[c] = table.code_to_time[c - 1];
        }
    }
    return {std::move(hist), std::move(table)};
}

Duration apply_calibration(const CalibrationTable& table, std::uint64_t raw_code) {
    if (raw_code >= table.code_to_time.size()) {
        throw DomainError("raw code outside the calibration table domain");
    }
    return table.code_to_time[static_cast<std::size_t>(raw_code)];
}

Duration apply_calibration_interpolated(const CalibrationTable& table, double code) {
    if (table.code_to_time.empty()) throw UsageError("empty calibration table");
    const double max_code = static_cast<double>(table.code_to_time.size() - 1);
    if (!(code >= 0.0) || code > max_code) {
        throw DomainError("fractional code outside the calibration table domain");
    }
    const double floor_code = std::floor(code);
    const auto lo = static_cast<std::size_t>(floor_code);
    if (lo + 1 >= table.code_to_time.size()) return table.code_to_time.back();
    const double w = code - floor_code;
    const double a = static_cast<double>(table.code_to_time[lo].femtoseconds);
    const double b = static_cast<double>(table.code_to_time[lo + 1].femtoseconds);
    return Duration(std::llround(a + (b - a) * w));
}

DnlInlReport compute_dnl_inl(const CodeHistogram& hist, Duration period, int n_taps) {
    if (hist.n_samples == 0) throw DomainError("cannot derive DNL/INL from an empty histogram");
    if (hist.counts.size() < 2) throw UsageError("histogram needs at least 2 code bins");
    if (n_taps < 2 || (hist.counts.size() - 1) % static_cast<std::size_t>(n_taps) != 0) {
        throw UsageError("histogram bin count does not match n_taps");
    }

    const std::size_t bins = hist.counts.size();
    const double ideal_lsb =
        static_cast<double>(period.femtoseconds) / static_cast<double>(bins - 1);

    DnlInlReport report;
    report.dnl.assign(bins, 0.0);
    report.inl.assign(bins, 0.0);

    double running = 0.0;
    for (std::size_t c = 1; c < bins; ++c) {
        const double width = static_cast<double>(period.femtoseconds) *
                             static_cast<double>(hist.counts[c]) /
                             static_cast<double>(hist.n_samples);
        const double dnl = width / ideal_lsb - 1.0;
        running += dnl;
        report.dnl[c] = dnl;
        report.inl[c] = running;
        report.max_abs_dnl = std::max(report.max_abs_dnl, std::fabs(dnl));
        report.max_abs_inl = std::max(report.max_abs_inl, std::fabs(running));
    }
    return report;
}

} // namespace tdcsim
