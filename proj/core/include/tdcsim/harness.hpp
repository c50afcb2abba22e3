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

#ifndef TDCSIM_HARNESS_HPP
#define TDCSIM_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tdcsim/calibration.hpp"
#include "tdcsim/device.hpp"
#include "tdcsim/generator.hpp"

namespace tdcsim {

struct SweepSpec {
    Duration start;
    Duration stop;
    Duration step = from_ps(50);
    int triggers_per_point = 1000;
    bool calibrated = false;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t point_count() const;
};

struct SweepPoint {
    Duration requested;
    Duration mean_estimate;
    Duration stddev;
    Duration error; // mean_estimate - requested
};

struct SweepReport {
    std::vector<SweepPoint> points;
    Duration rms_error;
    Duration max_abs_error;

    // Provenance: everything needed to regenerate the data byte-for-byte.
    std::string version;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    int triggers_per_point = 0;
    bool calibrated = false;
    Duration generator_accuracy;
    Duration generator_pulse_jitter;
    Duration generator_systematic;
};

/// Sweeps channel 0 over the delay grid. Each grid point converts once with
/// triggers_per_point triggers; the estimate is the mean of per-trigger
/// reconstructed times (coarse * period + decoded fine part), calibrated per
/// trigger when a table is supplied. Per-pulse generator jitter enters the
/// conversion as event-edge jitter. Deterministic given spec.seed.
///
/// When capture_frames is non-null, one measurement frame per point is
/// appended, encoded exactly as the device readout would ship it.
SweepReport run_sweep(const SweepSpec& spec, const Device& device,
                      const GeneratorModel& generator,
                      const CalibrationTable* table = nullptr,
                      std::vector<Frame>* capture_frames = nullptr);

/// Probe delays used by the resolution search: the requested base point plus
/// the worst-case ladder phases (just above the start of the widest
/// threshold gaps, and the midpoint of the widest gap). Saturated phases
/// above the last threshold are excluded; the coarse counter covers those by
/// wrapping.
std::vector<Duration> resolution_probe_points(const ReferenceBank& bank, Duration base_delay);

/// Smallest femtosecond step whose mean output differs with statistical
/// significance (difference of means > 3 standard errors) from the mean
/// output at every probe point, searched by bisection. With all noise at
/// zero this is exactly the step that moves every probe past its next
/// threshold, one tap pitch on an ideal ladder. Under noise the decision is
/// repeated over `trials` independent trial streams and settled by majority
/// vote. Throws NotResolvableError when max_step is insufficient.
Duration estimate_resolution(const Device& device, Duration base_delay, Duration max_step,
                             int triggers, std::uint64_t seed = 0, int trials = 25);

/// Standard deviation of the decoded estimate over `repeats` independent
/// measurements at a fixed true delay (uncalibrated linear decode).
/// Requires repeats >= 30.
Duration estimate_precision(const Device& device, Duration delay, int repeats,
                            std::uint64_t seed = 0);

/// Same estimate against explicit channel pieces, for setups the device
/// configuration file cannot express (event-edge jitter, odd ladders).
Duration estimate_precision(const ChannelConfig& cfg, const ReferenceBank& bank,
                            const ClockModel& clock, Duration delay, int repeats,
                            std::uint64_t seed = 0);

namespace harness_scope {
constexpr std::uint64_t kSweep = 0x5357;      // per-point conversion streams
constexpr std::uint64_t kResolution = 0x5245; // probe/trial streams
constexpr std::uint64_t kPrecision = 0x5052;  // repeat streams
constexpr std::uint64_t kCalibration = 0x4341;
constexpr std::uint64_t kGenerator = 0x474E;
} // namespace harness_scope

} // namespace tdcsim

#endif
