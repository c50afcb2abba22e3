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

#ifndef TDCSIM_CONFIG_HPP
#define TDCSIM_CONFIG_HPP

#include <cstdint>
#include <string>

#include "tdcsim/clock.hpp"
#include "tdcsim/time.hpp"

namespace tdcsim {

/// Reference-bank generation parameters shared by all channels.
struct BankParams {
    int n_taps = 600;
    Duration mismatch_sigma = Duration(0);
    Duration tap_jitter_sigma = Duration(0);
    std::uint64_t seed = 0;
};

struct DeviceParams {
    int n_channels = 1;
    int tap_budget = 60000;
    int triggers = 1000;
};

/// Full simulation setup as carried by the device configuration file:
///   {"clock": {"period_fs", "jitter_fs", "drift_ppm"},
///    "bank": {"n_taps", "mismatch_fs", "tap_jitter_fs", "seed"},
///    "device": {"n_channels", "tap_budget", "triggers"}}
/// Missing keys take defaults; unknown keys are rejected.
struct SimulationConfig {
    ClockModel clock;
    BankParams bank;
    DeviceParams device;

    void validate() const;
};

SimulationConfig parse_config_json(const std::string& text);
SimulationConfig load_config_file(const std::string& path);

/// Canonical JSON form: fixed key order, two-space indent. Two equal
/// configurations serialize to identical bytes.
std::string config_to_json(const SimulationConfig& config);

/// FNV-1a hash of the canonical JSON, used as report provenance.
std::uint64_t config_hash(const SimulationConfig& config);

} // namespace tdcsim

#endif
