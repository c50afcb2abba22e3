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

#ifndef TDCSIM_DEVICE_HPP
#define TDCSIM_DEVICE_HPP

#include <cstdint>
#include <vector>

#include "tdcsim/config.hpp"
#include "tdcsim/frame.hpp"

namespace tdcsim {

/// Observable device state: per-channel configurations, the shared tap
/// budget, and a generation counter bumped by every successful
/// reconfiguration.
struct DeviceConfig {
    std::vector<ChannelConfig> channels;
    int tap_budget = 60000;
    std::uint64_t config_generation = 0;

    int n_channels() const { return static_cast<int>(channels.size()); }
    std::int64_t total_taps() const;
    void validate() const;
};

// Command payload layout (FrameType::command):
//   cmd u8 | arguments...
// kCmdReconfigure: n_channels u16 | taps_per_channel u16 | triggers u16
// Ack payload: cmd u8 | config_generation u32.
// Error payload: code u8 | utf-8 message.
constexpr std::uint8_t kCmdReconfigure = 0x01;
constexpr std::uint8_t kErrBadCommand = 0x01;
constexpr std::uint8_t kErrRejected = 0x02;

/// Multi-channel converter with a resource budget and a framed byte-stream
/// interface. Reconfiguration is atomic: a rejected request leaves every
/// observable field untouched.
class Device {
public:
    explicit Device(const SimulationConfig& sim);

    const DeviceConfig& config() const { return config_; }
    const ClockModel& clock() const { return clock_; }
    const BankParams& bank_params() const { return bank_params_; }
    /// Simulation setup reflecting the current layout; reconfiguration keeps
    /// it in sync so provenance hashes stay truthful.
    const SimulationConfig& sim_config() const { return sim_; }
    const ReferenceBank& bank(int channel) const;

    /// Applies a uniform layout of n_channels x taps_per_channel. Fails with
    /// ConfigError (naming the requested total and the budget) when the
    /// budget would be exceeded; on failure the device state is unchanged.
    /// Returns the new configuration on success.
    DeviceConfig reconfigure(int n_channels, int taps_per_channel, int triggers);

    /// Converts one delay per active channel and emits one measurement frame
    /// per channel with device-wide increasing sequence numbers. Channel c
    /// draws from rng.substream(c); byte output is a pure function of
    /// (config, delays, rng identity) apart from the sequence counter.
    std::vector<Frame> run_trigger(const std::vector<Duration>& delays, const RandomSource& rng);

    /// Measurement for one channel exactly as run_trigger would produce it.
    Measurement measure_channel(int channel, Duration delay, const RandomSource& rng) const;

    /// Executes a command frame and returns the ack or error response frame.
    Frame handle_command(const Frame& command);

    std::uint32_t next_sequence() const { return sequence_; }

private:
    void rebuild_banks();
    Frame make_error_frame(std::uint8_t code, const std::string& message);

    ClockModel clock_;
    BankParams bank_params_;
    SimulationConfig sim_;
    DeviceConfig config_;
    std::vector<ReferenceBank> banks_;
    std::uint32_t sequence_ = 0;
};

} // namespace tdcsim

#endif
