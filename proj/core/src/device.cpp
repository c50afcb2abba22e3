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

#include "tdcsim/device.hpp"

#include <sstream>

namespace tdcsim {

std::int64_t DeviceConfig::total_taps() const {
    std::int64_t total = 0;
    for (const auto& ch : channels) total += ch.n_taps;
    return total;
}

void DeviceConfig::validate() const {
    if (channels.empty() || channels.size() > 128) {
        throw ConfigError("device must expose between 1 and 128 channels");
    }
    for (const auto& ch : channels) ch.validate();
    if (total_taps() > tap_budget) {
        std::ostringstream msg;
        msg << "channel layout needs " << total_taps() << " taps but the budget is "
            << tap_budget;
        throw ConfigError(msg.str());
    }
}

Device::Device(const SimulationConfig& sim)
    : clock_(sim.clock), bank_params_(sim.bank), sim_(sim) {
    sim.validate();
    config_.tap_budget = sim.device.tap_budget;
    config_.config_generation = 0;
    ChannelConfig ch;
    ch.n_taps = sim.bank.n_taps;
    ch.triggers_per_measurement = sim.device.triggers;
    config_.channels.assign(static_cast<std::size_t>(sim.device.n_channels), ch);
    config_.validate();
    rebuild_banks();
}

void Device::rebuild_banks() {
    banks_.clear();
    banks_.reserve(config_.channels.size());
    RandomSource bank_root(bank_params_.seed);
    for (std::size_t c = 0; c < config_.channels.size(); ++c) {
        banks_.push_back(ReferenceBank::build(config_.channels[c].n_taps, clock_.nominal_period,
                                              bank_params_.mismatch_sigma,
                                              bank_params_.tap_jitter_sigma,
                                              bank_root.substream(c)));
    }
}

const ReferenceBank& Device::bank(int channel) const {
    if (channel < 0 || channel >= config_.n_channels()) {
        throw UsageError("channel index out of range");
    }
    return banks_[static_cast<std::size_t>(channel)];
}

DeviceConfig Device::reconfigure(int n_channels, int taps_per_channel, int triggers) {
    if (n_channels < 1) throw ConfigError("reconfigure needs at least 1 channel");
    if (n_channels > 128) throw ConfigError("reconfigure supports at most 128 channels");
    if (taps_per_channel < 2) throw ConfigError("reconfigure needs at least 2 taps per channel");
    if (triggers < 1) throw ConfigError("reconfigure needs at least 1 trigger");

    const std::int64_t requested =
        static_cast<std::int64_t>(n_channels) * static_cast<std::int64_t>(taps_per_channel);
    if (requested > config_.tap_budget) {
        std::ostringstream msg;
        msg << "reconfigure rejected: " << requested << " taps requested (" << n_channels
            << " channels x " << taps_per_channel << " taps) exceeds the budget of "
            << config_.tap_budget;
        throw ConfigError(msg.str());
    }

    // Stage the full new state before touching anything observable.
    DeviceConfig next = config_;
    ChannelConfig ch;
    ch.n_taps = taps_per_channel;
    ch.triggers_per_measurement = triggers;
    next.channels.assign(static_cast<std::size_t>(n_channels), ch);
    next.config_generation = config_.config_generation + 1;
    next.validate();

    config_ = std::move(next);
    sim_.device.n_channels = n_channels;
    sim_.device.triggers = triggers;
    sim_.bank.n_taps = taps_per_channel;
    rebuild_banks();
    return config_;
}

Measurement Device::measure_channel(int channel, Duration delay, const RandomSource& rng) const {
    if (channel < 0 || channel >= config_.n_channels()) {
        throw UsageError("channel index out of range");
    }
    const auto& ch = config_.channels[static_cast<std::size_t>(channel)];
    return convert(ch, banks_[static_cast<std::size_t>(channel)], clock_, delay,
                   rng.substream(static_cast<std::uint64_t>(channel)));
}

std::vector<Frame> Device::run_trigger(const std::vector<Duration>& delays,
                                       const RandomSource& rng) {
    if (static_cast<int>(delays.size()) != config_.n_channels()) {
        throw UsageError("run_trigger needs exactly one delay per active channel");
    }
    std::vector<Frame> frames;
    frames.reserve(delays.size());
    for (int c = 0; c < config_.n_channels(); ++c) {
        const auto& ch = config_.channels[static_cast<std::size_t>(c)];
        Measurement m = measure_channel(c, delays[static_cast<std::size_t>(c)], rng);
        MeasurementPayload payload = make_measurement_payload(
            m, ch.triggers_per_measurement, ch.n_taps, /*include_bitstream=*/true,
            /*calibrated=*/false);
        Frame frame;
        frame.type = FrameType::measurement;
        frame.channel_id = static_cast<std::uint8_t>(c);
        frame.sequence = sequence_++;
        frame.payload = encode_measurement_payload(payload);
        frames.push_back(std::move(frame));
    }
    return frames;
}

Frame Device::make_error_frame(std::uint8_t code, const std::string& message) {
    Frame frame;
    frame.type = FrameType::error;
    frame.channel_id = 0;
    frame.sequence = sequence_++;
    frame.payload.push_back(code);
    frame.payload.insert(frame.payload.end(), message.begin(), message.end());
    return frame;
}

Frame Device::handle_command(const Frame& command) {
    if (command.type != FrameType::command || command.payload.empty()) {
        return make_error_frame(kErrBadCommand, "malformed command frame");
    }
    const std::uint8_t cmd = command.payload[0];
    if (cmd == kCmdReconfigure) {
        if (command.payload.size() != 7) {
            return make_error_frame(kErrBadCommand, "reconfigure command needs 3 u16 arguments");
        }
        auto u16_at = [&](std::size_t pos) {
            return static_cast<int>((command.payload[pos] << 8) | command.payload[pos + 1]);
        };
        try {
            DeviceConfig next = reconfigure(u16_at(1), u16_at(3), u16_at(5));
            Frame ack;
            ack.type = FrameType::ack;
            ack.channel_id = 0;
            ack.sequence = sequence_++;
            ack.payload.push_back(cmd);
            const auto gen = static_cast<std::uint32_t>(next.config_generation);
            ack.payload.push_back(static_cast<std::uint8_t>(gen >> 24));
            ack.payload.push_back(static_cast<std::uint8_t>(gen >> 16));
            ack.payload.push_back(static_cast<std::uint8_t>(gen >> 8));
            ack.payload.push_back(static_cast<std::uint8_t>(gen));
            return ack;
        } catch (const ConfigError& e) {
            return make_error_frame(kErrRejected, e.what());
        }
    }
    return make_error_frame(kErrBadCommand, "unknown command id");
}

} // namespace tdcsim
