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

#include "tdcsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tdcsim {

namespace {

using ordered_json = nlohmann::ordered_json;

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& known,
                         const char* scope) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) {
            throw ConfigError(std::string("unknown configuration key \"") + it.key() +
                              "\" in section \"" + scope + "\"");
        }
    }
}

std::int64_t get_int(const ordered_json& obj, const char* key, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError(std::string("configuration key \"") + key + "\" must be an integer");
    }
    return v.get<std::int64_t>();
}

std::uint64_t get_u64(const ordered_json& obj, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError(std::string("configuration key \"") + key + "\" must be an integer");
    }
    return v.get<std::uint64_t>();
}

double get_double(const ordered_json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(std::string("configuration key \"") + key + "\" must be a number");
    }
    return v.get<double>();
}

} // namespace

void SimulationConfig::validate() const {
    clock.validate();
    if (bank.n_taps < 2) throw ConfigError("bank.n_taps must be >= 2");
    if (bank.mismatch_sigma.is_negative()) throw ConfigError("bank.mismatch_fs must be >= 0");
    if (bank.tap_jitter_sigma.is_negative()) throw ConfigError("bank.tap_jitter_fs must be >= 0");
    if (device.n_channels < 1 || device.n_channels > 128) {
        throw ConfigError("device.n_channels must lie in [1, 128]");
    }
    if (device.tap_budget < 2) throw ConfigError("device.tap_budget must be >= 2");
    if (device.triggers < 1) throw ConfigError("device.triggers must be >= 1");
    const std::int64_t total =
        static_cast<std::int64_t>(device.n_channels) * static_cast<std::int64_t>(bank.n_taps);
    if (total > device.tap_budget) {
        std::ostringstream msg;
        msg << "configuration requests " << total << " taps (" << device.n_channels
            << " channels x " << bank.n_taps << " taps) but the budget is " << device.tap_budget;
        throw ConfigError(msg.str());
    }
}

SimulationConfig parse_config_json(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("configuration root must be a JSON object");
    reject_unknown_keys(root, {"clock", "bank", "device"}, "root");

    SimulationConfig cfg;
    if (root.contains("clock")) {
        const auto& c = root.at("clock");
        if (!c.is_object()) throw ConfigError("\"clock\" must be an object");
        reject_unknown_keys(c, {"period_fs", "jitter_fs", "drift_ppm"}, "clock");
        cfg.clock.nominal_period = Duration(get_int(c, "period_fs", cfg.clock.nominal_period.femtoseconds));
        cfg.clock.cycle_jitter_sigma = Duration(get_int(c, "jitter_fs", 0));
        cfg.clock.drift_ppm = get_double(c, "drift_ppm", 0.0);
    }
    if (root.contains("bank")) {
        const auto& b = root.at("bank");
        if (!b.is_object()) throw ConfigError("\"bank\" must be an object");
        reject_unknown_keys(b, {"n_taps", "mismatch_fs", "tap_jitter_fs", "seed"}, "bank");
        cfg.bank.n_taps = static_cast<int>(get_int(b, "n_taps", cfg.bank.n_taps));
        cfg.bank.mismatch_sigma = Duration(get_int(b, "mismatch_fs", 0));
        cfg.bank.tap_jitter_sigma = Duration(get_int(b, "tap_jitter_fs", 0));
        cfg.bank.seed = get_u64(b, "seed", 0);
    }
    if (root.contains("device")) {
        const auto& d = root.at("device");
        if (!d.is_object()) throw ConfigError("\"device\" must be an object");
        reject_unknown_keys(d, {"n_channels", "tap_budget", "triggers"}, "device");
        cfg.device.n_channels = static_cast<int>(get_int(d, "n_channels", cfg.device.n_channels));
        cfg.device.tap_budget = static_cast<int>(get_int(d, "tap_budget", cfg.device.tap_budget));
        cfg.device.triggers = static_cast<int>(get_int(d, "triggers", cfg.device.triggers));
    }
    cfg.validate();
    return cfg;
}

SimulationConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open configuration file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

std::string config_to_json(const SimulationConfig& config) {
    ordered_json root;
    root["clock"] = {{"period_fs", config.clock.nominal_period.femtoseconds},
                     {"jitter_fs", config.clock.cycle_jitter_sigma.femtoseconds},
                     {"drift_ppm", config.clock.drift_ppm}};
    root["bank"] = {{"n_taps", config.bank.n_taps},
                    {"mismatch_fs", config.bank.mismatch_sigma.femtoseconds},
                    {"tap_jitter_fs", config.bank.tap_jitter_sigma.femtoseconds},
                    {"seed", config.bank.seed}};
    root["device"] = {{"n_channels", config.device.n_channels},
                      {"tap_budget", config.device.tap_budget},
                      {"triggers", config.device.triggers}};
    return root.dump(2) + "\n";
}

std::uint64_t config_hash(const SimulationConfig& config) {
    const std::string canonical = config_to_json(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace tdcsim
