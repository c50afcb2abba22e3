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

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdcsim/capture.hpp"
#include "tdcsim/harness.hpp"
#include "tdcsim/report.hpp"
#include "tdcsim/version.hpp"

namespace {

using tdcsim::Duration;

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
    cmd->add_option("--config", opts->config_path, "Device configuration JSON file");
    cmd->add_option("--seed", opts->seed, "Run seed (default 0)");
    cmd->add_option("--out", opts->out_path, "Output path (default: stdout)");
}

tdcsim::SimulationConfig load_config(const CommonOpts& opts) {
    if (opts.config_path.empty()) return tdcsim::SimulationConfig{};
    return tdcsim::load_config_file(opts.config_path);
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tdcsim::ConfigError("cannot open output file: " + path);
    out << content;
    if (!out) throw tdcsim::Error("write failed: " + path);
}

Duration ps_to_duration(double ps, const char* what) {
    const double fs = ps * 1000.0;
    if (!std::isfinite(fs) || std::fabs(fs) > 9.0e18) {
        throw tdcsim::ConfigError(std::string(what) + " out of range");
    }
    return Duration(std::llround(fs));
}

/// Single-trigger code-density calibration on channel 0.
tdcsim::CalibrationTable build_table(const tdcsim::Device& device, std::uint64_t seed,
                                     std::uint64_t samples_per_bin,
                                     tdcsim::CodeHistogram* hist_out = nullptr) {
    tdcsim::ChannelConfig cal_cfg = device.config().channels.at(0);
    cal_cfg.triggers_per_measurement = 1;
    const std::uint64_t bins = static_cast<std::uint64_t>(cal_cfg.n_taps) + 1;
    auto rng = tdcsim::RandomSource(seed).substream(tdcsim::harness_scope::kCalibration);
    auto [hist, table] = tdcsim::code_density_calibrate(cal_cfg, device.bank(0), device.clock(),
                                                        samples_per_bin * bins, rng);
    if (hist_out != nullptr) *hist_out = std::move(hist);
    return table;
}

// ---- sweep ----

struct SweepOpts {
    CommonOpts common;
    double start_ps = 0.0;
    double stop_ps = 3000.0;
    double step_ps = 50.0;
    int triggers = 0; // 0: take the device default
    bool calibrated = false;
    std::uint64_t cal_samples_per_bin = 200;
    double gen_accuracy_ps = 0.0;
    double gen_jitter_ps = 0.0;
    std::string format = "csv";
    std::string capture_path;
};

int run_sweep_cmd(const SweepOpts& opts) {
    const tdcsim::SimulationConfig sim = load_config(opts.common);
    tdcsim::Device device(sim);

    tdcsim::SweepSpec spec;
    spec.start = ps_to_duration(opts.start_ps, "--start-ps");
    spec.stop = ps_to_duration(opts.stop_ps, "--stop-ps");
    spec.step = ps_to_duration(opts.step_ps, "--step-ps");
    spec.triggers_per_point = opts.triggers > 0 ? opts.triggers : sim.device.triggers;
    spec.calibrated = opts.calibrated;
    spec.seed = opts.common.seed;

    const tdcsim::GeneratorModel generator(
        ps_to_duration(opts.gen_accuracy_ps, "--gen-accuracy-ps"),
        ps_to_duration(opts.gen_jitter_ps, "--gen-jitter-ps"),
        tdcsim::RandomSource(opts.common.seed).substream(tdcsim::harness_scope::kGenerator));

    tdcsim::CalibrationTable table;
    if (opts.calibrated) {
        table = build_table(device, opts.common.seed, opts.cal_samples_per_bin);
    }

    std::vector<tdcsim::Frame> frames;
    const tdcsim::SweepReport report =
        tdcsim::run_sweep(spec, device, generator, opts.calibrated ? &table : nullptr,
                          opts.capture_path.empty() ? nullptr : &frames);

    write_output(opts.common.out_path,
                 tdcsim::emit_report(report, tdcsim::report_format_from_name(opts.format)));

    if (!opts.capture_path.empty()) {
        tdcsim::CaptureFile capture;
        capture.config = device.sim_config();
        if (opts.calibrated) capture.calibration = table;
        capture.frames = std::move(frames);
        tdcsim::write_capture_file(opts.capture_path, capture);
    }
    std::cerr << "sweep: " << report.points.size() << " points, rms error "
              << tdcsim::to_ps_string(report.rms_error) << ", max |error| "
              << tdcsim::to_ps_string(report.max_abs_error) << "\n";
    return 0;
}

// ---- calibrate ----

struct CalibrateOpts {
    CommonOpts common;
    std::uint64_t samples_per_bin = 200;
    std::string report_path;
    std::string capture_path;
};

int run_calibrate_cmd(const CalibrateOpts& opts) {
    const tdcsim::SimulationConfig sim = load_config(opts.common);
    tdcsim::Device device(sim);

    tdcsim::CodeHistogram hist;
    const tdcsim::CalibrationTable table =
        build_table(device, opts.common.seed, opts.samples_per_bin, &hist);

    std::ostringstream csv;
    csv << "code,time_fs\n";
    for (std::size_t c = 0; c < table.code_to_time.size(); ++c) {
        csv << c << ',' << table.code_to_time[c].femtoseconds << '\n';
    }
    write_output(opts.common.out_path, csv.str());

    const tdcsim::DnlInlReport lin =
        tdcsim::compute_dnl_inl(hist, table.period, sim.bank.n_taps);
    if (!opts.report_path.empty()) {
        nlohmann::ordered_json j;
        j["version"] = tdcsim::kVersionString;
        j["config_hash"] = tdcsim::config_hash(device.sim_config());
        j["seed"] = opts.common.seed;
        j["n_samples"] = table.n_samples;
        j["bank_fingerprint"] = table.bank_fingerprint;
        j["max_abs_dnl_lsb"] = lin.max_abs_dnl;
        j["max_abs_inl_lsb"] = lin.max_abs_inl;
        write_output(opts.report_path, j.dump(2) + "\n");
    }
    if (!opts.capture_path.empty()) {
        tdcsim::CaptureFile capture;
        capture.config = device.sim_config();
        capture.calibration = table;
        tdcsim::write_capture_file(opts.capture_path, capture);
    }
    std::cerr << "calibrate: " << table.n_samples << " samples, max |DNL| " << lin.max_abs_dnl
              << " LSB, max |INL| " << lin.max_abs_inl << " LSB\n";
    return 0;
}

// ---- characterize ----

struct CharacterizeOpts {
    CommonOpts common;
    double base_ps = 2.5;
    double max_step_ps = 20.0;
    int res_triggers = 1;
    double delay_ps = 1502.5;
    int repeats = 100;
    std::uint64_t samples_per_bin = 200;
};

int run_characterize_cmd(const CharacterizeOpts& opts) {
    const tdcsim::SimulationConfig sim = load_config(opts.common);
    tdcsim::Device device(sim);

    const Duration resolution = tdcsim::estimate_resolution(
        device, ps_to_duration(opts.base_ps, "--base-ps"),
        ps_to_duration(opts.max_step_ps, "--max-step-ps"), opts.res_triggers, opts.common.seed);
    const Duration precision = tdcsim::estimate_precision(
        device, ps_to_duration(opts.delay_ps, "--delay-ps"), opts.repeats, opts.common.seed);

    tdcsim::CodeHistogram hist;
    const tdcsim::CalibrationTable table =
        build_table(device, opts.common.seed, opts.samples_per_bin, &hist);
    const tdcsim::DnlInlReport lin =
        tdcsim::compute_dnl_inl(hist, table.period, sim.bank.n_taps);

    nlohmann::ordered_json j;
    j["version"] = tdcsim::kVersionString;
    j["config_hash"] = tdcsim::config_hash(device.sim_config());
    j["seed"] = opts.common.seed;
    j["resolution_fs"] = resolution.femtoseconds;
    j["precision_fs"] = precision.femtoseconds;
    j["max_abs_dnl_lsb"] = lin.max_abs_dnl;
    j["max_abs_inl_lsb"] = lin.max_abs_inl;
    j["params"] = {{"base_fs", ps_to_duration(opts.base_ps, "base").femtoseconds},
                   {"max_step_fs", ps_to_duration(opts.max_step_ps, "max step").femtoseconds},
                   {"resolution_triggers", opts.res_triggers},
                   {"precision_delay_fs", ps_to_duration(opts.delay_ps, "delay").femtoseconds},
                   {"precision_repeats", opts.repeats},
                   {"calibration_samples_per_bin", opts.samples_per_bin}};
    write_output(opts.common.out_path, j.dump(2) + "\n");
    return 0;
}

// ---- decode ----

struct DecodeOpts {
    CommonOpts common;
    std::string in_path;
};

int run_decode_cmd(const DecodeOpts& opts) {
    const tdcsim::CaptureReadResult result = tdcsim::read_capture_file(opts.in_path);
    const tdcsim::SimulationConfig& sim = result.file.config;
    const Duration period = sim.clock.nominal_period;

    std::uint64_t payload_errors = 0;
    std::ostringstream csv;
    csv << "channel,sequence,coarse,triggers,n_taps,raw_code,fine_fs,total_fs,calibrated_fs\n";
    for (const tdcsim::Frame& frame : result.file.frames) {
        if (frame.type != tdcsim::FrameType::measurement) continue;
        tdcsim::MeasurementPayload payload;
        try {
            payload = tdcsim::decode_measurement_payload(frame.payload);
        } catch (const tdcsim::IntegrityError&) {
            ++payload_errors;
            continue;
        }
        tdcsim::ChannelConfig cfg;
        cfg.n_taps = payload.n_taps;
        cfg.triggers_per_measurement = payload.triggers;
        const Duration fine = tdcsim::decode_uncalibrated(payload.raw_code, cfg, period);
        const Duration total =
            tdcsim::checked_add(tdcsim::checked_mul(period, payload.coarse), fine);

        std::string calibrated_fs;
        const auto& table = result.file.calibration;
        if (table.has_value() &&
            table->bins() == static_cast<std::size_t>(payload.n_taps) + 1) {
            if (payload.has_bitstream) {
                const tdcsim::BitMatrix bits = tdcsim::BitMatrix::from_packed_tap_major(
                    payload.packed_bits, payload.triggers, payload.n_taps);
                __int128 sum = 0;
                for (int t = 0; t < payload.triggers; ++t) {
                    sum += tdcsim::apply_calibration(*table, bits.row_popcount(t)).femtoseconds;
                }
                const __int128 n = payload.triggers;
                const std::int64_t mean = static_cast<std::int64_t>((sum * 2 + n) / (n * 2));
                calibrated_fs = std::to_string(
                    tdcsim::checked_add(tdcsim::checked_mul(period, payload.coarse),
                                        Duration(mean))
                        .femtoseconds);
            } else {
                const double mean_code = static_cast<double>(payload.raw_code) /
                                         static_cast<double>(payload.triggers);
                const Duration fine_cal =
                    tdcsim::apply_calibration_interpolated(*table, mean_code);
                calibrated_fs = std::to_string(
                    tdcsim::checked_add(tdcsim::checked_mul(period, payload.coarse), fine_cal)
                        .femtoseconds);
            }
        }
        csv << static_cast<int>(frame.channel_id) << ',' << frame.sequence << ','
            << payload.coarse << ',' << payload.triggers << ',' << payload.n_taps << ','
            << payload.raw_code << ',' << fine.femtoseconds << ',' << total.femtoseconds << ','
            << calibrated_fs << '\n';
    }
    write_output(opts.common.out_path, csv.str());

    std::cerr << "decode: " << result.file.frames.size() << " frames, "
              << result.integrity_errors + payload_errors << " integrity errors, "
              << result.version_errors << " version errors, " << result.skipped_bytes
              << " skipped bytes\n";
    if (!result.clean() || payload_errors > 0) return 2;
    return 0;
}

// ---- selftest ----

int run_selftest_cmd(const CommonOpts& common) {
    int failures = 0;
    std::ostringstream log;
    auto check = [&failures, &log](const char* name, bool ok) {
        log << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    {
        const char* text = "123456789";
        check("crc32 check value 0xCBF43926",
              tdcsim::crc32(reinterpret_cast<const std::uint8_t*>(text), 9) == 0xCBF43926u);
    }
    {
        tdcsim::Frame frame;
        frame.type = tdcsim::FrameType::ack;
        frame.sequence = 7;
        auto bytes = tdcsim::encode_frame(frame);
        bool roundtrip = tdcsim::decode_frame(bytes) == frame;
        bytes[6] ^= 0x10;
        bool detects = false;
        try {
            tdcsim::decode_frame(bytes);
        } catch (const tdcsim::IntegrityError&) {
            detects = true;
        }
        check("frame roundtrip and corruption detection", roundtrip && detects);
    }
    {
        const tdcsim::SimulationConfig sim;
        tdcsim::Device device(sim);
        const tdcsim::RandomSource rng(common.seed);
        const auto a = device.measure_channel(0, tdcsim::from_ps(1500), rng);
        const auto b = device.measure_channel(0, tdcsim::from_ps(1500), rng);
        check("conversion determinism", a.raw_code == b.raw_code &&
                                            tdcsim::sum_bits(a) == a.raw_code &&
                                            a.raw_code == b.bitstream.popcount());
    }
    {
        tdcsim::SimulationConfig sim;
        sim.device.triggers = 1;
        tdcsim::Device device(sim);
        const auto m =
            device.measure_channel(0, tdcsim::from_ps(1500), tdcsim::RandomSource(common.seed));
        bool prefix = true;
        bool seen_zero = false;
        for (int i = 0; i < sim.bank.n_taps; ++i) {
            const bool bit = m.bitstream.get(0, i);
            if (!bit) seen_zero = true;
            if (bit && seen_zero) prefix = false;
        }
        check("thermometer prefix at zero noise", prefix && m.raw_code == 300);
    }
    {
        tdcsim::SimulationConfig sim;
        sim.bank.n_taps = 60;
        sim.device.triggers = 1;
        tdcsim::Device device(sim);
        tdcsim::ChannelConfig cfg = device.config().channels.at(0);
        cfg.triggers_per_measurement = 1;
        auto [hist, table] = tdcsim::code_density_calibrate(
            cfg, device.bank(0), device.clock(), 100 * 61, tdcsim::RandomSource(common.seed));
        bool monotone = true;
        for (std::size_t c = 1; c < table.code_to_time.size(); ++c) {
            if (table.code_to_time[c] < table.code_to_time[c - 1]) monotone = false;
        }
        std::uint64_t total = 0;
        for (auto v : hist.counts) total += v;
        check("calibration table monotone and histogram conserved",
              monotone && total == hist.n_samples);
    }
    {
        tdcsim::SimulationConfig sim;
        tdcsim::Device device(sim);
        const auto before = device.config();
        bool rejected = false;
        try {
            device.reconfigure(101, 600, 1000);
        } catch (const tdcsim::ConfigError&) {
            rejected = true;
        }
        const auto& after = device.config();
        check("budget rejection is atomic",
              rejected && after.config_generation == before.config_generation &&
                  after.n_channels() == before.n_channels());
    }
    {
        const tdcsim::ClockModel clock;
        bool ok = true;
        tdcsim::RandomSource rng(common.seed);
        for (int i = 0; i < 1000 && ok; ++i) {
            const Duration d(rng.next_below(1'000'000'000));
            const std::int64_t coarse = d.femtoseconds / clock.nominal_period.femtoseconds;
            const Duration fine(d.femtoseconds % clock.nominal_period.femtoseconds);
            ok = tdcsim::combine_coarse_fine(static_cast<std::uint64_t>(coarse), fine, clock) == d;
        }
        check("coarse/fine split-combine roundtrip", ok);
    }

    log << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    write_output(common.out_path, log.str());
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavioral simulator and characterization toolkit for "
                 "stochastic-bitstream time-to-digital converters"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tdcsim::kVersionString);

    SweepOpts sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a delay sweep and report the transfer/error curves");
    add_common(sweep_cmd, &sweep.common);
    sweep_cmd->add_option("--start-ps", sweep.start_ps, "Sweep start (ps)");
    sweep_cmd->add_option("--stop-ps", sweep.stop_ps, "Sweep stop (ps)");
    sweep_cmd->add_option("--step-ps", sweep.step_ps, "Sweep step (ps)");
    sweep_cmd->add_option("--triggers", sweep.triggers, "Triggers per point (default: config)");
    sweep_cmd->add_flag("--calibrated", sweep.calibrated, "Decode through a code-density calibration table");
    sweep_cmd->add_option("--cal-samples-per-bin", sweep.cal_samples_per_bin,
                          "Calibration samples per code bin (default 200)");
    sweep_cmd->add_option("--gen-accuracy-ps", sweep.gen_accuracy_ps,
                          "Generator accuracy: systematic offset bound (ps)");
    sweep_cmd->add_option("--gen-jitter-ps", sweep.gen_jitter_ps, "Generator per-pulse jitter (ps)");
    sweep_cmd->add_option("--format", sweep.format, "Report format: csv, json or svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    sweep_cmd->add_option("--capture", sweep.capture_path, "Also write a capture file");

    CalibrateOpts calibrate;
    CLI::App* calibrate_cmd =
        app.add_subcommand("calibrate", "Build a code-density calibration table");
    add_common(calibrate_cmd, &calibrate.common);
    calibrate_cmd->add_option("--samples-per-bin", calibrate.samples_per_bin,
                              "Stimulus samples per code bin (default 200)");
    calibrate_cmd->add_option("--report", calibrate.report_path, "Write a DNL/INL JSON report");
    calibrate_cmd->add_option("--capture", calibrate.capture_path,
                              "Write a capture file holding the table");

    CharacterizeOpts characterize;
    CLI::App* characterize_cmd = app.add_subcommand(
        "characterize", "Estimate resolution, precision and DNL/INL");
    add_common(characterize_cmd, &characterize.common);
    characterize_cmd->add_option("--base-ps", characterize.base_ps, "Resolution base delay (ps)");
    characterize_cmd->add_option("--max-step-ps", characterize.max_step_ps,
                                 "Resolution search limit (ps)");
    characterize_cmd->add_option("--res-triggers", characterize.res_triggers,
                                 "Triggers per resolution probe");
    characterize_cmd->add_option("--delay-ps", characterize.delay_ps, "Precision test delay (ps)");
    characterize_cmd->add_option("--repeats", characterize.repeats,
                                 "Precision repeats (>= 30)");
    characterize_cmd->add_option("--samples-per-bin", characterize.samples_per_bin,
                                 "Calibration samples per code bin");

    DecodeOpts decode;
    CLI::App* decode_cmd = app.add_subcommand("decode", "Decode a capture file to CSV");
    add_common(decode_cmd, &decode.common);
    decode_cmd->add_option("--in", decode.in_path, "Capture file to decode")->required();

    CommonOpts selftest_common;
    CLI::App* selftest_cmd = app.add_subcommand("selftest", "Run the built-in invariant checks");
    add_common(selftest_cmd, &selftest_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(sweep_cmd)) return run_sweep_cmd(sweep);
        if (app.got_subcommand(calibrate_cmd)) return run_calibrate_cmd(calibrate);
        if (app.got_subcommand(characterize_cmd)) return run_characterize_cmd(characterize);
        if (app.got_subcommand(decode_cmd)) return run_decode_cmd(decode);
        if (app.got_subcommand(selftest_cmd)) return run_selftest_cmd(selftest_common);
    } catch (const tdcsim::IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 2;
    } catch (const tdcsim::VersionError& e) {
        std::cerr << "version error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
