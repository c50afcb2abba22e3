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

#include "tdcsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tdcsim/version.hpp"

namespace tdcsim {

namespace {

Duration rss_sigma(Duration a, Duration b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double fa = static_cast<double>(a.femtoseconds);
    const double fb = static_cast<double>(b.femtoseconds);
    return Duration(std::llround(std::sqrt(fa * fa + fb * fb)));
}

struct Stats {
    double mean = 0.0;
    double var = 0.0; // sample variance (n-1)
    std::int64_t mean_rounded = 0;
};

Duration fine_estimate(std::uint32_t code, int n_taps, Duration period,
                       const CalibrationTable* table) {
    if (table != nullptr) return apply_calibration(*table, code);
    return decode_fine_code(code, n_taps, period);
}

/// Per-trigger reconstructed times: coarse * nominal_period + decoded fine.
std::vector<std::int64_t> trigger_totals(const Measurement& m, int n_taps, Duration period,
                                         const ClockModel& clock,
                                         const CalibrationTable* table) {
    std::vector<std::int64_t> totals;
    totals.reserve(m.trigger_codes.size());
    for (std::size_t t = 0; t < m.trigger_codes.size(); ++t) {
        const Duration fine = fine_estimate(m.trigger_codes[t], n_taps, period, table);
        const Duration base = checked_mul(clock.nominal_period, m.trigger_coarse[t]);
        totals.push_back(checked_add(base, fine).femtoseconds);
    }
    return totals;
}

Stats stats_of(const std::vector<std::int64_t>& values) {
    Stats s;
    if (values.empty()) return s;
    __int128 sum = 0;
    for (std::int64_t v : values) sum += v;
    s.mean = static_cast<double>(sum) / static_cast<double>(values.size());
    const __int128 n = static_cast<__int128>(values.size());
    const __int128 twice = sum * 2 + n; // rounded divide, values are non-negative
    s.mean_rounded = static_cast<std::int64_t>(twice / (n * 2));
    if (values.size() > 1) {
        double acc = 0.0;
        for (std::int64_t v : values) {
            const double d = static_cast<double>(v) - s.mean;
            acc += d * d;
        }
        s.var = acc / static_cast<double>(values.size() - 1);
    }
    return s;
}

} // namespace

void SweepSpec::validate() const {
    if (start.is_negative()) throw ConfigError("sweep start must be >= 0");
    if (start > stop) throw ConfigError("sweep start must not exceed stop");
    if (step.femtoseconds <= 0) throw ConfigError("sweep step must be positive");
    if (triggers_per_point < 1) throw ConfigError("sweep needs at least 1 trigger per point");
}

std::size_t SweepSpec::point_count() const {
    validate();
    return static_cast<std::size_t>((stop.femtoseconds - start.femtoseconds) /
                                    step.femtoseconds) +
           1;
}

SweepReport run_sweep(const SweepSpec& spec, const Device& device,
                      const GeneratorModel& generator, const CalibrationTable* table,
                      std::vector<Frame>* capture_frames) {
    spec.validate();
    if (spec.calibrated && table == nullptr) {
        throw UsageError("calibrated sweep requested without a calibration table");
    }

    const ClockModel& clock = device.clock();
    const ReferenceBank& bank = device.bank(0);
    ChannelConfig cfg = device.config().channels.at(0);
    cfg.triggers_per_measurement = spec.triggers_per_point;
    cfg.input_jitter_sigma = rss_sigma(cfg.input_jitter_sigma, generator.pulse_jitter_sigma());

    if (table != nullptr && table->bins() != static_cast<std::size_t>(cfg.n_taps) + 1) {
        throw UsageError("calibration table was built for a different ladder");
    }

    // Reject out-of-range sweeps before any simulation runs.
    const Duration reach = checked_add(spec.stop, generator.accuracy());
    if (!cfg.coarse_enabled) {
        if (reach >= clock.nominal_period) {
            throw ConfigError("sweep exceeds one clock period and the coarse counter is disabled");
        }
    } else {
        const __int128 limit = static_cast<__int128>(clock.nominal_period.femtoseconds)
                               << 32; // coarse counter is 32 bits wide
        if (static_cast<__int128>(reach.femtoseconds) >= limit) {
            throw ConfigError("sweep exceeds the coarse-extended range");
        }
    }

    RandomSource root{spec.seed};
    RandomSource sweep_rng = root.substream(harness_scope::kSweep);

    SweepReport report;
    report.version = kVersionString;
    report.config_hash = config_hash(device.sim_config());
    report.seed = spec.seed;
    report.triggers_per_point = spec.triggers_per_point;
    report.calibrated = spec.calibrated;
    report.generator_accuracy = generator.accuracy();
    report.generator_pulse_jitter = generator.pulse_jitter_sigma();
    report.generator_systematic = generator.systematic_error();

    const std::size_t n_points = spec.point_count();
    report.points.reserve(n_points);

    double sq_error_acc = 0.0;
    std::int64_t max_abs = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const Duration requested =
            checked_add(spec.start, checked_mul(spec.step, static_cast<std::int64_t>(i)));
        const Duration emitted = generator.emitted_delay(requested);
        const Measurement m = convert(cfg, bank, clock, emitted, sweep_rng.substream(i));

        const auto totals =
            trigger_totals(m, cfg.n_taps, bank.period(), clock, spec.calibrated ? table : nullptr);
        const Stats st = stats_of(totals);

        SweepPoint point;
        point.requested = requested;
        point.mean_estimate = Duration(st.mean_rounded);
        point.stddev = Duration(std::llround(std::sqrt(st.var)));
        point.error = checked_sub(point.mean_estimate, requested);
        report.points.push_back(point);

        const double e = static_cast<double>(point.error.femtoseconds);
        sq_error_acc += e * e;
        max_abs = std::max<std::int64_t>(max_abs, std::llabs(point.error.femtoseconds));

        if (capture_frames != nullptr) {
            MeasurementPayload payload = make_measurement_payload(
                m, cfg.triggers_per_measurement, cfg.n_taps, /*include_bitstream=*/true,
                spec.calibrated);
            Frame frame;
            frame.type = FrameType::measurement;
            frame.channel_id = 0;
            frame.sequence = static_cast<std::uint32_t>(i);
            frame.payload = encode_measurement_payload(payload);
            capture_frames->push_back(std::move(frame));
        }
    }

    report.rms_error =
        Duration(std::llround(std::sqrt(sq_error_acc / static_cast<double>(n_points))));
    report.max_abs_error = Duration(max_abs);
    return report;
}

std::vector<Duration> resolution_probe_points(const ReferenceBank& bank, Duration base_delay) {
    const std::vector<Duration> thresholds = bank.sorted_static_thresholds();
    const Duration period = bank.period();

    struct Gap {
        std::int64_t width;
        std::int64_t start;
    };
    std::vector<Gap> gaps;
    gaps.reserve(thresholds.size());
    for (std::size_t i = 0; i + 1 < thresholds.size(); ++i) {
        gaps.push_back({thresholds[i + 1].femtoseconds - thresholds[i].femtoseconds,
                        thresholds[i].femtoseconds});
    }
    // Wrap gap: from the last threshold around to the first one next cycle.
    gaps.push_back({period.femtoseconds + thresholds.front().femtoseconds -
                        thresholds.back().femtoseconds,
                    thresholds.back().femtoseconds});
    std::stable_sort(gaps.begin(), gaps.end(),
                     [](const Gap& a, const Gap& b) { return a.width > b.width; });

    std::vector<Duration> probes;
    probes.push_back(base_delay);
    const std::size_t take = std::min<std::size_t>(2, gaps.size());
    for (std::size_t i = 0; i < take; ++i) {
        probes.push_back(Duration(std::max<std::int64_t>(0, gaps[i].start + 1)));
    }
    probes.push_back(Duration(std::max<std::int64_t>(0, gaps[0].start + gaps[0].width / 2)));

    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    return probes;
}

namespace {

struct ResolutionContext {
    const ChannelConfig* cfg;
    const ReferenceBank* bank;
    const ClockModel* clock;
    RandomSource root;
    std::vector<Duration> probes;
    int trials;
    // mean/var cache for probe bases, keyed by (probe, trial)
    std::map<std::pair<std::size_t, int>, Stats> base_stats;

    Stats measure(Duration delay, const RandomSource& rng) const {
        const Measurement m = convert(*cfg, *bank, *clock, delay, rng);
        return stats_of(trigger_totals(m, cfg->n_taps, bank->period(), *clock, nullptr));
    }

    const Stats& base(std::size_t probe, int trial) {
        const auto key = std::make_pair(probe, trial);
        auto it = base_stats.find(key);
        if (it == base_stats.end()) {
            const Stats st = measure(probes[probe],
                                     root.substream(probe * 2, static_cast<std::uint64_t>(trial)));
            it = base_stats.emplace(key, st).first;
        }
        return it->second;
    }

    bool significant(const Stats& base_st, const Stats& off_st, int n) const {
        const double diff = off_st.mean - base_st.mean;
        const double se = std::sqrt((base_st.var + off_st.var) / static_cast<double>(n));
        return diff > 3.0 * se;
    }

    bool detected(Duration step) {
        int votes = 0;
        for (int trial = 0; trial < trials; ++trial) {
            bool all_probes = true;
            for (std::size_t p = 0; p < probes.size() && all_probes; ++p) {
                const Stats& b = base(p, trial);
                const Stats o =
                    measure(checked_add(probes[p], step),
                            root.substream(p * 2 + 1, static_cast<std::uint64_t>(trial)));
                all_probes = significant(b, o, cfg->triggers_per_measurement);
            }
            if (all_probes) ++votes;
            // Early majority exit either way.
            if (votes > trials / 2) return true;
            if (votes + (trials - trial - 1) <= trials / 2) return false;
        }
        return votes > trials / 2;
    }
};

} // namespace

Duration estimate_resolution(const Device& device, Duration base_delay, Duration max_step,
                             int triggers, std::uint64_t seed, int trials) {
    if (base_delay.is_negative()) throw ConfigError("resolution base delay must be >= 0");
    if (max_step.femtoseconds <= 0) throw ConfigError("resolution max step must be positive");
    if (triggers < 1) throw ConfigError("resolution search needs at least 1 trigger");
    if (trials < 1) throw ConfigError("resolution search needs at least 1 trial");

    ResolutionContext ctx{nullptr,
                          nullptr,
                          nullptr,
                          RandomSource(seed).substream(harness_scope::kResolution),
                          {},
                          trials,
                          {}};
    ChannelConfig cfg = device.config().channels.at(0);
    cfg.triggers_per_measurement = triggers;
    cfg.coarse_enabled = true; // probes may wrap past the period during the search
    const ReferenceBank& bank = device.bank(0);
    const ClockModel& clock = device.clock();
    ctx.cfg = &cfg;
    ctx.bank = &bank;
    ctx.clock = &clock;
    ctx.probes = resolution_probe_points(bank, base_delay);

    // A noiseless setup makes every trial identical; one suffices.
    if (bank.tap_jitter_sigma().is_zero() && clock.cycle_jitter_sigma.is_zero() &&
        cfg.input_jitter_sigma.is_zero()) {
        ctx.trials = 1;
    }

    if (!ctx.detected(max_step)) {
        throw NotResolvableError("no step up to the limit changes the output significantly",
                                 max_step.femtoseconds);
    }
    std::int64_t lo = 1;
    std::int64_t hi = max_step.femtoseconds;
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (ctx.detected(Duration(mid))) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return Duration(lo);
}

Duration estimate_precision(const Device& device, Duration delay, int repeats,
                            std::uint64_t seed) {
    return estimate_precision(device.config().channels.at(0), device.bank(0), device.clock(),
                              delay, repeats, seed);
}

Duration estimate_precision(const ChannelConfig& cfg, const ReferenceBank& bank,
                            const ClockModel& clock, Duration delay, int repeats,
                            std::uint64_t seed) {
    if (repeats < 30) throw ConfigError("precision estimate needs at least 30 repeats");
    if (delay.is_negative()) throw DomainError("precision delay must be >= 0");

    RandomSource root = RandomSource(seed).substream(harness_scope::kPrecision);

    std::vector<std::int64_t> estimates;
    estimates.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        const Measurement m =
            convert(cfg, bank, clock, delay, root.substream(static_cast<std::uint64_t>(r)));
        const Stats st = stats_of(trigger_totals(m, cfg.n_taps, bank.period(), clock, nullptr));
        estimates.push_back(st.mean_rounded);
    }
    const Stats spread = stats_of(estimates);
    return Duration(std::llround(std::sqrt(spread.var)));
}

} // namespace tdcsim
