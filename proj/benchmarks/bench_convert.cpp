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

#include <benchmark/benchmark.h>

#include "tdcsim/calibration.hpp"
#include "tdcsim/channel.hpp"

namespace {

using namespace tdcsim;

struct Rig {
    ChannelConfig cfg;
    ReferenceBank bank;
    ClockModel clock;

    Rig(int taps, int triggers, std::int64_t jitter_fs)
        : cfg{},
          bank(ReferenceBank::build(taps, from_ps(3000), from_fs(1500), from_fs(jitter_fs),
                                    RandomSource(1).substream(1))),
          clock{} {
        cfg.n_taps = taps;
        cfg.triggers_per_measurement = triggers;
    }
};

void BM_ConvertNoiseFree(benchmark::State& state) {
    Rig rig(600, static_cast<int>(state.range(0)), 0);
    const RandomSource rng(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            convert(rig.cfg, rig.bank, rig.clock, from_fs(1'502'500), rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 600);
}
BENCHMARK(BM_ConvertNoiseFree)->Arg(1)->Arg(100)->Arg(1000);

void BM_ConvertDithered(benchmark::State& state) {
    Rig rig(600, static_cast<int>(state.range(0)), 5000);
    const RandomSource rng(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            convert(rig.cfg, rig.bank, rig.clock, from_fs(1'502'500), rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 600);
}
BENCHMARK(BM_ConvertDithered)->Arg(1)->Arg(100)->Arg(1000);

void BM_CodeDensityCalibration(benchmark::State& state) {
    Rig rig(600, 1, 5000);
    for (auto _ : state) {
        auto result = code_density_calibrate(rig.cfg, rig.bank, rig.clock, 100ull * 601ull,
                                             RandomSource(3).substream(2));
        benchmark::DoNotOptimize(result.second.code_to_time.data());
    }
}
BENCHMARK(BM_CodeDensityCalibration)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
