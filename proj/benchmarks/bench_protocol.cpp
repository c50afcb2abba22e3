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

#include "tdcsim/frame.hpp"

namespace {

using namespace tdcsim;

Frame sample_frame(std::size_t payload_size) {
    Frame frame;
    frame.type = FrameType::measurement;
    frame.channel_id = 7;
    frame.sequence = 424242;
    frame.payload.resize(payload_size);
    for (std::size_t i = 0; i < payload_size; ++i) {
        frame.payload[i] = static_cast<std::uint8_t>(i * 31 + 5);
    }
    return frame;
}

void BM_EncodeFrame(benchmark::State& state) {
    const Frame frame = sample_frame(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode_frame(frame));
    }
    state.SetBytesProcessed(state.iterations() *
                            static_cast<std::int64_t>(state.range(0) + kFrameOverhead));
}
BENCHMARK(BM_EncodeFrame)->Arg(16)->Arg(1024)->Arg(60000);

void BM_DecodeFrame(benchmark::State& state) {
    const auto bytes = encode_frame(sample_frame(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(decode_frame(bytes));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_DecodeFrame)->Arg(16)->Arg(1024)->Arg(60000);

void BM_StreamingResync(benchmark::State& state) {
    std::vector<std::uint8_t> stream;
    for (int i = 0; i < 64; ++i) {
        auto bytes = encode_frame(sample_frame(200));
        if (i % 5 == 2) bytes[20] ^= 0x08; // every fifth frame corrupted
        stream.insert(stream.end(), bytes.begin(), bytes.end());
    }
    for (auto _ : state) {
        FrameDecoder decoder;
        decoder.feed(stream);
        decoder.finish();
        std::size_t n = 0;
        while (decoder.next()) ++n;
        benchmark::DoNotOptimize(n);
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(stream.size()));
}
BENCHMARK(BM_StreamingResync);

} // namespace

BENCHMARK_MAIN();
