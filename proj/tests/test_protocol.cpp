#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <zlib.h>

#include "tdcsim/config.hpp"
#include "tdcsim/device.hpp"
#include "tdcsim/frame.hpp"

using namespace tdcsim;

namespace {

Frame random_frame(std::mt19937_64& gen) {
    Frame frame;
    frame.type = static_cast<FrameType>(1 + gen() % 4);
    frame.channel_id = static_cast<std::uint8_t>(gen() % 128);
    frame.sequence = static_cast<std::uint32_t>(gen());
    const std::size_t len = gen() % 200;
    frame.payload.resize(len);
    for (auto& b : frame.payload) b = static_cast<std::uint8_t>(gen());
    return frame;
}

} // namespace

TEST_CASE("crc32 matches the standard check value and an independent implementation") {
    const std::uint8_t digits[] = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
    CHECK(crc32(digits, 9) == 0xCBF43926u);

    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint8_t> data(gen() % 300);
        for (auto& b : data) b = static_cast<std::uint8_t>(gen());
        const auto zlib_crc = static_cast<std::uint32_t>(
            ::crc32(0L, data.data(), static_cast<uInt>(data.size())));
        CHECK(crc32(data) == zlib_crc);
    }
}

TEST_CASE("the minimal ack frame round-trips byte-exactly") {
    Frame frame;
    frame.type = FrameType::ack;
    frame.channel_id = 0;
    frame.sequence = 0;
    const auto bytes = encode_frame(frame);
    CHECK(bytes.size() == kFrameOverhead);
    CHECK(bytes[0] == 0xA5);
    CHECK(bytes[1] == 0x5A);
    const Frame back = decode_frame(bytes);
    CHECK(back == frame);
    CHECK(encode_frame(back) == bytes);
}

TEST_CASE("random frames round-trip through one-shot decode") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 2000; ++trial) {
        const Frame frame = random_frame(gen);
        const auto bytes = encode_frame(frame);
        const Frame back = decode_frame(bytes);
        CHECK(back == frame);
        CHECK(encode_frame(back) == bytes);
    }
}

TEST_CASE("every single-bit corruption of a frame is an integrity error") {
    Frame frame;
    frame.type = FrameType::measurement;
    frame.channel_id = 3;
    frame.sequence = 0xDEADBEEF;
    frame.payload = {0x00, 0x11, 0x22, 0x33, 0xA5, 0x5A, 0xFF};
    const auto bytes = encode_frame(frame);
    for (std::size_t byte = 0; byte < bytes.size(); ++byte) {
        for (int bit = 0; bit < 8; ++bit) {
            auto corrupted = bytes;
            corrupted[byte] ^= static_cast<std::uint8_t>(1u << bit);
            CHECK_THROWS_AS(decode_frame(corrupted), IntegrityError);
        }
    }
}

TEST_CASE("a crc-valid frame with an unknown version is a version error") {
    Frame frame;
    frame.type = FrameType::ack;
    frame.version = 9;
    const auto bytes = encode_frame(frame);
    CHECK_THROWS_AS(decode_frame(bytes), VersionError);

    FrameDecoder decoder;
    decoder.feed(bytes);
    decoder.finish();
    CHECK(!decoder.next().has_value());
    CHECK(decoder.version_errors() == 1);
    CHECK(decoder.integrity_errors() == 0);
}

TEST_CASE("streaming decoder survives chunked input") {
    std::mt19937_64 gen(3);
    std::vector<Frame> sent;
    std::vector<std::uint8_t> stream;
    for (int i = 0; i < 100; ++i) {
        Frame frame = random_frame(gen);
        frame.sequence = static_cast<std::uint32_t>(i);
        const auto bytes = encode_frame(frame);
        stream.insert(stream.end(), bytes.begin(), bytes.end());
        sent.push_back(std::move(frame));
    }
    FrameDecoder decoder;
    std::size_t pos = 0;
    std::vector<Frame> received;
    while (pos < stream.size()) {
        const std::size_t chunk = std::min<std::size_t>(1 + gen() % 23, stream.size() - pos);
        decoder.feed(stream.data() + pos, chunk);
        pos += chunk;
        while (auto f = decoder.next()) received.push_back(std::move(*f));
    }
    decoder.finish();
    while (auto f = decoder.next()) received.push_back(std::move(*f));
    CHECK(received == sent);
    CHECK(decoder.integrity_errors() == 0);
    CHECK(decoder.skipped_bytes() == 0);
}

TEST_CASE("decoder drops corrupt frames and resynchronizes on the next marker") {
    std::mt19937_64 gen(4);
    std::vector<std::uint8_t> stream;
    std::vector<std::uint32_t> good_sequences;
    const int total = 60;
    int corrupted = 0;
    std::vector<std::size_t> starts;
    for (int i = 0; i < total; ++i) {
        Frame frame = random_frame(gen);
        frame.sequence = static_cast<std::uint32_t>(1000 + i);
        frame.payload.resize(20 + gen() % 40);
        for (auto& b : frame.payload) b = static_cast<std::uint8_t>(gen());
        const auto bytes = encode_frame(frame);
        starts.push_back(stream.size());
        stream.insert(stream.end(), bytes.begin(), bytes.end());
        if (i % 7 == 3) {
            // flip one payload byte of this frame
            stream[starts.back() + kFrameHeaderSize + 5] ^= 0x40;
            ++corrupted;
        } else {
            good_sequences.push_back(frame.sequence);
        }
    }
    FrameDecoder decoder;
    decoder.feed(stream);
    decoder.finish();
    std::vector<std::uint32_t> received;
    while (auto f = decoder.next()) received.push_back(f->sequence);
    CHECK(received == good_sequences);
    CHECK(received.size() == static_cast<std::size_t>(total - corrupted));
    CHECK(decoder.integrity_errors() >= static_cast<std::uint64_t>(corrupted));
}

TEST_CASE("a corrupted length field cannot swallow the frames behind it") {
    std::mt19937_64 gen(5);
    std::vector<std::uint8_t> stream;
    std::vector<std::uint32_t> expected;
    std::size_t first_len_pos = 0;
    for (int i = 0; i < 10; ++i) {
        Frame frame = random_frame(gen);
        frame.sequence = static_cast<std::uint32_t>(i);
        frame.payload.resize(16);
        const auto bytes = encode_frame(frame);
        if (i == 0) {
            first_len_pos = stream.size() + 9;
        } else {
            expected.push_back(frame.sequence);
        }
        stream.insert(stream.end(), bytes.begin(), bytes.end());
    }
    // Claim a huge payload for frame 0: the decoder must not lose the rest.
    stream[first_len_pos] = 0xFF;
    stream[first_len_pos + 1] = 0xFF;

    FrameDecoder decoder;
    decoder.feed(stream);
    decoder.finish();
    std::vector<std::uint32_t> received;
    while (auto f = decoder.next()) received.push_back(f->sequence);
    CHECK(received == expected);
    CHECK(decoder.integrity_errors() >= 1);
}

TEST_CASE("random garbage never decodes and never crashes") {
    std::mt19937_64 gen(6);
    FrameDecoder decoder;
    std::size_t decoded = 0;
    for (int chunk = 0; chunk < 200; ++chunk) {
        std::vector<std::uint8_t> junk(1 + gen() % 512);
        for (auto& b : junk) b = static_cast<std::uint8_t>(gen());
        decoder.feed(junk);
        while (decoder.next()) ++decoded;
    }
    decoder.finish();
    while (decoder.next()) ++decoded;
    // A 32-bit CRC makes an accidental frame in ~100 KB of noise implausible.
    CHECK(decoded == 0);

    // Payload decoding of noise either rejects with IntegrityError or yields
    // a structurally consistent record; it never crashes.
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::uint8_t> junk(gen() % 64);
        for (auto& b : junk) b = static_cast<std::uint8_t>(gen());
        try {
            const MeasurementPayload p = decode_measurement_payload(junk);
            CHECK(p.raw_code <= static_cast<std::uint64_t>(p.triggers) * p.n_taps);
        } catch (const IntegrityError&) {
        }
    }
}

TEST_CASE("a truncated tail waits for more data, then decodes") {
    Frame frame;
    frame.type = FrameType::command;
    frame.payload = {1, 2, 3, 4, 5};
    const auto bytes = encode_frame(frame);
    FrameDecoder decoder;
    decoder.feed(bytes.data(), bytes.size() - 4);
    CHECK(!decoder.next().has_value());
    CHECK(decoder.integrity_errors() == 0);
    decoder.feed(bytes.data() + bytes.size() - 4, 4);
    const auto out = decoder.next();
    REQUIRE(out.has_value());
    CHECK(*out == frame);
}

TEST_CASE("measurement payload round-trips and validates its population count") {
    SimulationConfig sim;
    sim.device.triggers = 16;
    Device device(sim);
    const auto m = device.measure_channel(0, from_ps(1502), RandomSource(5));
    const auto payload = make_measurement_payload(m, 16, 600, true, false);
    REQUIRE(payload.has_bitstream);
    const auto bytes = encode_measurement_payload(payload);
    const auto back = decode_measurement_payload(bytes);
    CHECK(back == payload);
    CHECK(back.raw_code == m.raw_code);

    // Flipping a bitstream byte breaks the popcount invariant.
    auto corrupt = bytes;
    corrupt[20] ^= 0x01;
    CHECK_THROWS_AS(decode_measurement_payload(corrupt), IntegrityError);

    // Unknown flag bits are rejected.
    auto bad_flags = bytes;
    bad_flags.back() |= 0x80;
    CHECK_THROWS_AS(decode_measurement_payload(bad_flags), IntegrityError);
}

TEST_CASE("oversized bitstreams stay off the wire") {
    SimulationConfig sim; // 1000 triggers x 600 taps does not fit a u16 payload
    Device device(sim);
    const auto m = device.measure_channel(0, from_ps(1500), RandomSource(1));
    const auto payload = make_measurement_payload(m, 1000, 600, true, false);
    CHECK(!payload.has_bitstream);
    CHECK(payload.raw_code == m.raw_code);
    const auto bytes = encode_measurement_payload(payload);
    CHECK(bytes.size() == kMeasurementPayloadFixedSize);
    CHECK(decode_measurement_payload(bytes) == payload);
}

TEST_CASE("device applies valid reconfigurations atomically") {
    SimulationConfig sim;
    sim.device.n_channels = 100;
    sim.device.tap_budget = 60000;
    Device device(sim);
    CHECK(device.config().n_channels() == 100);
    CHECK(device.config().total_taps() == 60000);

    const auto next = device.reconfigure(50, 1200, 500);
    CHECK(next.config_generation == 1);
    CHECK(next.n_channels() == 50);
    CHECK(next.channels[0].n_taps == 1200);
    CHECK(device.bank(0).size() == 1200);
}

TEST_CASE("budget-exceeded reconfiguration names both numbers and changes nothing") {
    SimulationConfig sim;
    sim.device.n_channels = 100;
    sim.device.tap_budget = 60000;
    Device device(sim);
    const auto before = device.config();

    std::string message;
    try {
        device.reconfigure(101, 600, 1000);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        message = e.what();
    }
    CHECK(message.find("60600") != std::string::npos);
    CHECK(message.find("60000") != std::string::npos);
    CHECK(device.config().config_generation == before.config_generation);
    CHECK(device.config().n_channels() == before.n_channels());
    CHECK(device.config().channels[0].n_taps == before.channels[0].n_taps);
}

TEST_CASE("no sequence of reconfigurations can oversubscribe the tap budget") {
    SimulationConfig sim;
    sim.device.tap_budget = 60000;
    Device device(sim);
    std::mt19937_64 gen(31);
    std::uint64_t accepted = 0;
    for (int i = 0; i < 400; ++i) {
        const int channels = 1 + static_cast<int>(gen() % 140);
        const int taps = 2 + static_cast<int>(gen() % 1200);
        const int triggers = 1 + static_cast<int>(gen() % 2000);
        try {
            device.reconfigure(channels, taps, triggers);
            ++accepted;
        } catch (const ConfigError&) {
        }
        CHECK(device.config().total_taps() <= device.config().tap_budget);
        CHECK(device.config().config_generation == accepted);
    }
    CHECK(accepted > 0);
}

TEST_CASE("channel zero behaves identically before and after shrinking the layout") {
    SimulationConfig sim;
    sim.device.n_channels = 100;
    sim.device.tap_budget = 60000;
    sim.bank.mismatch_sigma = from_fs(1500);
    sim.bank.tap_jitter_sigma = from_fs(5000);
    sim.bank.seed = 77;
    Device wide(sim);
    const RandomSource rng(42);
    const auto before = wide.measure_channel(0, from_ps(1502), rng);

    wide.reconfigure(1, 600, 1000);
    const auto after = wide.measure_channel(0, from_ps(1502), rng);
    CHECK(before.raw_code == after.raw_code);
    CHECK(before.trigger_codes == after.trigger_codes);

    SimulationConfig narrow = sim;
    narrow.device.n_channels = 1;
    Device fresh(narrow);
    const auto single = fresh.measure_channel(0, from_ps(1502), rng);
    CHECK(single.raw_code == before.raw_code);
}

TEST_CASE("run_trigger emits one self-consistent frame per channel") {
    SimulationConfig sim;
    sim.device.n_channels = 3;
    sim.device.triggers = 16; // bitstream fits the wire at this size
    sim.bank.tap_jitter_sigma = from_fs(5000);
    Device device(sim);
    const std::vector<Duration> delays = {from_ps(100), from_ps(1502), from_ps(2900)};
    const RandomSource rng(9);
    const auto frames = device.run_trigger(delays, rng);
    REQUIRE(frames.size() == 3);
    for (int c = 0; c < 3; ++c) {
        const auto& frame = frames[static_cast<std::size_t>(c)];
        CHECK(frame.type == FrameType::measurement);
        CHECK(frame.channel_id == c);
        CHECK(frame.sequence == static_cast<std::uint32_t>(c));
        const auto payload = decode_measurement_payload(frame.payload);
        const auto direct = device.measure_channel(c, delays[static_cast<std::size_t>(c)], rng);
        CHECK(payload.raw_code == direct.raw_code);
        CHECK(payload.coarse == direct.coarse);
        REQUIRE(payload.has_bitstream);
        const auto bits =
            BitMatrix::from_packed_tap_major(payload.packed_bits, 16, 600);
        CHECK(bits.popcount() == direct.raw_code);
    }

    // Same seed, same delays: a fresh device produces identical bytes.
    Device device2(sim);
    const auto frames2 = device2.run_trigger(delays, rng);
    REQUIRE(frames2.size() == frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        CHECK(encode_frame(frames[i]) == encode_frame(frames2[i]));
    }

    // Sequence numbers keep increasing across trigger events.
    const auto frames3 = device.run_trigger(delays, rng.substream(1));
    CHECK(frames3[0].sequence == 3);

    CHECK_THROWS_AS(device.run_trigger({from_ps(1)}, rng), UsageError);
}

TEST_CASE("zero-delay trigger reads back a zero code over the wire") {
    SimulationConfig sim;
    sim.device.triggers = 4;
    Device device(sim);
    const auto frames = device.run_trigger({Duration(0)}, RandomSource(0));
    REQUIRE(frames.size() == 1);
    const auto payload = decode_measurement_payload(frames[0].payload);
    CHECK(payload.raw_code == 0);
    CHECK(payload.coarse == 0);
}

TEST_CASE("reconfigure command frames produce acks and rejection errors") {
    SimulationConfig sim;
    sim.device.tap_budget = 60000;
    Device device(sim);

    Frame cmd;
    cmd.type = FrameType::command;
    cmd.payload = {kCmdReconfigure, 0x00, 0x20, 0x02, 0x58, 0x00, 0x64}; // 32 x 600, 100 trig
    const Frame ack = device.handle_command(cmd);
    CHECK(ack.type == FrameType::ack);
    REQUIRE(ack.payload.size() == 5);
    CHECK(ack.payload[0] == kCmdReconfigure);
    CHECK(ack.payload[4] == 1); // generation bumped to 1
    CHECK(device.config().n_channels() == 32);

    Frame over;
    over.type = FrameType::command;
    over.payload = {kCmdReconfigure, 0x00, 0x65, 0x02, 0x58, 0x00, 0x64}; // 101 x 600
    const Frame err = device.handle_command(over);
    CHECK(err.type == FrameType::error);
    REQUIRE(!err.payload.empty());
    CHECK(err.payload[0] == kErrRejected);
    CHECK(device.config().n_channels() == 32); // unchanged

    Frame junk;
    junk.type = FrameType::command;
    junk.payload = {0x7F};
    CHECK(device.handle_command(junk).type == FrameType::error);
}

TEST_CASE("configuration json round-trips and rejects unknown keys") {
    SimulationConfig cfg;
    cfg.clock.nominal_period = from_ps(2500);
    cfg.clock.cycle_jitter_sigma = from_fs(1000);
    cfg.clock.drift_ppm = 1.5;
    cfg.bank.n_taps = 500;
    cfg.bank.mismatch_sigma = from_fs(1500);
    cfg.bank.tap_jitter_sigma = from_fs(5000);
    cfg.bank.seed = 123456789;
    cfg.device.n_channels = 4;
    cfg.device.tap_budget = 9999;
    cfg.device.triggers = 250;

    const std::string text = config_to_json(cfg);
    const SimulationConfig back = parse_config_json(text);
    CHECK(back.clock.nominal_period == cfg.clock.nominal_period);
    CHECK(back.clock.drift_ppm == cfg.clock.drift_ppm);
    CHECK(back.bank.n_taps == cfg.bank.n_taps);
    CHECK(back.bank.seed == cfg.bank.seed);
    CHECK(back.device.tap_budget == cfg.device.tap_budget);
    CHECK(config_to_json(back) == text);
    CHECK(config_hash(back) == config_hash(cfg));

    CHECK_THROWS_AS(parse_config_json("{\"clocks\": {}}"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("{\"clock\": {\"period_ps\": 1}}"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("{\"bank\": {\"n_taps\": \"many\"}}"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("{\"device\": {\"n_channels\": 0}}"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("not json"), ConfigError);

    // Missing keys fall back to defaults.
    const SimulationConfig defaults = parse_config_json("{}");
    CHECK(defaults.clock.nominal_period == from_ps(3000));
    CHECK(defaults.bank.n_taps == 600);
    CHECK(defaults.device.tap_budget == 60000);
}

TEST_CASE("config hash changes when any field changes") {
    SimulationConfig a;
    SimulationConfig b;
    b.bank.seed = 1;
    CHECK(config_hash(a) != config_hash(b));
}
