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

#ifndef TDCSIM_FRAME_HPP
#define TDCSIM_FRAME_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tdcsim/channel.hpp"

namespace tdcsim {

// Wire layout, all multi-byte fields big-endian:
//   sync 0xA5 0x5A | version u8 | type u8 | channel u8 | sequence u32 |
//   payload_len u16 | payload | crc32 u32
// The CRC (poly 0x04C11DB7, reflected, init and final xor 0xFFFFFFFF) covers
// version through the last payload byte; the sync marker is framing only.

constexpr std::uint8_t kFrameSync0 = 0xA5;
constexpr std::uint8_t kFrameSync1 = 0x5A;
constexpr std::uint8_t kProtocolVersion = 1;
constexpr std::size_t kFrameHeaderSize = 11; // sync..payload_len
constexpr std::size_t kFrameOverhead = kFrameHeaderSize + 4;

enum class FrameType : std::uint8_t {
    measurement = 0x01,
    command = 0x02,
    ack = 0x03,
    error = 0x04,
};

struct Frame {
    std::uint8_t version = kProtocolVersion;
    FrameType type = FrameType::ack;
    std::uint8_t channel_id = 0;
    std::uint32_t sequence = 0;
    std::vector<std::uint8_t> payload;

    bool operator==(const Frame&) const = default;
};

/// Reflected CRC-32 (0x04C11DB7, init/xor-out 0xFFFFFFFF). The check value
/// over the ASCII bytes "123456789" is 0xCBF43926.
std::uint32_t crc32(const std::uint8_t* data, std::size_t len);
std::uint32_t crc32(const std::vector<std::uint8_t>& data);

std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Strict one-shot decode: the buffer must hold exactly one well-formed
/// frame. Throws IntegrityError on any corruption (bad sync, bad length,
/// CRC mismatch) and VersionError on a CRC-valid frame with an unsupported
/// version.
Frame decode_frame(const std::vector<std::uint8_t>& bytes);
Frame decode_frame(const std::uint8_t* data, std::size_t len);

/// Incremental decoder with resynchronization: feed bytes in any chunking,
/// poll frames with next(). A corrupt frame is dropped and scanning resumes
/// at the next sync marker; valid frames before and after are unaffected.
class FrameDecoder {
public:
    void feed(const std::uint8_t* data, std::size_t len);
    void feed(const std::vector<std::uint8_t>& data);

    /// Next decoded frame, or nullopt when the buffer holds no complete
    /// valid frame yet.
    std::optional<Frame> next();

    /// Marks end of input: trailing bytes that cannot form a frame are
    /// classified as corruption.
    void finish();

    /// Sync candidates dropped for CRC or structural failures. One corrupt
    /// frame can produce several candidates, so this counts at least the
    /// number of corrupted frames.
    std::uint64_t integrity_errors() const { return integrity_errors_; }
    /// CRC-valid frames skipped for an unsupported protocol version.
    std::uint64_t version_errors() const { return version_errors_; }
    /// Bytes passed over while hunting for a sync marker. Nonzero means the
    /// stream carried data that never framed.
    std::uint64_t skipped_bytes() const { return skipped_bytes_; }

private:
    std::vector<std::uint8_t> buffer_;
    std::size_t scan_ = 0;
    bool finished_ = false;
    std::uint64_t integrity_errors_ = 0;
    std::uint64_t version_errors_ = 0;
    std::uint64_t skipped_bytes_ = 0;

    void compact();
};

/// Measurement payload carried by FrameType::measurement.
/// Layout: coarse u32 | triggers u16 | n_taps u16 | raw_code u32 |
/// packed bitstream (optional, tap-major, zero-padded) | flags u8.
/// Flags: bit0 = bitstream present, bit1 = calibrated decode intended.
struct MeasurementPayload {
    std::uint32_t coarse = 0;
    std::uint16_t triggers = 0;
    std::uint16_t n_taps = 0;
    std::uint32_t raw_code = 0;
    bool has_bitstream = false;
    bool calibrated = false;
    std::vector<std::uint8_t> packed_bits;

    bool operator==(const MeasurementPayload&) const = default;
};

constexpr std::size_t kMeasurementPayloadFixedSize = 13;

/// Largest bitstream (in bits) that fits the u16 payload length budget.
constexpr std::size_t kMaxEmbeddedBits = (65535 - kMeasurementPayloadFixedSize) * 8;

std::vector<std::uint8_t> encode_measurement_payload(const MeasurementPayload& payload);

/// Validates structure, flag/length consistency, raw_code <= triggers*n_taps
/// and, when bits are present, popcount(bits) == raw_code.
MeasurementPayload decode_measurement_payload(const std::vector<std::uint8_t>& bytes);

/// Builds the payload for a measurement; embeds the bitstream when
/// include_bitstream is set and the bits fit the wire budget.
MeasurementPayload make_measurement_payload(const Measurement& m, int triggers, int n_taps,
                                            bool include_bitstream, bool calibrated);

} // namespace tdcsim

#endif
