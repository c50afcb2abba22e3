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

#include "tdcsim/frame.hpp"

#include <array>
#include <bit>
#include <cstring>

#include "tdcsim/detail/bytes.hpp"

namespace tdcsim {

namespace {

using detail::get_u16;
using detail::get_u32;
using detail::put_u16;
using detail::put_u32;

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1; // reflected 0x04C11DB7
        }
        table[i] = c;
    }
    return table;
}

const std::array<std::uint32_t, 256>& crc_table() {
    static const auto table = make_crc_table();
    return table;
}

bool frame_type_known(std::uint8_t t) {
    return t >= static_cast<std::uint8_t>(FrameType::measurement) &&
           t <= static_cast<std::uint8_t>(FrameType::error);
}

enum class ParseStatus { ok, need_more, corrupt, bad_version };

// Attempts to parse one frame at data[0] (which must hold the sync marker).
ParseStatus parse_at(const std::uint8_t* data, std::size_t len, Frame* out,
                     std::size_t* consumed) {
    if (len < 2 || data[0] != kFrameSync0 || data[1] != kFrameSync1) {
        return ParseStatus::corrupt;
    }
    if (len < kFrameHeaderSize) return ParseStatus::need_more;
    const std::uint16_t payload_len = get_u16(data + 9);
    const std::size_t total = kFrameOverhead + payload_len;
    if (len < total) return ParseStatus::need_more;

    const std::uint32_t stored = get_u32(data + kFrameHeaderSize + payload_len);
    const std::uint32_t computed = crc32(data + 2, kFrameHeaderSize - 2 + payload_len);
    if (stored != computed) return ParseStatus::corrupt;

    const std::uint8_t version = data[2];
    if (version != kProtocolVersion) {
        *consumed = total;
        return ParseStatus::bad_version;
    }
    if (!frame_type_known(data[3])) return ParseStatus::corrupt;

    out->version = version;
    out->type = static_cast<FrameType>(data[3]);
    out->channel_id = data[4];
    out->sequence = get_u32(data + 5);
    out->payload.assign(data + kFrameHeaderSize, data + kFrameHeaderSize + payload_len);
    *consumed = total;
    return ParseStatus::ok;
}

} // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
    const auto& table = crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) {
        c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    }
    return c ^ 0xFFFFFFFFu;
}

std::uint32_t crc32(const std::vector<std::uint8_t>& data) {
    return crc32(data.data(), data.size());
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
    if (frame.payload.size() > 0xFFFF) {
        throw UsageError("frame payload exceeds the 16-bit length field");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kFrameOverhead + frame.payload.size());
    out.push_back(kFrameSync0);
    out.push_back(kFrameSync1);
    out.push_back(frame.version);
    out.push_back(static_cast<std::uint8_t>(frame.type));
    out.push_back(frame.channel_id);
    put_u32(out, frame.sequence);
    put_u16(out, static_cast<std::uint16_t>(frame.payload.size()));
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    const std::uint32_t crc = crc32(out.data() + 2, out.size() - 2);
    put_u32(out, crc);
    return out;
}

Frame decode_frame(const std::uint8_t* data, std::size_t len) {
    if (len < kFrameOverhead) throw IntegrityError("frame truncated");
    if (data[0] != kFrameSync0 || data[1] != kFrameSync1) {
        throw IntegrityError("frame sync marker mismatch");
    }
    const std::uint16_t payload_len = get_u16(data + 9);
    if (len != kFrameOverhead + payload_len) {
        throw IntegrityError("frame length field disagrees with the buffer");
    }
    Frame frame;
    std::size_t consumed = 0;
    switch (parse_at(data, len, &frame, &consumed)) {
        case ParseStatus::ok:
            return frame;
        case ParseStatus::bad_version:
            throw VersionError("unsupported protocol version");
        default:
            throw IntegrityError("frame CRC mismatch or malformed header");
    }
}

Frame decode_frame(const std::vector<std::uint8_t>& bytes) {
    return decode_frame(bytes.data(), bytes.size());
}

void FrameDecoder::feed(const std::uint8_t* data, std::size_t len) {
    buffer_.insert(buffer_.end(), data, data + len);
}

void FrameDecoder::feed(const std::vector<std::uint8_t>& data) {
    feed(data.data(), data.size());
}

void FrameDecoder::compact() {
    if (scan_ > 4096 && scan_ > buffer_.size() / 2) {
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(scan_));
        scan_ = 0;
    }
}

std::optional<Frame> FrameDecoder::next() {
    for (;;) {
        // Hunt for the next sync marker.
        while (scan_ + 1 < buffer_.size() &&
               !(buffer_[scan_] == kFrameSync0 && buffer_[scan_ + 1] == kFrameSync1)) {
            ++scan_;
            ++skipped_bytes_;
        }
        if (scan_ + 1 >= buffer_.size()) {
            if (finished_ && scan_ < buffer_.size()) {
                skipped_bytes_ += buffer_.size() - scan_;
                scan_ = buffer_.size();
            }
            compact();
            return std::nullopt;
        }

        Frame frame;
        std::size_t consumed = 0;
        const ParseStatus status =
            parse_at(buffer_.data() + scan_, buffer_.size() - scan_, &frame, &consumed);
        switch (status) {
            case ParseStatus::ok:
                scan_ += consumed;
                compact();
                return frame;
            case ParseStatus::need_more:
                if (!finished_) {
                    compact();
                    return std::nullopt;
                }
                // No more input is coming; treat the candidate as corrupt and
                // look for frames hidden behind this sync marker.
                ++integrity_errors_;
                scan_ += 2;
                break;
            case ParseStatus::bad_version:
                ++version_errors_;
                scan_ += consumed;
                break;
            case ParseStatus::corrupt:
                ++integrity_errors_;
                scan_ += 2;
                break;
        }
    }
}

void FrameDecoder::finish() { finished_ = true; }

std::vector<std::uint8_t> encode_measurement_payload(const MeasurementPayload& payload) {
    const std::size_t nbits =
        static_cast<std::size_t>(payload.triggers) * static_cast<std::size_t>(payload.n_taps);
    if (payload.has_bitstream && payload.packed_bits.size() != (nbits + 7) / 8) {
        throw UsageError("packed bitstream length does not match triggers * n_taps");
    }
    if (!payload.has_bitstream && !payload.packed_bits.empty()) {
        throw UsageError("bitstream bytes present but the flag is clear");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kMeasurementPayloadFixedSize + payload.packed_bits.size());
    put_u32(out, payload.coarse);
    put_u16(out, payload.triggers);
    put_u16(out, payload.n_taps);
    put_u32(out, payload.raw_code);
    out.insert(out.end(), payload.packed_bits.begin(), payload.packed_bits.end());
    std::uint8_t flags = 0;
    if (payload.has_bitstream) flags |= 0x01;
    if (payload.calibrated) flags |= 0x02;
    out.push_back(flags);
    return out;
}

MeasurementPayload decode_measurement_payload(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kMeasurementPayloadFixedSize) {
        throw IntegrityError("measurement payload too short");
    }
    MeasurementPayload p;
    p.coarse = get_u32(bytes.data());
    p.triggers = get_u16(bytes.data() + 4);
    p.n_taps = get_u16(bytes.data() + 6);
    p.raw_code = get_u32(bytes.data() + 8);
    const std::uint8_t flags = bytes.back();
    if (flags & ~0x03u) throw IntegrityError("measurement payload has unknown flag bits");
    p.has_bitstream = flags & 0x01;
    p.calibrated = flags & 0x02;

    const std::size_t nbits =
        static_cast<std::size_t>(p.triggers) * static_cast<std::size_t>(p.n_taps);
    const std::size_t expected_bits_bytes = p.has_bitstream ? (nbits + 7) / 8 : 0;
    if (bytes.size() != kMeasurementPayloadFixedSize + expected_bits_bytes) {
        throw IntegrityError("measurement payload length mismatch");
    }
    const std::uint64_t max_code = static_cast<std::uint64_t>(p.triggers) * p.n_taps;
    if (p.raw_code > max_code) {
        throw IntegrityError("measurement raw code exceeds triggers * n_taps");
    }
    if (p.has_bitstream) {
        p.packed_bits.assign(bytes.begin() + 12, bytes.end() - 1);
        std::uint64_t pop = 0;
        for (std::uint8_t b : p.packed_bits) {
            pop += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(b)));
        }
        if (pop != p.raw_code) {
            throw IntegrityError("bitstream population count disagrees with raw code");
        }
    }
    return p;
}

MeasurementPayload make_measurement_payload(const Measurement& m, int triggers, int n_taps,
                                            bool include_bitstream, bool calibrated) {
    if (triggers < 0 || triggers > 0xFFFF || n_taps < 0 || n_taps > 0xFFFF) {
        throw UsageError("triggers and n_taps must fit 16 bits for the wire");
    }
    MeasurementPayload p;
    p.coarse = m.coarse;
    p.triggers = static_cast<std::uint16_t>(triggers);
    p.n_taps = static_cast<std::uint16_t>(n_taps);
    if (m.raw_code > UINT32_MAX) throw RangeError("raw code exceeds 32 bits");
    p.raw_code = static_cast<std::uint32_t>(m.raw_code);
    p.calibrated = calibrated;
    const std::size_t nbits = static_cast<std::size_t>(triggers) * static_cast<std::size_t>(n_taps);
    if (include_bitstream && nbits <= kMaxEmbeddedBits) {
        p.has_bitstream = true;
        p.packed_bits = m.bitstream.packed_tap_major();
    }
    return p;
}

} // namespace tdcsim
