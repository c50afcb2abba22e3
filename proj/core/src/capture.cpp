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

#include "tdcsim/capture.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "tdcsim/detail/bytes.hpp"

namespace tdcsim {

namespace {

constexpr char kMagic[4] = {'T', 'D', 'C', 'C'};

std::vector<std::uint8_t> read_all(std::istream& in) {
    std::vector<std::uint8_t> data;
    char chunk[65536];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        data.insert(data.end(), chunk, chunk + in.gcount());
        if (!in) break;
    }
    return data;
}

} // namespace

void write_capture(std::ostream& out, const CaptureFile& capture) {
    std::vector<std::uint8_t> header;
    header.insert(header.end(), kMagic, kMagic + 4);
    header.push_back(kCaptureVersion);
    header.push_back(capture.calibration.has_value() ? 0x01 : 0x00);

    const std::string config_json = config_to_json(capture.config);
    if (config_json.size() > UINT32_MAX) throw UsageError("configuration JSON too large");
    detail::put_u32(header, static_cast<std::uint32_t>(config_json.size()));
    header.insert(header.end(), config_json.begin(), config_json.end());

    if (capture.calibration.has_value()) {
        const CalibrationTable& table = *capture.calibration;
        header.push_back(kCalSectionVersion);
        detail::put_u32(header, static_cast<std::uint32_t>(table.code_to_time.size()));
        detail::put_u64(header, table.n_samples);
        detail::put_u64(header, table.stimulus_fingerprint);
        detail::put_u64(header, table.bank_fingerprint);
        detail::put_i64(header, table.period.femtoseconds);
        for (Duration d : table.code_to_time) detail::put_i64(header, d.femtoseconds);
    }
    out.write(reinterpret_cast<const char*>(header.data()),
              static_cast<std::streamsize>(header.size()));

    for (const Frame& frame : capture.frames) {
        const std::vector<std::uint8_t> bytes = encode_frame(frame);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    }
    if (!out) throw Error("capture write failed");
}

void write_capture_file(const std::string& path, const CaptureFile& capture) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open capture file for writing: " + path);
    write_capture(out, capture);
}

CaptureReadResult read_capture(std::istream& in) {
    const std::vector<std::uint8_t> data = read_all(in);
    std::size_t pos = 0;
    auto need = [&](std::size_t n, const char* what) {
        if (data.size() - pos < n) {
            throw IntegrityError(std::string("capture file truncated in ") + what);
        }
    };

    need(6, "header");
    if (!std::equal(kMagic, kMagic + 4, data.begin())) {
        throw IntegrityError("capture magic mismatch; not a capture file");
    }
    const std::uint8_t version = data[4];
    if (version != kCaptureVersion) throw VersionError("unsupported capture file version");
    const std::uint8_t flags = data[5];
    if (flags & ~0x01u) throw IntegrityError("capture header has unknown flag bits");
    pos = 6;

    need(4, "config length");
    const std::uint32_t config_len = detail::get_u32(data.data() + pos);
    pos += 4;
    need(config_len, "config JSON");
    const std::string config_json(data.begin() + static_cast<std::ptrdiff_t>(pos),
                                  data.begin() + static_cast<std::ptrdiff_t>(pos + config_len));
    pos += config_len;

    CaptureReadResult result;
    result.file.config = parse_config_json(config_json);

    if (flags & 0x01) {
        need(1 + 4 + 8 + 8 + 8 + 8, "calibration header");
        const std::uint8_t cal_version = data[pos];
        if (cal_version != kCalSectionVersion) {
            throw VersionError("unsupported calibration section version");
        }
        pos += 1;
        const std::uint32_t n_codes = detail::get_u32(data.data() + pos);
        pos += 4;
        CalibrationTable table;
        table.n_samples = detail::get_u64(data.data() + pos);
        pos += 8;
        table.stimulus_fingerprint = detail::get_u64(data.data() + pos);
        pos += 8;
        table.bank_fingerprint = detail::get_u64(data.data() + pos);
        pos += 8;
        table.period = Duration(detail::get_i64(data.data() + pos));
        pos += 8;
        need(static_cast<std::size_t>(n_codes) * 8, "calibration entries");
        table.code_to_time.reserve(n_codes);
        for (std::uint32_t i = 0; i < n_codes; ++i) {
            table.code_to_time.push_back(Duration(detail::get_i64(data.data() + pos)));
            pos += 8;
        }
        result.file.calibration = std::move(table);
    }

    FrameDecoder decoder;
    decoder.feed(data.data() + pos, data.size() - pos);
    decoder.finish();
    while (auto frame = decoder.next()) {
        result.file.frames.push_back(std::move(*frame));
    }
    result.integrity_errors = decoder.integrity_errors();
    result.version_errors = decoder.version_errors();
    result.skipped_bytes = decoder.skipped_bytes();
    return result;
}

CaptureReadResult read_capture_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open capture file: " + path);
    return read_capture(in);
}

} // namespace tdcsim
