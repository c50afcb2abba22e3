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

#ifndef TDCSIM_CAPTURE_HPP
#define TDCSIM_CAPTURE_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "tdcsim/calibration.hpp"
#include "tdcsim/config.hpp"
#include "tdcsim/frame.hpp"

namespace tdcsim {

// Capture container, all multi-byte fields big-endian:
//   magic "TDCC" | version u8 (=1) | flags u8 (bit0: calibration section) |
//   config_len u32 | config JSON |
//   [cal section: version u8 (=1) | n_codes u32 | n_samples u64 |
//    stimulus_fp u64 | bank_fp u64 | period i64 | n_codes x i64] |
//   raw frames back-to-back until end of file.

constexpr std::uint8_t kCaptureVersion = 1;
constexpr std::uint8_t kCalSectionVersion = 1;

struct CaptureFile {
    SimulationConfig config;
    std::optional<CalibrationTable> calibration;
    std::vector<Frame> frames;
};

struct CaptureReadResult {
    CaptureFile file;
    std::uint64_t integrity_errors = 0;
    std::uint64_t version_errors = 0;
    std::uint64_t skipped_bytes = 0;

    bool clean() const {
        return integrity_errors == 0 && version_errors == 0 && skipped_bytes == 0;
    }
};

void write_capture(std::ostream& out, const CaptureFile& capture);
void write_capture_file(const std::string& path, const CaptureFile& capture);

/// Checks magic and version before any parsing; throws IntegrityError on a
/// bad magic or malformed header sections and VersionError on an unsupported
/// container version. Corrupt frames inside the stream do not throw: the
/// decoder resynchronizes and the counters report what was dropped.
CaptureReadResult read_capture(std::istream& in);
CaptureReadResult read_capture_file(const std::string& path);

} // namespace tdcsim

#endif
