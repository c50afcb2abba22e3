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

#ifndef TDCSIM_ERRORS_HPP
#define TDCSIM_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tdcsim {

/// Base class of every failure reported by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid build- or run-time configuration (bad parameters, bad config
/// file, insufficient samples). Maps to CLI exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// API misuse: index out of range, mismatched argument shapes.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A value lies outside the domain of the requested operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Arithmetic overflow or a value beyond the representable range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Corrupt wire data: CRC mismatch, malformed frame, bad capture file.
/// Maps to CLI exit code 2.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Valid data carrying a protocol or file version this build does not speak.
class VersionError : public Error {
public:
    using Error::Error;
};

/// Resolution search exhausted its step budget without a detectable change.
class NotResolvableError : public Error {
public:
    NotResolvableError(const std::string& what, std::int64_t max_step_fs)
        : Error(what), max_step_fs_(max_step_fs) {}

    std::int64_t max_step_fs() const { return max_step_fs_; }

private:
    std::int64_t max_step_fs_;
};

} // namespace tdcsim

#endif
