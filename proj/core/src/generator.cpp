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

#include "tdcsim/generator.hpp"

namespace tdcsim {

GeneratorModel::GeneratorModel(Duration accuracy, Duration pulse_jitter_sigma,
                               const RandomSource& rng)
    : accuracy_(accuracy), pulse_jitter_sigma_(pulse_jitter_sigma) {
    if (accuracy.is_negative()) throw ConfigError("generator accuracy must be >= 0");
    if (pulse_jitter_sigma.is_negative()) throw ConfigError("generator jitter must be >= 0");
    if (accuracy.femtoseconds > 0) {
        const std::int64_t span = 2 * accuracy.femtoseconds + 1;
        systematic_error_ = Duration(rng.below_at(0, span) - accuracy.femtoseconds);
    }
}

Duration GeneratorModel::emitted_delay(Duration requested) const {
    if (requested.is_negative()) throw DomainError("requested delay must be >= 0");
    Duration out = checked_add(requested, systematic_error_);
    if (out.is_negative()) return Duration(0);
    return out;
}

} // namespace tdcsim
