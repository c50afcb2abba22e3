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

#ifndef TDCSIM_GENERATOR_HPP
#define TDCSIM_GENERATOR_HPP

#include "tdcsim/random.hpp"
#include "tdcsim/time.hpp"

namespace tdcsim {

/// Model of the pulse source driving a sweep: a systematic offset drawn once
/// per instance, uniform in [-accuracy, +accuracy], plus per-pulse Gaussian
/// jitter applied at the conversion input.
class GeneratorModel {
public:
    /// An ideal source: no offset, no jitter.
    GeneratorModel() = default;

    GeneratorModel(Duration accuracy, Duration pulse_jitter_sigma, const RandomSource& rng);

    Duration accuracy() const { return accuracy_; }
    Duration pulse_jitter_sigma() const { return pulse_jitter_sigma_; }
    Duration systematic_error() const { return systematic_error_; }

    /// requested + systematic_error, clamped at zero: a stop pulse that
    /// would precede the start pulse collapses to zero delay.
    Duration emitted_delay(Duration requested) const;

private:
    Duration accuracy_ = Duration(0);
    Duration pulse_jitter_sigma_ = Duration(0);
    Duration systematic_error_ = Duration(0);
};

} // namespace tdcsim

#endif
