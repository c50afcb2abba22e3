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

#ifndef TDCSIM_CLOCK_HPP
#define TDCSIM_CLOCK_HPP

#include <cstdint>

#include "tdcsim/random.hpp"
#include "tdcsim/time.hpp"

namespace tdcsim {

/// Reference clock: nominal period plus white per-edge Gaussian jitter and a
/// constant frequency offset in parts per million. drift_ppm == 0 and
/// cycle_jitter_sigma == 0 gives exactly periodic edges.
struct ClockModel {
    Duration nominal_period = from_ps(3000);
    Duration cycle_jitter_sigma = Duration(0);
    double drift_ppm = 0.0;

    void validate() const;
};

/// Time of the k-th clock edge: k * period * (1 + drift_ppm * 1e-6) plus one
/// Gaussian deviate addressed by k, rounded to the nearest femtosecond.
/// Pure function of (edge_rng identity, k).
Duration edge_time(const ClockModel& clock, std::uint64_t k, const RandomSource& edge_rng);

/// Largest k with edge_time(k) <= t, or 0 when t precedes every edge.
/// Requires jitter small against the period (enforced with an iteration cap).
std::uint64_t coarse_cycles_at(const ClockModel& clock, Duration t, const RandomSource& edge_rng);

} // namespace tdcsim

#endif
