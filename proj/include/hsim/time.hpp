/**
 * Copyright 2026 the harvestsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace hsim {

/// Simulation clock in integer milliseconds since the simulation epoch.
/// Slot arithmetic must be exact, so the clock never touches floating
/// point; seconds appear only at the I/O boundary (configs, traces).
using TimeMs = std::int64_t;

/// Sentinel for "never synchronized" watermarks. Far enough from the
/// int64 range edges that offset arithmetic cannot overflow.
constexpr TimeMs kNeverMs = std::numeric_limits<TimeMs>::min() / 4;

inline TimeMs ms_from_seconds(double s) { return static_cast<TimeMs>(std::llround(s * 1000.0)); }
inline double to_seconds(TimeMs t) { return static_cast<double>(t) / 1000.0; }

/// Floor division for possibly negative numerators (C++ '/' truncates).
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

/// Index of the slot containing time `t`; slot k covers [k*len, (k+1)*len).
constexpr std::int64_t slot_of(TimeMs t, TimeMs slot_len) { return floor_div(t, slot_len); }

constexpr TimeMs slot_start(std::int64_t slot, TimeMs slot_len) { return slot * slot_len; }
constexpr TimeMs slot_end(std::int64_t slot, TimeMs slot_len) { return (slot + 1) * slot_len; }

}  // namespace hsim
