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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hsim/scenario.hpp"
#include "hsim/trace.hpp"

namespace hsim {

/// Ratios are means over the analyses where they are defined: a
/// conversation with an empty discovered graph has no false positive
/// ratio, only a zero true positive ratio.
struct RunMetrics {
  double tp_mean = 0.0;
  double fp_mean = 0.0;
  int tp_samples = 0;
  int fp_samples = 0;

  /// Traffic per node in kB (1000 B) per second over the measurement
  /// window, and per communicating node pair (transmissions only).
  double overhead_kbps = 0.0;
  double per_pair_kbps = 0.0;
  std::uint64_t total_bytes = 0;

  int conversations_analyzed = 0;
  int conversations_completed = 0;

  std::vector<ReachabilitySample> reachability;
};

/// Optional run outputs; any stream may be null.
struct RunSinks {
  std::ostream* trace = nullptr;           // message rows with method column
  std::ostream* ground_truth = nullptr;    // full conversation log
  std::ostream* analysis_store = nullptr;  // analysis node store at the end
};

RunMetrics run_scenario(const ScenarioConfig& cfg, const RunSinks& sinks = {});

/// Named numeric knobs for sweeps; throws std::invalid_argument on an
/// unknown axis.
void apply_axis(ScenarioConfig& cfg, const std::string& axis, double value);

struct SweepPoint {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
};

std::vector<SweepPoint> sweep(const ScenarioConfig& base, const std::string& axis,
                              const std::vector<double>& values,
                              const std::vector<std::uint64_t>& seeds);

/// CSV: axis_value,seed,tp_ratio,fp_ratio,overhead_kbps,conversations
void emit_results(std::ostream& os, const std::vector<SweepPoint>& points);

}  // namespace hsim
