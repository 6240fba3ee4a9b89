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

#include <string>

#include "hsim/mobility.hpp"
#include "hsim/protocol.hpp"
#include "hsim/workload.hpp"
#include "hsim/world.hpp"

namespace hsim {

enum class Method { harvest, gossip, dht, dafn, scalar };

const char* to_string(Method m);
Method parse_method(const std::string& s);

/// Everything one run needs. Defaults describe the waypoint scenario;
/// see military_scenario() and firefighting_scenario() for the tuned
/// presets.
struct ScenarioConfig {
  int n_nodes = 50;
  std::uint64_t seed = 1;
  Method method = Method::harvest;

  MobilityConfig mobility;
  LinkModel link;
  TopologyConfig services;
  WorkloadParams workload;

  TimeMs monitor_slot_len = 100;
  TimeMs transfer_slot_len = 100;
  /// Monitors and caches drop slots older than this.
  TimeMs retention = 1'200'000;

  /// Dependence analysis runs this long after a conversation ends.
  TimeMs harvest_delay = 300'000;
  /// Gossip cycles within one harvest delay; 0 disables harvesting, so
  /// analyses see only the analysis node's own observations.
  int gossip_cycles = 32;
  int max_peers = 1;
  int max_hop_distance = 1;
  TimeMs confirm_timeout = 60'000;
  /// 0 means "track the harvest delay": data older than one analysis
  /// period is no longer worth shipping.
  TimeMs aging_limit = 0;

  /// Conversations that start inside [warmup, warmup + duration) are
  /// analyzed; traffic is measured over [warmup, warmup + duration +
  /// harvest_delay).
  TimeMs warmup = 300'000;
  TimeMs duration = 900'000;
  NodeId analysis_node = 0;

  TimeMs mobility_tick = 1000;
  TimeMs reachability_sample_period = 60'000;

  TimeMs effective_aging_limit() const {
    return aging_limit > 0 ? aging_limit : harvest_delay;
  }
  TimeMs cycle_period() const {
    return gossip_cycles > 0 ? harvest_delay / gossip_cycles : 0;
  }
  TimeMs measure_end() const { return warmup + duration + harvest_delay; }

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;

  ProtocolConfig protocol() const;
};

/// Five squads roaming a shared block: nomadic group mobility on a
/// 2 km x 2 km field.
ScenarioConfig military_scenario();

/// Vehicles covering a 1 km x 2 km strip under random waypoint.
ScenarioConfig firefighting_scenario();

ScenarioConfig scenario_by_name(const std::string& name);

}  // namespace hsim
