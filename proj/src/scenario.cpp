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
#include "hsim/scenario.hpp"

#include <stdexcept>

namespace hsim {

const char* to_string(Method m) {
  switch (m) {
    case Method::harvest: return "harvest";
    case Method::gossip: return "gossip";
    case Method::dht: return "dht";
    case Method::dafn: return "dafn";
    case Method::scalar: return "scalar";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "harvest") return Method::harvest;
  if (s == "gossip") return Method::gossip;
  if (s == "dht") return Method::dht;
  if (s == "dafn") return Method::dafn;
  if (s == "scalar") return Method::scalar;
  throw std::invalid_argument("unknown method: " + s);
}

void ScenarioConfig::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (n_nodes < 2) fail("n_nodes: need at least two nodes");
  if (analysis_node < 0 || analysis_node >= n_nodes) fail("analysis_node: out of range");
  if (mobility.area_w <= 0 || mobility.area_h <= 0) fail("mobility.area: must be positive");
  if (mobility.speed_min <= 0 || mobility.speed_max < mobility.speed_min)
    fail("mobility.speed: need 0 < min <= max");
  if (mobility.model == MobilityModel::nomadic && mobility.group_count < 1)
    fail("mobility.group_count: need at least one group");
  if (link.radio_range <= 0) fail("link.radio_range: must be positive");
  if (link.delivery_prob < 0 || link.delivery_prob > 1)
    fail("link.delivery_prob: not a probability");
  if (monitor_slot_len <= 0) fail("monitor_slot_len: must be positive");
  if (transfer_slot_len <= 0) fail("transfer_slot_len: must be positive");
  if (transfer_slot_len % monitor_slot_len != 0 && monitor_slot_len % transfer_slot_len != 0)
    fail("transfer_slot_len: not commensurate with monitor_slot_len");
  if (retention <= 0) fail("retention: must be positive");
  if (harvest_delay <= 0) fail("harvest_delay: must be positive");
  if (gossip_cycles < 0) fail("gossip_cycles: must be non-negative");
  if (gossip_cycles > 0 && harvest_delay / gossip_cycles <= 0)
    fail("gossip_cycles: cycle period rounds to zero");
  if (max_peers < 1) fail("max_peers: need at least one peer");
  if (max_hop_distance < 1) fail("max_hop_distance: need at least one hop");
  if (confirm_timeout <= 0) fail("confirm_timeout: must be positive");
  if (retention < effective_aging_limit())
    fail("retention: shorter than the aging limit, fresh data would be pruned");
  if (warmup < 0) fail("warmup: must be non-negative");
  if (duration <= 0) fail("duration: must be positive");
  if (mobility_tick <= 0) fail("mobility_tick: must be positive");
  if (reachability_sample_period <= 0)
    fail("reachability_sample_period: must be positive");
  if (workload.period <= workload.period_jitter)
    fail("workload.period: jitter would allow non-positive periods");
}

ProtocolConfig ScenarioConfig::protocol() const {
  ProtocolConfig p;
  p.max_peers = max_peers;
  p.max_hop_distance = max_hop_distance;
  p.cycle_period = cycle_period() > 0 ? cycle_period() : harvest_delay;
  p.aging_limit = effective_aging_limit();
  p.transfer_slot_len = transfer_slot_len;
  p.confirm_timeout = confirm_timeout;
  return p;
}

ScenarioConfig military_scenario() {
  ScenarioConfig c;
  c.mobility.model = MobilityModel::nomadic;
  c.mobility.area_w = 2000.0;
  c.mobility.area_h = 2000.0;
  c.mobility.deploy_radius = 300.0;
  c.mobility.group_count = 5;
  c.mobility.group_radius = 100.0;
  c.mobility.group_area_w = 800.0;
  c.mobility.group_area_h = 800.0;
  c.link.radio_range = 250.0;
  return c;
}

ScenarioConfig firefighting_scenario() {
  ScenarioConfig c;
  c.mobility.model = MobilityModel::random_waypoint;
  c.mobility.area_w = 1000.0;
  c.mobility.area_h = 2000.0;
  c.mobility.deploy_radius = 300.0;
  c.link.radio_range = 265.0;
  return c;
}

ScenarioConfig scenario_by_name(const std::string& name) {
  if (name == "military") return military_scenario();
  if (name == "firefighting") return firefighting_scenario();
  throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace hsim
