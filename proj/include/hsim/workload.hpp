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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "hsim/timeseries.hpp"
#include "hsim/world.hpp"

namespace hsim {

/// Clients live in a separate entity id range above all services.
constexpr EntityId kClientEntityBase = 1000;

inline EntityId client_entity(NodeId node) { return kClientEntityBase + node; }
inline bool is_client_entity(EntityId e) { return e >= kClientEntityBase; }

struct TopologyConfig {
  int front_end = 5;
  int back_end = 20;
  int replicas = 5;
  int methods_per_service = 2;
  /// Back-end services chained behind one front-end method; the
  /// dependence graph of a conversation has chain_len + 1 edges.
  int chain_len = 3;

  int n_services() const { return front_end + back_end; }
};

/// Placement and call structure drawn once per run: replica nodes per
/// service and, per front-end method, the fixed back-end chain it walks.
struct ServiceTopology {
  TopologyConfig cfg;
  std::vector<std::vector<NodeId>> replicas;  // [service] -> distinct nodes, ascending
  std::vector<std::vector<int>> chains;       // [fe method] -> chain_len distinct back-ends

  int n_methods() const { return static_cast<int>(chains.size()); }
};

ServiceTopology build_topology(const TopologyConfig& cfg, int n_nodes, Rng& rng);

/// Replica of `service` closest to `from` by hop count, ties to the
/// lowest node id. Unreachable replicas lose to reachable ones.
NodeId bind_replica(const ServiceTopology& topo, int service, NodeId from,
                    const World& world);

struct WorkloadParams {
  TimeMs period = 30'000;
  TimeMs period_jitter = 3000;  // uniform in [period - j, period + j]
  TimeMs proc_delay = 50;
  TimeMs response_timeout = 60'000;
};

struct ConversationRecord {
  std::int64_t id = 0;
  NodeId client = 0;
  TimeMs started = 0;
  TimeMs ended = 0;
  bool completed = false;
  /// Realized dependence edges in invocation order, including a final
  /// request that was lost in transit.
  std::vector<SeriesId> gt;
  std::vector<TimeMs> gt_times;
};

/// Generates conversations: every node hosts one client that calls a
/// random front-end method on a jittered period; the request cascades
/// down the method's chain and responses walk back up. Both endpoints
/// of every message record the dependence into their node's store.
/// Message loss is silent, so a broken conversation ends only when the
/// client's response timeout expires; `ended` is the time the client
/// learned the outcome, and failure analysis windows span the wait.
class WorkloadDriver {
 public:
  WorkloadDriver(World& world, const ServiceTopology& topo,
                 std::vector<TimeSeriesStore>& stores, const WorkloadParams& params,
                 Rng& workload_rng, Rng& loss_rng);

  /// Schedules client loops; conversations start inside [from, until).
  void start(TimeMs from, TimeMs until);

  /// Fires when a conversation ends, successfully or not.
  std::function<void(const ConversationRecord&)> on_finished;

  /// Fires on every monitor observation, after the store write.
  std::function<void(NodeId, SeriesId, TimeMs)> on_observe;

  /// Optional union of every observation ever recorded, for audits.
  TimeSeriesStore* oracle = nullptr;

  const std::vector<ConversationRecord>& log() const { return log_; }

 private:
  struct Live {
    ConversationRecord rec;
    std::vector<EntityId> entity;  // [0] client, then services down the chain
    std::vector<NodeId> node;      // realized replica nodes, same indexing
  };

  void schedule_client(NodeId client, TimeMs at, TimeMs until);
  void begin(NodeId client, TimeMs at);
  void request_step(std::int64_t conv, std::size_t k);
  void response_step(std::int64_t conv, std::size_t k);
  void fail_at_timeout(std::int64_t conv);
  void finish(std::int64_t conv, bool completed);
  void observe(NodeId node, SeriesId id, TimeMs t);

  World& world_;
  const ServiceTopology& topo_;
  std::vector<TimeSeriesStore>& stores_;
  WorkloadParams params_;
  Rng& rng_;
  Rng& loss_rng_;
  std::int64_t next_id_ = 0;
  std::map<std::int64_t, Live> live_;
  std::vector<ConversationRecord> log_;
};

/// Transitive closure of dependence edges flagged inside the closed
/// window [w_start, w_end], walked from `root` across the union of the
/// given stores.
std::set<SeriesId> discover_dg(const std::vector<const TimeSeriesStore*>& stores,
                               EntityId root, TimeMs w_start, TimeMs w_end);

/// |discovered ∩ gt| / |gt|; empty ground truth has no defined ratio.
std::optional<double> tp_ratio(const std::set<SeriesId>& discovered,
                               const std::vector<SeriesId>& gt);

/// |discovered - gt| / |discovered|; empty discovery has no defined ratio.
std::optional<double> fp_ratio(const std::set<SeriesId>& discovered,
                               const std::vector<SeriesId>& gt);

/// CSV rows: conversation,source,target,time (seconds).
void dump_ground_truth(std::ostream& os, const std::vector<ConversationRecord>& log);

}  // namespace hsim
