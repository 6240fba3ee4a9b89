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
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "hsim/protocol.hpp"
#include "hsim/trace.hpp"
#include "hsim/workload.hpp"
#include "hsim/world.hpp"

namespace hsim {

/// Whole age-bounded store as one dataset: what a gossiper without
/// per-peer bookkeeping sends.
TransferDataset build_full_dataset(const TimeSeriesStore& store, TimeMs now,
                                   const ProtocolConfig& cfg);

/// Gossip without memory: every cycle it ships the entire age-bounded
/// store to each selected peer and never waits for confirmations.
class NaiveGossipAgent {
 public:
  explicit NaiveGossipAgent(NodeId self) : self_(self) {}
  NodeId self() const { return self_; }

  std::vector<OutboundTransfer> run_cycle(const TimeSeriesStore& store,
                                          const std::vector<int>& hop_row, TimeMs now,
                                          const ProtocolConfig& cfg, Rng& rng) const;

 private:
  NodeId self_;
};

struct PullStats {
  std::uint64_t bytes = 0;  // tx + rx over every leg
  int requests = 0;
  int responses = 0;
};

/// Idealized distributed index: every observation registers its holder,
/// and lookups are free of network cost. Only the data pulls touch the
/// air.
class GlobalSeriesIndex {
 public:
  void note(SeriesId id, NodeId holder) { holders_[id].insert(holder); }
  const std::set<NodeId>* holders(SeriesId id) const;
  const std::map<SeriesId, std::set<NodeId>>& all() const { return holders_; }

 private:
  std::map<SeriesId, std::set<NodeId>> holders_;
};

struct DhtConfig {
  std::uint64_t request_bytes = 80;
  WireModel wire;
};

/// Pull harvesting over the global index: walk the dependence closure
/// from the root, pulling each newly reachable series directly from its
/// holders (nearest first) until one answers. Pulled slices land in a
/// per-analysis scratch store; nothing is cached between analyses.
class DhtHarvester {
 public:
  explicit DhtHarvester(const GlobalSeriesIndex& index, const DhtConfig& cfg)
      : index_(index), cfg_(cfg) {}

  PullStats harvest(World& world, const std::vector<TimeSeriesStore>& monitors,
                    NodeId analysis, EntityId root, TimeMs w_start, TimeMs w_end,
                    TimeSeriesStore& scratch, Rng& loss_rng, TraceSink* trace) const;

 private:
  const GlobalSeriesIndex& index_;
  DhtConfig cfg_;
};

struct DafnConfig {
  std::uint64_t request_bytes = 80;
  TimeMs freq_window = 300'000;
  TimeMs prune_period = 5000;
  WireModel wire;
};

/// Flooded lookups with replica management: requests flood the whole
/// component (duplicate-suppressed), responses walk the reverse path and
/// every relay keeps a copy. A per-component coordinator periodically
/// deletes the lower-frequency copy of any series cached on two
/// neighbors.
class DafnMethod {
 public:
  DafnMethod(int n_nodes, TimeMs cache_slot_len, TimeMs retention, const DafnConfig& cfg);

  TimeSeriesStore& cache(NodeId n) { return nodes_[n].cache; }
  const TimeSeriesStore& cache(NodeId n) const { return nodes_[n].cache; }

  PullStats analyze(World& world, const std::vector<TimeSeriesStore>& monitors,
                    NodeId analysis, EntityId root, TimeMs w_start, TimeMs w_end,
                    Rng& loss_rng, TraceSink* trace);

  /// Runs replica pruning when due and expires stale cache slots.
  void tick(World& world, TimeMs now);

  /// Accesses of a series at a node inside the sliding window.
  int access_count(NodeId n, SeriesId id, TimeMs now);

 private:
  struct NodeState {
    TimeSeriesStore cache;
    std::map<SeriesId, std::deque<TimeMs>> accesses;
  };

  void note_access(NodeId n, SeriesId id, TimeMs now);
  void prune_duplicates(World& world, TimeMs now);

  DafnConfig cfg_;
  std::vector<NodeState> nodes_;
  TimeMs last_prune_ = kNeverMs;
};

/// Greedy connected dominating set per component: repeatedly take the
/// node covering the most uncovered nodes (ties to the lowest id), then
/// join the pieces with shortest paths.
std::vector<bool> build_backbone(const std::vector<std::vector<NodeId>>& adj);

struct ScalarConfig {
  std::uint64_t request_bytes = 80;
  /// Second request for the same series within this window turns on
  /// push replication from holder to requester.
  TimeMs push_window = 300'000;
  TimeMs prune_period = 5000;
  WireModel wire;
};

/// Backbone-restricted lookups with requester-side caching and push
/// replication for repeatedly requested series.
class ScalarMethod {
 public:
  ScalarMethod(int n_nodes, TimeMs cache_slot_len, TimeMs retention,
               const ScalarConfig& cfg);

  TimeSeriesStore& cache(NodeId n) { return nodes_[n].cache; }
  const std::vector<bool>& backbone() const { return backbone_; }

  PullStats analyze(World& world, const std::vector<TimeSeriesStore>& monitors,
                    NodeId analysis, EntityId root, TimeMs w_start, TimeMs w_end,
                    Rng& loss_rng, TraceSink* trace);

  /// Rebuilds the backbone on the current topology and flushes active
  /// pushes.
  void tick(World& world, const std::vector<TimeSeriesStore>& monitors, TimeMs now,
            Rng& loss_rng, TraceSink* trace);

 private:
  struct NodeState {
    TimeSeriesStore cache;
  };
  struct PushKey {
    NodeId holder;
    NodeId requester;
    SeriesId id;
    auto operator<=>(const PushKey&) const = default;
  };

  void note_request(NodeId holder, NodeId requester, SeriesId id, TimeMs now);

  ScalarConfig cfg_;
  std::vector<NodeState> nodes_;
  std::vector<bool> backbone_;
  std::map<PushKey, std::deque<TimeMs>> requests_;
  std::map<PushKey, TimeMs> push_high_water_;  // newest slot start already pushed
  TimeMs last_prune_ = kNeverMs;
};

}  // namespace hsim
