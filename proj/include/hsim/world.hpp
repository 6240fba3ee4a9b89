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
#include <optional>
#include <queue>
#include <vector>

#include "hsim/mobility.hpp"
#include "hsim/rng.hpp"
#include "hsim/time.hpp"

namespace hsim {

using NodeId = std::int32_t;

/// Hop count marking "no route".
constexpr int kUnreachable = 1 << 20;

/// Unit-disk adjacency: nodes are neighbors iff their distance is at
/// most radio_range (closed ball, so the boundary still connects).
std::vector<std::vector<NodeId>> build_adjacency(const std::vector<Vec2>& pos,
                                                 double radio_range);

/// BFS hop counts from src over an adjacency list; kUnreachable where
/// no path exists, 0 for src itself.
std::vector<int> bfs_hops(const std::vector<std::vector<NodeId>>& adj, NodeId src);

struct LinkModel {
  double radio_range = 250.0;
  double delivery_prob = 0.95;  // per link hop
  TimeMs hop_latency = 100;
  /// Optional contention knob: scales delivery_prob by
  /// 1 / (1 + coeff * concurrent local transmissions). Zero disables it.
  double congestion_coeff = 0.0;
};

/// Discrete-event world: node positions, unit-disk connectivity with
/// per-snapshot hop tables, an event queue, and a lossy multi-hop
/// unicast. Equal-time events run in scheduling order.
class World {
 public:
  World(int n_nodes, const LinkModel& link);

  int size() const { return n_; }
  TimeMs now() const { return now_; }
  const LinkModel& link() const { return link_; }

  std::vector<Vec2>& positions() { return pos_; }
  const std::vector<Vec2>& positions() const { return pos_; }

  /// Rebuilds adjacency and every hop table from current positions.
  /// Call after any position change; transport reads the snapshot.
  void refresh_topology();

  const std::vector<NodeId>& neighbors(NodeId n) const { return adj_[n]; }
  const std::vector<std::vector<NodeId>>& adjacency() const { return adj_; }
  int hops(NodeId a, NodeId b) const { return hops_[a][b]; }
  const std::vector<int>& hop_row(NodeId a) const { return hops_[a]; }
  bool reachable(NodeId a, NodeId b) const { return hops_[a][b] < kUnreachable; }

  /// Shortest path including both endpoints; empty if unreachable.
  std::vector<NodeId> shortest_path(NodeId from, NodeId to) const;

  /// Fraction of other nodes reachable from n.
  double reachable_fraction(NodeId n) const;

  void schedule_at(TimeMs t, std::function<void()> fn);
  void schedule_in(TimeMs dt, std::function<void()> fn) { schedule_at(now_ + dt, fn); }

  /// Runs every event due at or before t, then parks the clock at t.
  void run_until(TimeMs t);

  bool idle() const { return queue_.empty(); }

  /// One end-to-end delivery attempt of a message from src to dst over
  /// the current snapshot. Succeeds with delivery_prob^hops; on success
  /// returns the delivery latency (hops * hop_latency), otherwise
  /// nullopt. src == dst always succeeds instantly.
  std::optional<TimeMs> transmit(NodeId src, NodeId dst, Rng& loss_rng);

 private:
  double effective_link_prob(NodeId src);

  struct Event {
    TimeMs at;
    std::uint64_t seq;
    std::function<void()> fn;
    bool operator>(const Event& o) const {
      return at != o.at ? at > o.at : seq > o.seq;
    }
  };

  int n_;
  LinkModel link_;
  TimeMs now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::vector<Vec2> pos_;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::vector<int>> hops_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  // Congestion bookkeeping, maintained only when the knob is on.
  TimeMs send_instant_ = -1;
  std::vector<int> sends_this_instant_;
};

struct ReachabilitySample {
  TimeMs t = 0;
  double fraction = 0.0;
};

/// Steps mobility over [0, horizon] sampling the reachable fraction from
/// observer every tick. The world must already hold initial positions.
std::vector<ReachabilitySample> reachability_report(World& world, MobilityDriver& mob,
                                                    Rng& mobility_rng, NodeId observer,
                                                    TimeMs horizon, TimeMs tick);

}  // namespace hsim
