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
#include "hsim/world.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>

namespace hsim {

std::vector<std::vector<NodeId>> build_adjacency(const std::vector<Vec2>& pos,
                                                 double radio_range) {
  std::size_t n = pos.size();
  std::vector<std::vector<NodeId>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist(pos[i], pos[j]) <= radio_range) {
        adj[i].push_back(static_cast<NodeId>(j));
        adj[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  return adj;
}

std::vector<int> bfs_hops(const std::vector<std::vector<NodeId>>& adj, NodeId src) {
  std::vector<int> h(adj.size(), kUnreachable);
  std::deque<NodeId> q{src};
  h[src] = 0;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop_front();
    for (NodeId v : adj[u]) {
      if (h[v] == kUnreachable) {
        h[v] = h[u] + 1;
        q.push_back(v);
      }
    }
  }
  return h;
}

World::World(int n_nodes, const LinkModel& link)
    : n_(n_nodes), link_(link), pos_(static_cast<std::size_t>(n_nodes)) {
  assert(n_nodes > 0);
  refresh_topology();
}

void World::refresh_topology() {
  adj_ = build_adjacency(pos_, link_.radio_range);
  hops_.resize(static_cast<std::size_t>(n_));
  for (NodeId i = 0; i < n_; ++i) hops_[i] = bfs_hops(adj_, i);
}

std::vector<NodeId> World::shortest_path(NodeId from, NodeId to) const {
  if (hops_[from][to] >= kUnreachable) return {};
  if (from == to) return {from};
  std::vector<NodeId> parent(static_cast<std::size_t>(n_), -1);
  std::deque<NodeId> q{from};
  parent[from] = from;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop_front();
    if (u == to) break;
    for (NodeId v : adj_[u]) {
      if (parent[v] < 0) {
        parent[v] = u;
        q.push_back(v);
      }
    }
  }
  std::vector<NodeId> path;
  for (NodeId v = to; v != from; v = parent[v]) path.push_back(v);
  path.push_back(from);
  std::reverse(path.begin(), path.end());
  return path;
}

double World::reachable_fraction(NodeId n) const {
  if (n_ <= 1) return 0.0;
  int cnt = 0;
  for (NodeId m = 0; m < n_; ++m) {
    if (m != n && hops_[n][m] < kUnreachable) ++cnt;
  }
  return static_cast<double>(cnt) / static_cast<double>(n_ - 1);
}

void World::schedule_at(TimeMs t, std::function<void()> fn) {
  assert(t >= now_);
  queue_.push(Event{t, next_seq_++, std::move(fn)});
}

void World::run_until(TimeMs t) {
  while (!queue_.empty() && queue_.top().at <= t) {
    // Copy out before pop; the handler may schedule new events.
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.at;
    ev.fn();
  }
  now_ = std::max(now_, t);
}

double World::effective_link_prob(NodeId src) {
  if (link_.congestion_coeff <= 0.0) return link_.delivery_prob;
  if (send_instant_ != now_) {
    send_instant_ = now_;
    sends_this_instant_.assign(static_cast<std::size_t>(n_), 0);
  }
  int concurrent = sends_this_instant_[src];
  for (NodeId v : adj_[src]) concurrent += sends_this_instant_[v];
  ++sends_this_instant_[src];
  return link_.delivery_prob / (1.0 + link_.congestion_coeff * concurrent);
}

std::optional<TimeMs> World::transmit(NodeId src, NodeId dst, Rng& loss_rng) {
  if (src == dst) return TimeMs{0};
  int h = hops_[src][dst];
  if (h >= kUnreachable) return std::nullopt;
  double p = std::pow(effective_link_prob(src), h);
  if (!loss_rng.chance(p)) return std::nullopt;
  return link_.hop_latency * h;
}

std::vector<ReachabilitySample> reachability_report(World& world, MobilityDriver& mob,
                                                    Rng& mobility_rng, NodeId observer,
                                                    TimeMs horizon, TimeMs tick) {
  assert(tick > 0);
  std::vector<ReachabilitySample> out;
  world.refresh_topology();
  out.push_back({world.now(), world.reachable_fraction(observer)});
  for (TimeMs t = tick; t <= horizon; t += tick) {
    mob.step(world.positions(), world.now(), tick, mobility_rng);
    world.run_until(world.now() + tick);
    world.refresh_topology();
    out.push_back({world.now(), world.reachable_fraction(observer)});
  }
  return out;
}

}  // namespace hsim
