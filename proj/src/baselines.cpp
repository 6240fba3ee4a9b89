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
#include "hsim/baselines.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace hsim {

namespace {

void emit(TraceSink* trace, const TraceEvent& ev) {
  if (trace) trace->on_event(ev);
}

/// Union of in-window slots per series sourced at `source`, as dataset
/// entries at the stores' resolution.
void append_window_entries(const std::vector<const TimeSeriesStore*>& stores,
                           EntityId source, TimeMs w_start, TimeMs w_end,
                           TransferDataset& out) {
  std::map<SeriesId, std::set<std::int64_t>> acc;
  for (const TimeSeriesStore* store : stores) {
    assert(store->slot_len() == out.slot_len);
    auto it = store->all().lower_bound({source, std::numeric_limits<EntityId>::min()});
    for (; it != store->all().end() && it->first.source == source; ++it) {
      TimeMs len = store->slot_len();
      std::int64_t lo = slot_of(w_start, len);
      if (slot_end(lo, len) <= w_start) ++lo;
      for (auto s = it->second.slots().lower_bound(lo);
           s != it->second.slots().end() && slot_start(*s, len) <= w_end; ++s) {
        acc[it->first].insert(*s);
      }
    }
  }
  for (auto& [id, slots] : acc) {
    TransferEntry e;
    e.id = id;
    e.first_slot = *slots.begin();
    std::int64_t last = *slots.rbegin();
    e.flags.assign(static_cast<std::size_t>(last - e.first_slot + 1), false);
    for (std::int64_t s : slots) e.flags[static_cast<std::size_t>(s - e.first_slot)] = true;
    e.newest_slot_time = slot_start(last, out.slot_len);
    out.entries.push_back(std::move(e));
  }
}

bool window_visible(const std::vector<const TimeSeriesStore*>& stores, SeriesId id,
                    TimeMs w_start, TimeMs w_end) {
  for (const TimeSeriesStore* s : stores) {
    const TimeSeries* ts = s->find(id);
    if (ts && ts->any_in(w_start, w_end + 1)) return true;
  }
  return false;
}

/// Duplicate-suppressed flood: every forwarder broadcasts once, every
/// successful link delivery is billed to the listener. Returns reached
/// nodes ascending (origin included). A null mask lets everyone forward.
std::vector<NodeId> flood(World& w, NodeId origin, std::uint64_t bytes,
                          const std::vector<bool>* forward_mask, Rng& loss,
                          TraceSink* trace, const char* method, PullStats& stats) {
  std::vector<bool> reached(static_cast<std::size_t>(w.size()), false);
  reached[origin] = true;
  std::vector<NodeId> wave{origin}, all{origin};
  double p = w.link().delivery_prob;
  while (!wave.empty()) {
    std::vector<NodeId> next;
    for (NodeId u : wave) {
      if (u != origin && forward_mask && !(*forward_mask)[u]) continue;
      emit(trace, {w.now(), TraceEventKind::send, u, -1, bytes, 0, 0, method});
      stats.bytes += bytes;
      for (NodeId v : w.neighbors(u)) {
        if (!loss.chance(p)) continue;
        emit(trace, {w.now(), TraceEventKind::receive, u, v, bytes, 0, 0, method});
        stats.bytes += bytes;
        if (!reached[v]) {
          reached[v] = true;
          next.push_back(v);
          all.push_back(v);
        }
      }
    }
    std::sort(next.begin(), next.end());
    wave = std::move(next);
  }
  std::sort(all.begin(), all.end());
  return all;
}

/// Hop-by-hop walk of a response along `path`; every relay is billed
/// and reported through on_relay. False when a link drops it.
bool relay_response(World& w, const std::vector<NodeId>& path, const TransferDataset& d,
                    const std::function<void(NodeId)>& on_relay, Rng& loss,
                    TraceSink* trace, const char* method, PullStats& stats,
                    const WireModel& wire) {
  std::uint64_t bytes = dataset_wire_bytes(d, wire);
  auto series = static_cast<std::int64_t>(d.entries.size());
  auto slots = static_cast<std::int64_t>(d.slot_count());
  double p = w.link().delivery_prob;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    NodeId a = path[i], b = path[i + 1];
    emit(trace, {w.now(), TraceEventKind::send, a, b, bytes, series, slots, method});
    stats.bytes += bytes;
    if (!loss.chance(p)) return false;
    emit(trace, {w.now(), TraceEventKind::receive, a, b, bytes, series, slots, method});
    stats.bytes += bytes;
    if (b != path.back() && on_relay) on_relay(b);
  }
  return true;
}

}  // namespace

TransferDataset build_full_dataset(const TimeSeriesStore& store, TimeMs now,
                                   const ProtocolConfig& cfg) {
  // An agent that never confirmed anything sends its whole aged window.
  return SyncAgent(-1).build_dataset(store, 0, now, cfg);
}

std::vector<OutboundTransfer> NaiveGossipAgent::run_cycle(const TimeSeriesStore& store,
                                                          const std::vector<int>& hop_row,
                                                          TimeMs now,
                                                          const ProtocolConfig& cfg,
                                                          Rng& rng) const {
  std::vector<NodeId> candidates = candidate_set(self_, hop_row, cfg.max_hop_distance);
  std::vector<OutboundTransfer> out;
  std::vector<NodeId> chosen = select_peers(candidates, cfg.max_peers, rng);
  if (chosen.empty()) return out;
  TransferDataset d = build_full_dataset(store, now, cfg);
  if (d.empty()) return out;
  for (NodeId peer : chosen) out.push_back({peer, 0, d});
  return out;
}

const std::set<NodeId>* GlobalSeriesIndex::holders(SeriesId id) const {
  auto it = holders_.find(id);
  return it == holders_.end() ? nullptr : &it->second;
}

PullStats DhtHarvester::harvest(World& world, const std::vector<TimeSeriesStore>& monitors,
                                NodeId analysis, EntityId root, TimeMs w_start,
                                TimeMs w_end, TimeSeriesStore& scratch, Rng& loss_rng,
                                TraceSink* trace) const {
  PullStats stats;
  const char* method = "dht";
  std::vector<const TimeSeriesStore*> local{&monitors[analysis], &scratch};
  std::set<EntityId> visited{root};
  std::set<SeriesId> attempted;
  std::deque<EntityId> frontier{root};

  while (!frontier.empty()) {
    EntityId e = frontier.front();
    frontier.pop_front();
    auto it = index_.all().lower_bound({e, std::numeric_limits<EntityId>::min()});
    for (; it != index_.all().end() && it->first.source == e; ++it) {
      SeriesId id = it->first;
      if (!attempted.insert(id).second) continue;

      if (!window_visible(local, id, w_start, w_end)) {
        // Holders nearest first, ids breaking ties.
        std::vector<NodeId> holders(it->second.begin(), it->second.end());
        std::sort(holders.begin(), holders.end(), [&](NodeId a, NodeId b) {
          int ha = world.hops(analysis, a), hb = world.hops(analysis, b);
          return ha != hb ? ha < hb : a < b;
        });
        for (NodeId h : holders) {
          if (h == analysis) continue;
          ++stats.requests;
          emit(trace, {world.now(), TraceEventKind::send, analysis, h, cfg_.request_bytes,
                       0, 0, method});
          stats.bytes += cfg_.request_bytes;
          if (!world.transmit(analysis, h, loss_rng)) continue;
          emit(trace, {world.now(), TraceEventKind::receive, analysis, h,
                       cfg_.request_bytes, 0, 0, method});
          stats.bytes += cfg_.request_bytes;

          TransferDataset resp;
          resp.slot_len = monitors[h].slot_len();
          const TimeSeries* ts = monitors[h].find(id);
          if (ts && ts->any_in(w_start, w_end + 1)) {
            append_window_entries({&monitors[h]}, e, w_start, w_end, resp);
            std::erase_if(resp.entries,
                          [&](const TransferEntry& en) { return en.id != id; });
          }
          std::uint64_t rb = dataset_wire_bytes(resp, cfg_.wire);
          auto ns = static_cast<std::int64_t>(resp.entries.size());
          auto nslots = static_cast<std::int64_t>(resp.slot_count());
          emit(trace, {world.now(), TraceEventKind::send, h, analysis, rb, ns, nslots,
                       method});
          stats.bytes += rb;
          if (!world.transmit(h, analysis, loss_rng)) continue;
          emit(trace, {world.now(), TraceEventKind::receive, h, analysis, rb, ns, nslots,
                       method});
          stats.bytes += rb;
          ++stats.responses;
          if (!resp.empty()) {
            scratch.merge(resp);
            break;
          }
        }
      }

      if (window_visible(local, id, w_start, w_end) && visited.insert(id.target).second) {
        frontier.push_back(id.target);
      }
    }
  }
  return stats;
}

DafnMethod::DafnMethod(int n_nodes, TimeMs cache_slot_len, TimeMs retention,
                       const DafnConfig& cfg)
    : cfg_(cfg) {
  nodes_.reserve(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    nodes_.push_back(NodeState{TimeSeriesStore(cache_slot_len, retention), {}});
  }
}

void DafnMethod::note_access(NodeId n, SeriesId id, TimeMs now) {
  nodes_[n].accesses[id].push_back(now);
}

int DafnMethod::access_count(NodeId n, SeriesId id, TimeMs now) {
  auto it = nodes_[n].accesses.find(id);
  if (it == nodes_[n].accesses.end()) return 0;
  auto& dq = it->second;
  while (!dq.empty() && dq.front() < now - cfg_.freq_window) dq.pop_front();
  return static_cast<int>(dq.size());
}

PullStats DafnMethod::analyze(World& world, const std::vector<TimeSeriesStore>& monitors,
                              NodeId analysis, EntityId root, TimeMs w_start, TimeMs w_end,
                              Rng& loss_rng, TraceSink* trace) {
  PullStats stats;
  const char* method = "dafn";
  std::set<EntityId> visited{root};
  std::deque<EntityId> frontier{root};

  while (!frontier.empty()) {
    EntityId e = frontier.front();
    frontier.pop_front();

    // Lookup floods the whole component once per entity.
    ++stats.requests;
    std::vector<NodeId> reached =
        flood(world, analysis, cfg_.request_bytes, nullptr, loss_rng, trace, method, stats);
    for (NodeId v : reached) {
      if (v == analysis) continue;
      TransferDataset resp;
      resp.slot_len = monitors[v].slot_len();
      append_window_entries({&monitors[v], &nodes_[v].cache}, e, w_start, w_end, resp);
      if (resp.empty()) continue;
      auto path = world.shortest_path(v, analysis);
      bool ok = relay_response(
          world, path, resp,
          [&](NodeId relay) { nodes_[relay].cache.merge(resp); }, loss_rng, trace, method,
          stats, cfg_.wire);
      if (ok) {
        nodes_[analysis].cache.merge(resp);
        for (const auto& en : resp.entries) note_access(analysis, en.id, world.now());
        ++stats.responses;
      }
    }

    std::vector<const TimeSeriesStore*> view{&monitors[analysis], &nodes_[analysis].cache};
    for (const TimeSeriesStore* s : view) {
      auto it = s->all().lower_bound({e, std::numeric_limits<EntityId>::min()});
      for (; it != s->all().end() && it->first.source == e; ++it) {
        if (!it->second.any_in(w_start, w_end + 1)) continue;
        if (visited.insert(it->first.target).second) frontier.push_back(it->first.target);
      }
    }
  }
  return stats;
}

void DafnMethod::prune_duplicates(World& world, TimeMs now) {
  // Pairwise between neighbors; the per-component coordinator itself
  // exchanges negligible control traffic and is not billed.
  std::vector<std::pair<NodeId, SeriesId>> to_erase;
  for (NodeId u = 0; u < world.size(); ++u) {
    for (NodeId v : world.neighbors(u)) {
      if (v <= u) continue;
      const auto& cu = nodes_[u].cache.all();
      const auto& cv = nodes_[v].cache.all();
      auto iu = cu.begin();
      auto iv = cv.begin();
      while (iu != cu.end() && iv != cv.end()) {
        if (iu->first < iv->first) {
          ++iu;
        } else if (iv->first < iu->first) {
          ++iv;
        } else {
          int fu = access_count(u, iu->first, now);
          int fv = access_count(v, iv->first, now);
          if (fu >= fv) {
            to_erase.emplace_back(v, iu->first);  // ties keep the lower id
          } else {
            to_erase.emplace_back(u, iu->first);
          }
          ++iu;
          ++iv;
        }
      }
    }
  }
  for (const auto& [n, id] : to_erase) nodes_[n].cache.erase(id);
}

void DafnMethod::tick(World& world, TimeMs now) {
  if (last_prune_ != kNeverMs && now - last_prune_ < cfg_.prune_period) return;
  last_prune_ = now;
  for (auto& ns : nodes_) ns.cache.prune(now);
  prune_duplicates(world, now);
}

std::vector<bool> build_backbone(const std::vector<std::vector<NodeId>>& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<bool> in_set(static_cast<std::size_t>(n), false);
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int n_comp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::deque<NodeId> q{static_cast<NodeId>(s)};
    comp[s] = n_comp;
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop_front();
      for (NodeId v : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = n_comp;
          q.push_back(v);
        }
      }
    }
    ++n_comp;
  }

  for (int c = 0; c < n_comp; ++c) {
    std::vector<NodeId> members;
    for (int i = 0; i < n; ++i) {
      if (comp[i] == c) members.push_back(i);
    }
    if (members.size() == 1) {
      in_set[members[0]] = true;
      continue;
    }

    // Greedy domination: best closed-neighborhood coverage, lowest id.
    std::set<NodeId> uncovered(members.begin(), members.end());
    std::vector<NodeId> dominators;
    while (!uncovered.empty()) {
      NodeId best = -1;
      std::size_t best_cover = 0;
      for (NodeId u : members) {
        std::size_t cover = uncovered.count(u);
        for (NodeId v : adj[u]) cover += uncovered.count(v);
        if (cover > best_cover) {
          best_cover = cover;
          best = u;
        }
      }
      dominators.push_back(best);
      uncovered.erase(best);
      for (NodeId v : adj[best]) uncovered.erase(v);
    }
    for (NodeId u : dominators) in_set[u] = true;

    // Join dominator islands with shortest connecting paths.
    while (true) {
      // Components of the backbone-induced subgraph, restricted to c.
      std::map<NodeId, int> bb_comp;
      int k = 0;
      for (NodeId u : members) {
        if (!in_set[u] || bb_comp.count(u)) continue;
        std::deque<NodeId> q{u};
        bb_comp[u] = k;
        while (!q.empty()) {
          NodeId x = q.front();
          q.pop_front();
          for (NodeId y : adj[x]) {
            if (in_set[y] && !bb_comp.count(y)) {
              bb_comp[y] = k;
              q.push_back(y);
            }
          }
        }
        ++k;
      }
      if (k <= 1) break;

      // BFS from component 0 members across the full graph to the
      // nearest member of any other backbone component.
      std::map<NodeId, NodeId> parent;
      std::deque<NodeId> q;
      for (auto& [u, cc] : bb_comp) {
        if (cc == 0) {
          parent[u] = u;
          q.push_back(u);
        }
      }
      NodeId bridge = -1;
      while (!q.empty() && bridge < 0) {
        NodeId u = q.front();
        q.pop_front();
        for (NodeId v : adj[u]) {
          if (parent.count(v)) continue;
          parent[v] = u;
          if (bb_comp.count(v) && bb_comp[v] != 0) {
            bridge = v;
            break;
          }
          q.push_back(v);
        }
      }
      assert(bridge >= 0);
      for (NodeId v = parent[bridge]; parent[v] != v; v = parent[v]) in_set[v] = true;
    }
  }
  return in_set;
}

ScalarMethod::ScalarMethod(int n_nodes, TimeMs cache_slot_len, TimeMs retention,
                           const ScalarConfig& cfg)
    : cfg_(cfg) {
  nodes_.reserve(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    nodes_.push_back(NodeState{TimeSeriesStore(cache_slot_len, retention)});
  }
  backbone_.assign(static_cast<std::size_t>(n_nodes), false);
}

void ScalarMethod::note_request(NodeId holder, NodeId requester, SeriesId id, TimeMs now) {
  auto& dq = requests_[{holder, requester, id}];
  dq.push_back(now);
  while (!dq.empty() && dq.front() < now - cfg_.push_window) dq.pop_front();
}

PullStats ScalarMethod::analyze(World& world, const std::vector<TimeSeriesStore>& monitors,
                                NodeId analysis, EntityId root, TimeMs w_start,
                                TimeMs w_end, Rng& loss_rng, TraceSink* trace) {
  PullStats stats;
  const char* method = "scalar";
  std::set<EntityId> visited{root};
  std::deque<EntityId> frontier{root};

  while (!frontier.empty()) {
    EntityId e = frontier.front();
    frontier.pop_front();

    ++stats.requests;
    std::vector<NodeId> reached = flood(world, analysis, cfg_.request_bytes, &backbone_,
                                        loss_rng, trace, method, stats);
    for (NodeId v : reached) {
      if (v == analysis) continue;
      TransferDataset resp;
      resp.slot_len = monitors[v].slot_len();
      append_window_entries({&monitors[v], &nodes_[v].cache}, e, w_start, w_end, resp);
      if (resp.empty()) continue;
      auto path = world.shortest_path(v, analysis);
      bool ok = relay_response(world, path, resp, nullptr, loss_rng, trace, method, stats,
                               cfg_.wire);
      if (ok) {
        nodes_[analysis].cache.merge(resp);
        ++stats.responses;
        for (const auto& en : resp.entries) {
          note_request(v, analysis, en.id, world.now());
          TimeMs& hw = push_high_water_.try_emplace({v, analysis, en.id}, kNeverMs)
                           .first->second;
          if (en.newest_slot_time > hw) hw = en.newest_slot_time;
        }
      }
    }

    std::vector<const TimeSeriesStore*> view{&monitors[analysis], &nodes_[analysis].cache};
    for (const TimeSeriesStore* s : view) {
      auto it = s->all().lower_bound({e, std::numeric_limits<EntityId>::min()});
      for (; it != s->all().end() && it->first.source == e; ++it) {
        if (!it->second.any_in(w_start, w_end + 1)) continue;
        if (visited.insert(it->first.target).second) frontier.push_back(it->first.target);
      }
    }
  }
  return stats;
}

void ScalarMethod::tick(World& world, const std::vector<TimeSeriesStore>& monitors,
                        TimeMs now, Rng& loss_rng, TraceSink* trace) {
  backbone_ = build_backbone(world.adjacency());

  if (last_prune_ == kNeverMs || now - last_prune_ >= cfg_.prune_period) {
    last_prune_ = now;
    for (auto& ns : nodes_) ns.cache.prune(now);
  }

  // Push replication: a series requested more than once within the
  // window keeps flowing from holder to requester as new slots appear.
  PullStats stats;
  for (auto& [key, dq] : requests_) {
    while (!dq.empty() && dq.front() < now - cfg_.push_window) dq.pop_front();
    if (dq.size() < 2) continue;

    TimeMs hw = push_high_water_.try_emplace(key, kNeverMs).first->second;
    TransferDataset d;
    d.slot_len = monitors[key.holder].slot_len();
    std::set<std::int64_t> fresh;
    const TimeSeriesStore* sources[] = {&monitors[key.holder],
                                        &nodes_[key.holder].cache};
    for (const TimeSeriesStore* s : sources) {
      const TimeSeries* ts = s->find(key.id);
      if (!ts) continue;
      assert(ts->slot_len() == d.slot_len);
      auto from = ts->slots().upper_bound(slot_of(hw, d.slot_len));
      for (auto it = from; it != ts->slots().end(); ++it) fresh.insert(*it);
    }
    if (fresh.empty()) continue;

    TransferEntry e;
    e.id = key.id;
    e.first_slot = *fresh.begin();
    std::int64_t last = *fresh.rbegin();
    e.flags.assign(static_cast<std::size_t>(last - e.first_slot + 1), false);
    for (std::int64_t s : fresh) e.flags[static_cast<std::size_t>(s - e.first_slot)] = true;
    e.newest_slot_time = slot_start(last, d.slot_len);
    d.entries.push_back(std::move(e));

    auto path = world.shortest_path(key.holder, key.requester);
    if (path.empty()) continue;
    if (relay_response(world, path, d, nullptr, loss_rng, trace, "scalar", stats,
                       cfg_.wire)) {
      nodes_[key.requester].cache.merge(d);
      push_high_water_[key] = d.entries[0].newest_slot_time;
    }
  }
}

}  // namespace hsim
