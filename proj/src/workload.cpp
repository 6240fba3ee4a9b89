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
#include "hsim/workload.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <deque>
#include <ostream>

namespace hsim {

ServiceTopology build_topology(const TopologyConfig& cfg, int n_nodes, Rng& rng) {
  assert(cfg.front_end > 0 && cfg.back_end >= cfg.chain_len);
  ServiceTopology topo;
  topo.cfg = cfg;

  std::vector<NodeId> all_nodes(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) all_nodes[i] = i;
  int n_rep = std::min(cfg.replicas, n_nodes);
  for (int s = 0; s < cfg.n_services(); ++s) {
    auto nodes = rng.sample(all_nodes, static_cast<std::size_t>(n_rep));
    std::sort(nodes.begin(), nodes.end());
    topo.replicas.push_back(std::move(nodes));
  }

  std::vector<int> back_ends(static_cast<std::size_t>(cfg.back_end));
  for (int b = 0; b < cfg.back_end; ++b) back_ends[b] = cfg.front_end + b;
  for (int m = 0; m < cfg.front_end * cfg.methods_per_service; ++m) {
    topo.chains.push_back(rng.sample(back_ends, static_cast<std::size_t>(cfg.chain_len)));
  }
  return topo;
}

NodeId bind_replica(const ServiceTopology& topo, int service, NodeId from,
                    const World& world) {
  const auto& nodes = topo.replicas[service];
  assert(!nodes.empty());
  NodeId best = nodes.front();
  int best_hops = world.hops(from, best);
  for (NodeId n : nodes) {
    int h = world.hops(from, n);
    if (h < best_hops) {  // ties keep the lowest id; lists are ascending
      best = n;
      best_hops = h;
    }
  }
  return best;
}

WorkloadDriver::WorkloadDriver(World& world, const ServiceTopology& topo,
                               std::vector<TimeSeriesStore>& stores,
                               const WorkloadParams& params, Rng& workload_rng,
                               Rng& loss_rng)
    : world_(world), topo_(topo), stores_(stores), params_(params), rng_(workload_rng),
      loss_rng_(loss_rng) {
  assert(static_cast<int>(stores_.size()) == world_.size());
}

void WorkloadDriver::start(TimeMs from, TimeMs until) {
  for (NodeId c = 0; c < world_.size(); ++c) {
    // Spread first requests across one period so clients do not align.
    TimeMs first = from + rng_.uniform_int(0, params_.period);
    schedule_client(c, first, until);
  }
}

void WorkloadDriver::schedule_client(NodeId client, TimeMs at, TimeMs until) {
  if (at >= until) return;
  world_.schedule_at(at, [this, client, at, until] {
    begin(client, at);
    TimeMs next = at + rng_.uniform_int(params_.period - params_.period_jitter,
                                        params_.period + params_.period_jitter);
    schedule_client(client, next, until);
  });
}

void WorkloadDriver::observe(NodeId node, SeriesId id, TimeMs t) {
  stores_[node].record_occurrence(id, t);
  if (oracle) oracle->record_occurrence(id, t);
  if (on_observe) on_observe(node, id, t);
}

void WorkloadDriver::begin(NodeId client, TimeMs at) {
  int method = static_cast<int>(rng_.bounded(static_cast<std::uint64_t>(topo_.n_methods())));
  int fe = method / topo_.cfg.methods_per_service;

  Live lv;
  lv.rec.id = next_id_++;
  lv.rec.client = client;
  lv.rec.started = at;
  lv.entity.push_back(client_entity(client));
  lv.node.push_back(client);
  lv.entity.push_back(fe);
  for (int be : topo_.chains[method]) lv.entity.push_back(be);

  std::int64_t id = lv.rec.id;
  live_.emplace(id, std::move(lv));
  request_step(id, 1);
}

void WorkloadDriver::request_step(std::int64_t conv, std::size_t k) {
  Live& lv = live_.at(conv);
  TimeMs now = world_.now();
  if (now - lv.rec.started > params_.response_timeout) {
    finish(conv, false);
    return;
  }

  NodeId caller = lv.node[k - 1];
  NodeId callee = bind_replica(topo_, lv.entity[k], caller, world_);
  lv.node.push_back(callee);
  SeriesId edge{lv.entity[k - 1], lv.entity[k]};
  lv.rec.gt.push_back(edge);
  lv.rec.gt_times.push_back(now);
  observe(caller, edge, now);

  auto latency = world_.transmit(caller, callee, loss_rng_);
  if (!latency) {
    fail_at_timeout(conv);
    return;
  }
  bool last = k + 1 >= lv.entity.size();
  world_.schedule_in(*latency, [this, conv, k, edge, callee, last] {
    observe(callee, edge, world_.now());
    std::int64_t proc = params_.proc_delay;
    if (last) {
      world_.schedule_in(proc, [this, conv, k] { response_step(conv, k); });
    } else {
      world_.schedule_in(proc, [this, conv, k] { request_step(conv, k + 1); });
    }
  });
}

void WorkloadDriver::response_step(std::int64_t conv, std::size_t k) {
  Live& lv = live_.at(conv);
  TimeMs now = world_.now();
  if (now - lv.rec.started > params_.response_timeout) {
    finish(conv, false);
    return;
  }

  NodeId responder = lv.node[k];
  NodeId upstream = lv.node[k - 1];
  SeriesId edge{lv.entity[k - 1], lv.entity[k]};
  observe(responder, edge, now);

  auto latency = world_.transmit(responder, upstream, loss_rng_);
  if (!latency) {
    fail_at_timeout(conv);
    return;
  }
  world_.schedule_in(*latency, [this, conv, k, edge, upstream] {
    observe(upstream, edge, world_.now());
    if (k == 1) {
      finish(conv, true);
    } else {
      std::int64_t proc = params_.proc_delay;
      world_.schedule_in(proc, [this, conv, k] { response_step(conv, k - 1); });
    }
  });
}

// The drop is invisible to the participants; only the client notices,
// once its response timeout runs out.
void WorkloadDriver::fail_at_timeout(std::int64_t conv) {
  TimeMs expiry = live_.at(conv).rec.started + params_.response_timeout;
  TimeMs wait = expiry > world_.now() ? expiry - world_.now() : 0;
  world_.schedule_in(wait, [this, conv] {
    if (live_.count(conv)) finish(conv, false);
  });
}

void WorkloadDriver::finish(std::int64_t conv, bool completed) {
  auto it = live_.find(conv);
  Live& lv = it->second;
  lv.rec.completed = completed;
  lv.rec.ended = world_.now();
  log_.push_back(lv.rec);
  ConversationRecord rec = lv.rec;
  live_.erase(it);
  if (on_finished) on_finished(rec);
}

std::set<SeriesId> discover_dg(const std::vector<const TimeSeriesStore*>& stores,
                               EntityId root, TimeMs w_start, TimeMs w_end) {
  std::set<SeriesId> edges;
  std::set<EntityId> visited{root};
  std::deque<EntityId> frontier{root};
  while (!frontier.empty()) {
    EntityId e = frontier.front();
    frontier.pop_front();
    for (const TimeSeriesStore* store : stores) {
      auto it = store->all().lower_bound({e, std::numeric_limits<EntityId>::min()});
      for (; it != store->all().end() && it->first.source == e; ++it) {
        if (!it->second.any_in(w_start, w_end + 1)) continue;
        edges.insert(it->first);
        if (visited.insert(it->first.target).second) frontier.push_back(it->first.target);
      }
    }
  }
  return edges;
}

std::optional<double> tp_ratio(const std::set<SeriesId>& discovered,
                               const std::vector<SeriesId>& gt) {
  std::set<SeriesId> truth(gt.begin(), gt.end());
  if (truth.empty()) return std::nullopt;
  std::size_t hit = 0;
  for (const SeriesId& e : truth) hit += discovered.count(e);
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

std::optional<double> fp_ratio(const std::set<SeriesId>& discovered,
                               const std::vector<SeriesId>& gt) {
  if (discovered.empty()) return std::nullopt;
  std::set<SeriesId> truth(gt.begin(), gt.end());
  std::size_t wrong = 0;
  for (const SeriesId& e : discovered) wrong += truth.count(e) == 0;
  return static_cast<double>(wrong) / static_cast<double>(discovered.size());
}

void dump_ground_truth(std::ostream& os, const std::vector<ConversationRecord>& log) {
  os << "conversation,source,target,time\n";
  char buf[96];
  for (const auto& rec : log) {
    for (std::size_t i = 0; i < rec.gt.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%lld,%d,%d,%.3f\n", static_cast<long long>(rec.id),
                    rec.gt[i].source, rec.gt[i].target, to_seconds(rec.gt_times[i]));
      os << buf;
    }
  }
}

}  // namespace hsim
