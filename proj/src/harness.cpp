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
#include "hsim/harness.hpp"

#include <cstdio>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "hsim/baselines.hpp"
#include "hsim/rng.hpp"

namespace hsim {

namespace {

struct Analysis {
  double tp_sum = 0.0, fp_sum = 0.0;
  int tp_n = 0, fp_n = 0, analyzed = 0, completed = 0;

  void add(const std::set<SeriesId>& d, const ConversationRecord& rec) {
    ++analyzed;
    if (rec.completed) ++completed;
    if (auto tp = tp_ratio(d, rec.gt)) {
      tp_sum += *tp;
      ++tp_n;
    }
    if (auto fp = fp_ratio(d, rec.gt)) {
      fp_sum += *fp;
      ++fp_n;
    }
  }
};

}  // namespace

RunMetrics run_scenario(const ScenarioConfig& cfg, const RunSinks& sinks) {
  cfg.validate();

  Rng mob_rng(derive_seed(cfg.seed, "mobility"));
  Rng topo_rng(derive_seed(cfg.seed, "topology"));
  Rng wl_rng(derive_seed(cfg.seed, "workload"));
  Rng conv_loss(derive_seed(cfg.seed, "conversation_loss"));
  Rng method_loss(derive_seed(cfg.seed, "method_loss"));
  Rng proto_rng(derive_seed(cfg.seed, "protocol"));

  World world(cfg.n_nodes, cfg.link);
  MobilityDriver mob(cfg.mobility, cfg.n_nodes);
  mob.init(world.positions(), mob_rng);
  world.refresh_topology();

  std::vector<TimeSeriesStore> monitors(
      static_cast<std::size_t>(cfg.n_nodes),
      TimeSeriesStore(cfg.monitor_slot_len, cfg.retention));
  ServiceTopology topo = build_topology(cfg.services, cfg.n_nodes, topo_rng);
  WorkloadDriver workload(world, topo, monitors, cfg.workload, wl_rng, conv_loss);

  TraceMux mux;
  ByteAccounting acct(cfg.n_nodes, cfg.warmup, cfg.measure_end());
  mux.add(&acct);
  std::optional<CsvTrace> csv;
  if (sinks.trace) {
    csv.emplace(*sinks.trace, true);
    mux.add(&*csv);
  }

  const ProtocolConfig pcfg = cfg.protocol();
  const char* method = to_string(cfg.method);
  const TimeMs horizon =
      cfg.measure_end() + cfg.workload.response_timeout + 1000;

  // Mobility: one self-rescheduling tick. Method upkeep that follows
  // the topology (cache pruning, backbone rebuilds) rides on it.
  std::vector<std::unique_ptr<SyncAgent>> agents;
  std::vector<std::unique_ptr<NaiveGossipAgent>> naive;
  GlobalSeriesIndex index;
  std::optional<DhtHarvester> dht;
  std::optional<DafnMethod> dafn;
  std::optional<ScalarMethod> scalar;

  switch (cfg.method) {
    case Method::harvest:
      for (NodeId i = 0; i < cfg.n_nodes; ++i) agents.push_back(std::make_unique<SyncAgent>(i));
      break;
    case Method::gossip:
      for (NodeId i = 0; i < cfg.n_nodes; ++i)
        naive.push_back(std::make_unique<NaiveGossipAgent>(i));
      break;
    case Method::dht:
      workload.on_observe = [&](NodeId n, SeriesId id, TimeMs) { index.note(id, n); };
      dht.emplace(index, DhtConfig{});
      break;
    case Method::dafn:
      dafn.emplace(cfg.n_nodes, cfg.monitor_slot_len, cfg.retention, DafnConfig{});
      break;
    case Method::scalar:
      scalar.emplace(cfg.n_nodes, cfg.monitor_slot_len, cfg.retention, ScalarConfig{});
      break;
  }

  std::function<void()> mobility_tick = [&] {
    mob.step(world.positions(), world.now(), cfg.mobility_tick, mob_rng);
    world.refresh_topology();
    if (dafn) dafn->tick(world, world.now());
    if (scalar) scalar->tick(world, monitors, world.now(), method_loss, &mux);
    world.schedule_in(cfg.mobility_tick, [&] { mobility_tick(); });
  };
  world.schedule_at(cfg.mobility_tick, [&] { mobility_tick(); });
  if (scalar) scalar->tick(world, monitors, 0, method_loss, &mux);

  std::function<void()> prune_tick = [&] {
    for (auto& s : monitors) s.prune(world.now());
    world.schedule_in(60'000, [&] { prune_tick(); });
  };
  world.schedule_at(60'000, [&] { prune_tick(); });

  RunMetrics metrics;
  std::function<void()> reach_tick = [&] {
    metrics.reachability.push_back(
        {world.now(), world.reachable_fraction(cfg.analysis_node)});
    world.schedule_in(cfg.reachability_sample_period, [&] { reach_tick(); });
  };
  world.schedule_at(0, [&] { reach_tick(); });

  // Gossip cycles, staggered per node so the network never beats in
  // lockstep.
  std::function<void(NodeId)> run_cycle;
  if (cfg.method == Method::harvest) {
    run_cycle = [&](NodeId node) {
      auto transfers = agents[node]->run_cycle(monitors[node], world.hop_row(node),
                                               world.now(), pcfg, proto_rng);
      for (auto& tr : transfers) {
        std::uint64_t bytes = dataset_wire_bytes(tr.dataset, pcfg.wire);
        auto series = static_cast<std::int64_t>(tr.dataset.entries.size());
        auto slots = static_cast<std::int64_t>(tr.dataset.slot_count());
        mux.on_event({world.now(), TraceEventKind::send, node, tr.to, bytes, series,
                      slots, method});
        auto latency = world.transmit(node, tr.to, method_loss);
        world.schedule_in(pcfg.effective_confirm_timeout(),
                          [&, node, tr_to = tr.to, id = tr.transfer_id] {
                            if (agents[node]->on_timeout(tr_to, id)) {
                              mux.on_event({world.now(), TraceEventKind::timeout, node,
                                            tr_to, 0, 0, 0, method});
                            }
                          });
        if (!latency) continue;
        world.schedule_in(*latency, [&, node, tr, bytes, series, slots] {
          mux.on_event({world.now(), TraceEventKind::receive, node, tr.to, bytes,
                        series, slots, method});
          Confirmation c =
              agents[tr.to]->accept_dataset(monitors[tr.to], node, tr.dataset,
                                            tr.transfer_id);
          std::uint64_t cb = confirm_wire_bytes(pcfg.wire);
          auto centries = static_cast<std::int64_t>(c.confirmed.size());
          mux.on_event({world.now(), TraceEventKind::confirm, tr.to, node, cb, centries,
                        0, method});
          auto back = world.transmit(tr.to, node, method_loss);
          if (!back) return;
          world.schedule_in(*back, [&, node, c, cb, centries, tr_to = tr.to] {
            mux.on_event({world.now(), TraceEventKind::receive, tr_to, node, cb,
                          centries, 0, method});
            agents[node]->on_confirm(c);
          });
        });
      }
      world.schedule_in(pcfg.cycle_period, [&, node] { run_cycle(node); });
    };
  } else if (cfg.method == Method::gossip) {
    run_cycle = [&](NodeId node) {
      auto transfers = naive[node]->run_cycle(monitors[node], world.hop_row(node),
                                              world.now(), pcfg, proto_rng);
      for (auto& tr : transfers) {
        std::uint64_t bytes = dataset_wire_bytes(tr.dataset, pcfg.wire);
        auto series = static_cast<std::int64_t>(tr.dataset.entries.size());
        auto slots = static_cast<std::int64_t>(tr.dataset.slot_count());
        mux.on_event({world.now(), TraceEventKind::send, node, tr.to, bytes, series,
                      slots, method});
        auto latency = world.transmit(node, tr.to, method_loss);
        if (!latency) continue;
        world.schedule_in(*latency, [&, node, tr, bytes, series, slots] {
          mux.on_event({world.now(), TraceEventKind::receive, node, tr.to, bytes,
                        series, slots, method});
          monitors[tr.to].merge(tr.dataset);
        });
      }
      world.schedule_in(pcfg.cycle_period, [&, node] { run_cycle(node); });
    };
  }
  if (run_cycle && cfg.gossip_cycles > 0) {
    for (NodeId i = 0; i < cfg.n_nodes; ++i) {
      TimeMs offset = static_cast<TimeMs>(proto_rng.uniform_int(0, pcfg.cycle_period - 1));
      world.schedule_at(offset, [&, i] { run_cycle(i); });
    }
  }

  // A finished conversation books its dependence analysis one harvest
  // delay later.
  Analysis analysis;
  workload.on_finished = [&](const ConversationRecord& rec) {
    if (rec.started < cfg.warmup || rec.started >= cfg.warmup + cfg.duration) return;
    world.schedule_at(rec.ended + cfg.harvest_delay, [&, rec] {
      EntityId root = client_entity(rec.client);
      std::set<SeriesId> d;
      switch (cfg.method) {
        case Method::harvest:
        case Method::gossip:
          d = discover_dg({&monitors[cfg.analysis_node]}, root, rec.started, rec.ended);
          break;
        case Method::dht: {
          TimeSeriesStore scratch(cfg.monitor_slot_len, cfg.retention);
          dht->harvest(world, monitors, cfg.analysis_node, root, rec.started, rec.ended,
                       scratch, method_loss, &mux);
          d = discover_dg({&monitors[cfg.analysis_node], &scratch}, root, rec.started,
                          rec.ended);
          break;
        }
        case Method::dafn:
          dafn->analyze(world, monitors, cfg.analysis_node, root, rec.started, rec.ended,
                        method_loss, &mux);
          d = discover_dg({&monitors[cfg.analysis_node], &dafn->cache(cfg.analysis_node)},
                          root, rec.started, rec.ended);
          break;
        case Method::scalar:
          scalar->analyze(world, monitors, cfg.analysis_node, root, rec.started,
                          rec.ended, method_loss, &mux);
          d = discover_dg(
              {&monitors[cfg.analysis_node], &scalar->cache(cfg.analysis_node)}, root,
              rec.started, rec.ended);
          break;
      }
      analysis.add(d, rec);
    });
  };
  // Conversations stop after the analyzed span; the tail of the measurement
  // window is dissemination-only, so the analyzed set is delay-independent.
  workload.start(0, cfg.warmup + cfg.duration);

  world.run_until(horizon);

  metrics.tp_samples = analysis.tp_n;
  metrics.fp_samples = analysis.fp_n;
  metrics.tp_mean = analysis.tp_n ? analysis.tp_sum / analysis.tp_n : 0.0;
  metrics.fp_mean = analysis.fp_n ? analysis.fp_sum / analysis.fp_n : 0.0;
  metrics.conversations_analyzed = analysis.analyzed;
  metrics.conversations_completed = analysis.completed;
  TimeMs window = cfg.duration + cfg.harvest_delay;
  metrics.overhead_kbps = acct.per_node_kbps(window);
  metrics.per_pair_kbps = acct.per_pair_kbps(window);
  metrics.total_bytes = acct.total_bytes();

  if (sinks.ground_truth) dump_ground_truth(*sinks.ground_truth, workload.log());
  if (sinks.analysis_store) monitors[cfg.analysis_node].dump(*sinks.analysis_store,
                                                             cfg.analysis_node);
  return metrics;
}

void apply_axis(ScenarioConfig& cfg, const std::string& axis, double value) {
  if (axis == "gossip_cycles") {
    cfg.gossip_cycles = static_cast<int>(value);
  } else if (axis == "max_peers") {
    cfg.max_peers = static_cast<int>(value);
  } else if (axis == "max_hop_distance") {
    cfg.max_hop_distance = static_cast<int>(value);
  } else if (axis == "harvest_delay_s") {
    cfg.harvest_delay = ms_from_seconds(value);
  } else if (axis == "transfer_slot_s") {
    cfg.transfer_slot_len = ms_from_seconds(value);
  } else if (axis == "n_nodes") {
    cfg.n_nodes = static_cast<int>(value);
  } else if (axis == "duration_s") {
    cfg.duration = ms_from_seconds(value);
  } else if (axis == "radio_range") {
    cfg.link.radio_range = value;
  } else if (axis == "delivery_prob") {
    cfg.link.delivery_prob = value;
  } else {
    throw std::invalid_argument("unknown axis: " + axis);
  }
}

std::vector<SweepPoint> sweep(const ScenarioConfig& base, const std::string& axis,
                              const std::vector<double>& values,
                              const std::vector<std::uint64_t>& seeds) {
  std::vector<SweepPoint> out;
  for (double v : values) {
    for (std::uint64_t s : seeds) {
      ScenarioConfig cfg = base;
      apply_axis(cfg, axis, v);
      cfg.seed = s;
      SweepPoint p;
      p.axis_value = v;
      p.seed = s;
      p.metrics = run_scenario(cfg);
      out.push_back(std::move(p));
    }
  }
  return out;
}

void emit_results(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << "axis_value,seed,tp_ratio,fp_ratio,overhead_kbps,conversations\n";
  char buf[160];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%g,%llu,%.6f,%.6f,%.6f,%d\n", p.axis_value,
                  static_cast<unsigned long long>(p.seed), p.metrics.tp_mean,
                  p.metrics.fp_mean, p.metrics.overhead_kbps,
                  p.metrics.conversations_analyzed);
    os << buf;
  }
}

}  // namespace hsim
