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
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsim/harness.hpp"

namespace {

using namespace hsim;

struct ScenarioOpts {
  std::string scenario = "military";
  std::string method = "harvest";
  std::uint64_t seed = 1;
  int nodes = 0;
  int cycles = -1;
  int peers = 0;
  int hops = 0;
  double delay_s = 0;
  double warmup_s = 0;
  double duration_s = 0;
  double monitor_slot_s = 0;
  double transfer_slot_s = 0;
  double range = 0;
  double delivery_prob = -1;
  int analysis_node = -1;
};

void add_scenario_options(CLI::App& cmd, ScenarioOpts& o) {
  cmd.add_option("--scenario", o.scenario, "Scenario preset: military or firefighting")
      ->capture_default_str();
  cmd.add_option("--method", o.method,
                 "Harvesting method: harvest, gossip, dht, dafn or scalar")
      ->capture_default_str();
  cmd.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd.add_option("--nodes", o.nodes, "Node count (0 keeps the preset)");
  cmd.add_option("--cycles", o.cycles, "Gossip cycles per harvest delay (-1 keeps it)");
  cmd.add_option("--peers", o.peers, "Peers per cycle (0 keeps the preset)");
  cmd.add_option("--hops", o.hops, "Peer candidate hop limit (0 keeps the preset)");
  cmd.add_option("--delay-s", o.delay_s, "Harvest delay in seconds (0 keeps it)");
  cmd.add_option("--warmup-s", o.warmup_s, "Warmup seconds (0 keeps it)");
  cmd.add_option("--duration-s", o.duration_s, "Measured seconds (0 keeps it)");
  cmd.add_option("--monitor-slot-s", o.monitor_slot_s,
                 "Monitor slot length in seconds (0 keeps it)");
  cmd.add_option("--transfer-slot-s", o.transfer_slot_s,
                 "Transfer slot length in seconds (0 keeps it)");
  cmd.add_option("--range", o.range, "Radio range in meters (0 keeps the preset)");
  cmd.add_option("--delivery-prob", o.delivery_prob,
                 "Per-hop delivery probability (negative keeps it)");
  cmd.add_option("--analysis-node", o.analysis_node,
                 "Analysis node id (negative keeps it)");
}

ScenarioConfig make_config(const ScenarioOpts& o) {
  ScenarioConfig cfg = scenario_by_name(o.scenario);
  cfg.method = parse_method(o.method);
  cfg.seed = o.seed;
  if (o.nodes > 0) cfg.n_nodes = o.nodes;
  if (o.cycles >= 0) cfg.gossip_cycles = o.cycles;
  if (o.peers > 0) cfg.max_peers = o.peers;
  if (o.hops > 0) cfg.max_hop_distance = o.hops;
  if (o.delay_s > 0) cfg.harvest_delay = ms_from_seconds(o.delay_s);
  if (o.warmup_s > 0) cfg.warmup = ms_from_seconds(o.warmup_s);
  if (o.duration_s > 0) cfg.duration = ms_from_seconds(o.duration_s);
  if (o.monitor_slot_s > 0) cfg.monitor_slot_len = ms_from_seconds(o.monitor_slot_s);
  if (o.transfer_slot_s > 0) cfg.transfer_slot_len = ms_from_seconds(o.transfer_slot_s);
  if (o.range > 0) cfg.link.radio_range = o.range;
  if (o.delivery_prob >= 0) cfg.link.delivery_prob = o.delivery_prob;
  if (o.analysis_node >= 0) cfg.analysis_node = o.analysis_node;
  cfg.validate();
  return cfg;
}

std::optional<std::ofstream> open_sink(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ofstream f(path);
  if (!f) throw CLI::ValidationError("cannot open " + path);
  return f;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    out.push_back(std::stod(csv.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

int cmd_run(const ScenarioOpts& o, const std::string& trace_path,
            const std::string& gt_path, const std::string& store_path) {
  ScenarioConfig cfg = make_config(o);
  auto trace = open_sink(trace_path);
  auto gt = open_sink(gt_path);
  auto store = open_sink(store_path);
  RunSinks sinks;
  if (trace) sinks.trace = &*trace;
  if (gt) sinks.ground_truth = &*gt;
  if (store) sinks.analysis_store = &*store;

  RunMetrics r = run_scenario(cfg, sinks);
  std::printf("scenario        %s\n", o.scenario.c_str());
  std::printf("method          %s\n", to_string(cfg.method));
  std::printf("seed            %llu\n", static_cast<unsigned long long>(cfg.seed));
  std::printf("conversations   %d (%d completed)\n", r.conversations_analyzed,
              r.conversations_completed);
  std::printf("tp_ratio        %.4f  (%d samples)\n", r.tp_mean, r.tp_samples);
  std::printf("fp_ratio        %.4f  (%d samples)\n", r.fp_mean, r.fp_samples);
  std::printf("overhead        %.4f kB/s per node\n", r.overhead_kbps);
  std::printf("pair_overhead   %.4f kB/s per communicating pair\n", r.per_pair_kbps);
  std::printf("total_bytes     %llu\n", static_cast<unsigned long long>(r.total_bytes));
  if (!r.reachability.empty()) {
    std::printf("reachability    %.3f at start, %.3f at end\n",
                r.reachability.front().fraction, r.reachability.back().fraction);
  }
  return 0;
}

int cmd_sweep(const ScenarioOpts& o, const std::string& axis, const std::string& values,
              const std::string& seeds, const std::string& out_path) {
  ScenarioConfig base = make_config(o);
  std::vector<double> vals = parse_doubles(values);
  std::vector<std::uint64_t> seed_list;
  for (double s : parse_doubles(seeds)) seed_list.push_back(static_cast<std::uint64_t>(s));
  if (vals.empty() || seed_list.empty())
    throw CLI::ValidationError("sweep needs --values and --seeds");

  auto points = sweep(base, axis, vals, seed_list);
  if (out_path.empty()) {
    emit_results(std::cout, points);
  } else {
    std::ofstream f(out_path);
    if (!f) throw CLI::ValidationError("cannot open " + out_path);
    emit_results(f, points);
    std::fprintf(stderr, "wrote %zu rows to %s\n", points.size(), out_path.c_str());
  }
  return 0;
}

int cmd_reachability(const ScenarioOpts& o, double horizon_s, double tick_s) {
  ScenarioConfig cfg = make_config(o);
  Rng rng(derive_seed(cfg.seed, "mobility"));
  World world(cfg.n_nodes, cfg.link);
  MobilityDriver mob(cfg.mobility, cfg.n_nodes);
  mob.init(world.positions(), rng);
  world.refresh_topology();
  auto samples = reachability_report(world, mob, rng, cfg.analysis_node,
                                     ms_from_seconds(horizon_s), ms_from_seconds(tick_s));
  std::printf("time_s,reachable_fraction\n");
  for (const auto& s : samples) std::printf("%.1f,%.4f\n", to_seconds(s.t), s.fraction);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time series harvesting simulator for mobile ad hoc networks"};
  app.set_config("--config", "", "Read options from an INI file");
  app.require_subcommand(1);

  ScenarioOpts run_opts;
  std::string trace_path, gt_path, store_path;
  CLI::App* run = app.add_subcommand("run", "Run one scenario and print metrics");
  add_scenario_options(*run, run_opts);
  run->add_option("--trace", trace_path, "Write the message trace CSV here");
  run->add_option("--ground-truth", gt_path, "Write the conversation log CSV here");
  run->add_option("--store-dump", store_path, "Write the analysis node store here");

  ScenarioOpts sweep_opts;
  std::string axis = "gossip_cycles", values, seeds = "1", out_path;
  CLI::App* sw = app.add_subcommand("sweep", "Run a parameter sweep, emit CSV");
  add_scenario_options(*sw, sweep_opts);
  sw->add_option("--axis", axis, "Swept knob, e.g. gossip_cycles or harvest_delay_s")
      ->capture_default_str();
  sw->add_option("--values", values, "Comma separated axis values")->required();
  sw->add_option("--seeds", seeds, "Comma separated seeds")->capture_default_str();
  sw->add_option("--out", out_path, "Results file (stdout when omitted)");

  ScenarioOpts reach_opts;
  double horizon_s = 960, tick_s = 60;
  CLI::App* re = app.add_subcommand("reachability", "Sample connectivity over time");
  add_scenario_options(*re, reach_opts);
  re->add_option("--horizon-s", horizon_s, "Report length in seconds")
      ->capture_default_str();
  re->add_option("--tick-s", tick_s, "Sample period in seconds")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(run_opts, trace_path, gt_path, store_path);
    if (sw->parsed()) return cmd_sweep(sweep_opts, axis, values, seeds, out_path);
    if (re->parsed()) return cmd_reachability(reach_opts, horizon_s, tick_s);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
