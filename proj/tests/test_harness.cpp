#include <doctest.h>

#include <sstream>

#include "hsim/harness.hpp"

using namespace hsim;

namespace {

ScenarioConfig small_scenario(Method m, std::uint64_t seed) {
  ScenarioConfig c;
  c.n_nodes = 10;
  c.seed = seed;
  c.method = m;
  c.mobility.area_w = 400;
  c.mobility.area_h = 400;
  c.mobility.deploy_radius = 150;
  c.link.radio_range = 200;
  c.warmup = 60'000;
  c.duration = 120'000;
  c.harvest_delay = 60'000;
  c.gossip_cycles = 8;
  c.retention = 600'000;
  c.workload.period = 10'000;
  c.workload.period_jitter = 1000;
  return c;
}

}  // namespace

TEST_CASE("scenario validation names the offending field") {
  ScenarioConfig c = small_scenario(Method::harvest, 1);
  CHECK_NOTHROW(c.validate());

  c.n_nodes = 1;
  CHECK_THROWS_WITH_AS(c.validate(), "n_nodes: need at least two nodes",
                       std::invalid_argument);
  c = small_scenario(Method::harvest, 1);
  c.transfer_slot_len = 30;
  CHECK_THROWS_WITH_AS(c.validate(),
                       "transfer_slot_len: not commensurate with monitor_slot_len",
                       std::invalid_argument);
  c = small_scenario(Method::harvest, 1);
  c.retention = 30'000;
  CHECK_THROWS_WITH_AS(c.validate(),
                       "retention: shorter than the aging limit, fresh data would be pruned",
                       std::invalid_argument);
  c = small_scenario(Method::harvest, 1);
  c.analysis_node = 10;
  CHECK_THROWS_WITH_AS(c.validate(), "analysis_node: out of range",
                       std::invalid_argument);
}

TEST_CASE("method names round-trip") {
  for (Method m : {Method::harvest, Method::gossip, Method::dht, Method::dafn,
                   Method::scalar}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("bogus"), std::invalid_argument);
}

TEST_CASE("apply_axis rejects unknown axes and converts seconds") {
  ScenarioConfig c = small_scenario(Method::harvest, 1);
  apply_axis(c, "gossip_cycles", 16);
  CHECK(c.gossip_cycles == 16);
  apply_axis(c, "harvest_delay_s", 240);
  CHECK(c.harvest_delay == 240'000);
  apply_axis(c, "transfer_slot_s", 0.1);
  CHECK(c.transfer_slot_len == 100);
  CHECK_THROWS_AS(apply_axis(c, "warp_factor", 9), std::invalid_argument);
}

TEST_CASE("identical seeds give byte-identical traces and metrics") {
  std::ostringstream t1, t2;
  RunSinks s1, s2;
  s1.trace = &t1;
  s2.trace = &t2;
  RunMetrics a = run_scenario(small_scenario(Method::harvest, 11), s1);
  RunMetrics b = run_scenario(small_scenario(Method::harvest, 11), s2);
  CHECK(t1.str() == t2.str());
  CHECK(t1.str().size() > 1000);
  CHECK(a.tp_mean == b.tp_mean);
  CHECK(a.fp_mean == b.fp_mean);
  CHECK(a.total_bytes == b.total_bytes);
  CHECK(a.conversations_analyzed == b.conversations_analyzed);

  RunMetrics c = run_scenario(small_scenario(Method::harvest, 12));
  CHECK(a.total_bytes != c.total_bytes);
}

TEST_CASE("reported overhead equals a fold over the emitted trace") {
  for (Method m : {Method::harvest, Method::dafn}) {
    CAPTURE(to_string(m));
    ScenarioConfig cfg = small_scenario(m, 21);
    std::ostringstream trace;
    RunSinks sinks;
    sinks.trace = &trace;
    RunMetrics r = run_scenario(cfg, sinks);
    std::istringstream is(trace.str());
    ByteAccounting fold = fold_trace_csv(is, cfg.n_nodes, cfg.warmup, cfg.measure_end());
    CHECK(fold.total_bytes() == r.total_bytes);
    CHECK(fold.per_node_kbps(cfg.duration + cfg.harvest_delay) ==
          doctest::Approx(r.overhead_kbps).epsilon(1e-12));
    CHECK(fold.per_pair_kbps(cfg.duration + cfg.harvest_delay) ==
          doctest::Approx(r.per_pair_kbps).epsilon(1e-12));
  }
}

TEST_CASE("mobility is isolated from the harvesting method") {
  RunMetrics a = run_scenario(small_scenario(Method::harvest, 31));
  RunMetrics b = run_scenario(small_scenario(Method::dafn, 31));
  REQUIRE(a.reachability.size() == b.reachability.size());
  for (std::size_t i = 0; i < a.reachability.size(); ++i) {
    CHECK(a.reachability[i].t == b.reachability[i].t);
    CHECK(a.reachability[i].fraction == b.reachability[i].fraction);
  }
  // Same mobility, same workload: the analyzed set matches too.
  CHECK(a.conversations_analyzed == b.conversations_analyzed);
}

TEST_CASE("zero cycles means no harvesting traffic and local-only discovery") {
  ScenarioConfig cfg = small_scenario(Method::harvest, 41);
  cfg.gossip_cycles = 0;
  RunMetrics local = run_scenario(cfg);
  CHECK(local.total_bytes == 0);
  CHECK(local.overhead_kbps == 0.0);
  CHECK(local.conversations_analyzed > 50);

  RunMetrics harvested = run_scenario(small_scenario(Method::harvest, 41));
  CHECK(local.tp_mean < harvested.tp_mean);
  CHECK(harvested.tp_mean > 0.8);
}

TEST_CASE("ground truth and store sinks produce parseable output") {
  ScenarioConfig cfg = small_scenario(Method::harvest, 51);
  std::ostringstream gt, store;
  RunSinks sinks;
  sinks.ground_truth = &gt;
  sinks.analysis_store = &store;
  run_scenario(cfg, sinks);
  std::string gts = gt.str();
  CHECK(gts.rfind("conversation,source,target,time", 0) == 0);
  CHECK(std::count(gts.begin(), gts.end(), '\n') > 50);
  // Store rows: node,source,target,slot_index,slot_len for the analysis node.
  std::string rows = store.str();
  CHECK(rows.rfind("0,", 0) == 0);
  std::string first_row = rows.substr(0, rows.find('\n'));
  CHECK(std::count(first_row.begin(), first_row.end(), ',') == 4);
}

TEST_CASE("sweep runs the grid and emits one row per point") {
  ScenarioConfig base = small_scenario(Method::harvest, 1);
  base.duration = 60'000;
  auto points = sweep(base, "gossip_cycles", {0, 8}, {1, 2});
  REQUIRE(points.size() == 4);
  CHECK(points[0].axis_value == 0);
  CHECK(points[3].seed == 2);
  CHECK(points[0].metrics.total_bytes == 0);
  CHECK(points[2].metrics.total_bytes > 0);

  std::ostringstream os;
  emit_results(os, points);
  std::string s = os.str();
  CHECK(s.rfind("axis_value,seed,tp_ratio,fp_ratio,overhead_kbps,conversations", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
