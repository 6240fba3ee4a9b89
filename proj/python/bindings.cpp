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
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <optional>
#include <sstream>

#include "hsim/harness.hpp"

namespace py = pybind11;
using namespace hsim;

namespace {

std::optional<std::ofstream> sink(const std::optional<std::string>& path) {
  if (!path) return std::nullopt;
  std::ofstream f(*path);
  if (!f) throw std::runtime_error("cannot open " + *path);
  return f;
}

RunMetrics run_with_paths(const ScenarioConfig& cfg,
                          const std::optional<std::string>& trace_path,
                          const std::optional<std::string>& ground_truth_path,
                          const std::optional<std::string>& store_dump_path) {
  auto trace = sink(trace_path);
  auto gt = sink(ground_truth_path);
  auto store = sink(store_dump_path);
  RunSinks sinks;
  if (trace) sinks.trace = &*trace;
  if (gt) sinks.ground_truth = &*gt;
  if (store) sinks.analysis_store = &*store;
  py::gil_scoped_release release;
  return run_scenario(cfg, sinks);
}

}  // namespace

PYBIND11_MODULE(_harvestsim, m) {
  m.doc() = "Time series harvesting simulator for mobile ad hoc networks";

  py::enum_<Method>(m, "Method")
      .value("harvest", Method::harvest)
      .value("gossip", Method::gossip)
      .value("dht", Method::dht)
      .value("dafn", Method::dafn)
      .value("scalar", Method::scalar);

  py::enum_<MobilityModel>(m, "MobilityModel")
      .value("random_waypoint", MobilityModel::random_waypoint)
      .value("nomadic", MobilityModel::nomadic);

  py::class_<MobilityConfig>(m, "MobilityConfig")
      .def(py::init<>())
      .def_readwrite("model", &MobilityConfig::model)
      .def_readwrite("area_w", &MobilityConfig::area_w)
      .def_readwrite("area_h", &MobilityConfig::area_h)
      .def_readwrite("speed_min", &MobilityConfig::speed_min)
      .def_readwrite("speed_max", &MobilityConfig::speed_max)
      .def_readwrite("pause_time", &MobilityConfig::pause_time)
      .def_readwrite("deploy_radius", &MobilityConfig::deploy_radius)
      .def_readwrite("group_count", &MobilityConfig::group_count)
      .def_readwrite("group_radius", &MobilityConfig::group_radius)
      .def_readwrite("group_area_w", &MobilityConfig::group_area_w)
      .def_readwrite("group_area_h", &MobilityConfig::group_area_h);

  py::class_<LinkModel>(m, "LinkModel")
      .def(py::init<>())
      .def_readwrite("radio_range", &LinkModel::radio_range)
      .def_readwrite("delivery_prob", &LinkModel::delivery_prob)
      .def_readwrite("hop_latency", &LinkModel::hop_latency)
      .def_readwrite("congestion_coeff", &LinkModel::congestion_coeff);

  py::class_<WorkloadParams>(m, "WorkloadParams")
      .def(py::init<>())
      .def_readwrite("period", &WorkloadParams::period)
      .def_readwrite("period_jitter", &WorkloadParams::period_jitter)
      .def_readwrite("proc_delay", &WorkloadParams::proc_delay)
      .def_readwrite("response_timeout", &WorkloadParams::response_timeout);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("n_nodes", &ScenarioConfig::n_nodes)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("method", &ScenarioConfig::method)
      .def_readwrite("mobility", &ScenarioConfig::mobility)
      .def_readwrite("link", &ScenarioConfig::link)
      .def_readwrite("workload", &ScenarioConfig::workload)
      .def_readwrite("monitor_slot_len", &ScenarioConfig::monitor_slot_len)
      .def_readwrite("transfer_slot_len", &ScenarioConfig::transfer_slot_len)
      .def_readwrite("retention", &ScenarioConfig::retention)
      .def_readwrite("harvest_delay", &ScenarioConfig::harvest_delay)
      .def_readwrite("gossip_cycles", &ScenarioConfig::gossip_cycles)
      .def_readwrite("max_peers", &ScenarioConfig::max_peers)
      .def_readwrite("max_hop_distance", &ScenarioConfig::max_hop_distance)
      .def_readwrite("confirm_timeout", &ScenarioConfig::confirm_timeout)
      .def_readwrite("aging_limit", &ScenarioConfig::aging_limit)
      .def_readwrite("warmup", &ScenarioConfig::warmup)
      .def_readwrite("duration", &ScenarioConfig::duration)
      .def_readwrite("analysis_node", &ScenarioConfig::analysis_node)
      .def("validate", &ScenarioConfig::validate)
      .def("cycle_period", &ScenarioConfig::cycle_period)
      .def("__repr__", [](const ScenarioConfig& c) {
        std::ostringstream os;
        os << "ScenarioConfig(n_nodes=" << c.n_nodes << ", method=" << to_string(c.method)
           << ", seed=" << c.seed << ", gossip_cycles=" << c.gossip_cycles << ")";
        return os.str();
      });

  py::class_<ReachabilitySample>(m, "ReachabilitySample")
      .def_readonly("t", &ReachabilitySample::t)
      .def_readonly("fraction", &ReachabilitySample::fraction)
      .def("__repr__", [](const ReachabilitySample& s) {
        std::ostringstream os;
        os << "ReachabilitySample(t=" << s.t << ", fraction=" << s.fraction << ")";
        return os.str();
      });

  py::class_<RunMetrics>(m, "RunMetrics")
      .def_readonly("tp_mean", &RunMetrics::tp_mean)
      .def_readonly("fp_mean", &RunMetrics::fp_mean)
      .def_readonly("tp_samples", &RunMetrics::tp_samples)
      .def_readonly("fp_samples", &RunMetrics::fp_samples)
      .def_readonly("overhead_kbps", &RunMetrics::overhead_kbps)
      .def_readonly("per_pair_kbps", &RunMetrics::per_pair_kbps)
      .def_readonly("total_bytes", &RunMetrics::total_bytes)
      .def_readonly("conversations_analyzed", &RunMetrics::conversations_analyzed)
      .def_readonly("conversations_completed", &RunMetrics::conversations_completed)
      .def_readonly("reachability", &RunMetrics::reachability)
      .def("__repr__", [](const RunMetrics& r) {
        std::ostringstream os;
        os << "RunMetrics(tp_mean=" << r.tp_mean << ", fp_mean=" << r.fp_mean
           << ", overhead_kbps=" << r.overhead_kbps << ", conversations="
           << r.conversations_analyzed << ")";
        return os.str();
      });

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("axis_value", &SweepPoint::axis_value)
      .def_readonly("seed", &SweepPoint::seed)
      .def_readonly("metrics", &SweepPoint::metrics);

  m.def("military_scenario", &military_scenario,
        "Random waypoint vehicles on a 1 km x 2 km strip");
  m.def("firefighting_scenario", &firefighting_scenario,
        "Nomadic squads roaming a shared block");
  m.def("scenario_by_name", &scenario_by_name, py::arg("name"));

  m.def("run", &run_with_paths, py::arg("config"), py::arg("trace_path") = py::none(),
        py::arg("ground_truth_path") = py::none(),
        py::arg("store_dump_path") = py::none(),
        "Run one scenario; optional paths capture the trace, the conversation "
        "log and the analysis node store");

  m.def(
      "sweep",
      [](const ScenarioConfig& base, const std::string& axis,
         const std::vector<double>& values, const std::vector<std::uint64_t>& seeds) {
        py::gil_scoped_release release;
        return sweep(base, axis, values, seeds);
      },
      py::arg("base"), py::arg("axis"), py::arg("values"), py::arg("seeds"));

  m.def(
      "results_csv",
      [](const std::vector<SweepPoint>& points) {
        std::ostringstream os;
        emit_results(os, points);
        return os.str();
      },
      py::arg("points"));

  m.def(
      "reachability",
      [](const ScenarioConfig& cfg, double horizon_s, double tick_s) {
        Rng rng(derive_seed(cfg.seed, "mobility"));
        World world(cfg.n_nodes, cfg.link);
        MobilityDriver mob(cfg.mobility, cfg.n_nodes);
        mob.init(world.positions(), rng);
        world.refresh_topology();
        return reachability_report(world, mob, rng, cfg.analysis_node,
                                   ms_from_seconds(horizon_s),
                                   ms_from_seconds(tick_s));
      },
      py::arg("config"), py::arg("horizon_s") = 960.0, py::arg("tick_s") = 60.0,
      "Connectivity over time from the analysis node, mobility only");
}
