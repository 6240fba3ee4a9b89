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
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hsim/time.hpp"
#include "hsim/world.hpp"

namespace hsim {

/// send: a node put a message on the air (bytes = message size).
/// receive: the destination (or next relay) got it.
/// confirm: a receiver transmitted a confirmation message.
/// timeout: a sender gave up waiting for a confirmation (no bytes).
enum class TraceEventKind { send, receive, confirm, timeout };

const char* to_string(TraceEventKind k);

struct TraceEvent {
  TimeMs t = 0;
  TraceEventKind kind = TraceEventKind::send;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint64_t bytes = 0;
  std::int64_t series_count = 0;
  std::int64_t slot_count = 0;
  const char* method = "";
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_event(const TraceEvent& ev) = 0;
};

/// CSV rows: time,event,src,dst,bytes,series_count,slot_count with an
/// extra trailing method column when comparing harvesting methods.
class CsvTrace : public TraceSink {
 public:
  CsvTrace(std::ostream& os, bool with_method_column);
  void on_event(const TraceEvent& ev) override;

 private:
  std::ostream& os_;
  bool with_method_;
};

/// Accumulates traffic inside a measurement window. A message is billed
/// to its transmitter on send/confirm rows and to its destination on
/// receive rows; pair totals cover transmissions only.
class ByteAccounting : public TraceSink {
 public:
  ByteAccounting(int n_nodes, TimeMs from, TimeMs to);
  void on_event(const TraceEvent& ev) override;

  std::uint64_t total_bytes() const;
  std::uint64_t node_bytes(NodeId n) const { return node_bytes_[n]; }
  const std::map<std::pair<NodeId, NodeId>, std::uint64_t>& pair_tx_bytes() const {
    return pair_tx_;
  }
  /// Mean traffic per node in kilobytes (1000 B) per second.
  double per_node_kbps(TimeMs window_len) const;
  /// Mean transmitted traffic per distinct communicating (src,dst) pair.
  double per_pair_kbps(TimeMs window_len) const;

 private:
  TimeMs from_, to_;
  std::vector<std::uint64_t> node_bytes_;
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> pair_tx_;
};

class TraceMux : public TraceSink {
 public:
  void add(TraceSink* sink) { sinks_.push_back(sink); }
  void on_event(const TraceEvent& ev) override {
    for (TraceSink* s : sinks_) s->on_event(ev);
  }

 private:
  std::vector<TraceSink*> sinks_;
};

/// Replays a trace CSV (with or without the method column) through the
/// same accounting, so metrics can be audited against the file.
ByteAccounting fold_trace_csv(std::istream& is, int n_nodes, TimeMs from, TimeMs to);

}  // namespace hsim
