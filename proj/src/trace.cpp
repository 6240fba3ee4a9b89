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
#include "hsim/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hsim {

const char* to_string(TraceEventKind k) {
  switch (k) {
    case TraceEventKind::send: return "send";
    case TraceEventKind::receive: return "receive";
    case TraceEventKind::confirm: return "confirm";
    case TraceEventKind::timeout: return "timeout";
  }
  return "?";
}

CsvTrace::CsvTrace(std::ostream& os, bool with_method_column)
    : os_(os), with_method_(with_method_column) {
  os_ << "time,event,src,dst,bytes,series_count,slot_count";
  if (with_method_) os_ << ",method";
  os_ << "\n";
}

void CsvTrace::on_event(const TraceEvent& ev) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.3f,%s,%d,%d,%llu,%lld,%lld", to_seconds(ev.t),
                to_string(ev.kind), ev.src, ev.dst,
                static_cast<unsigned long long>(ev.bytes),
                static_cast<long long>(ev.series_count),
                static_cast<long long>(ev.slot_count));
  os_ << buf;
  if (with_method_) os_ << ',' << ev.method;
  os_ << "\n";
}

ByteAccounting::ByteAccounting(int n_nodes, TimeMs from, TimeMs to)
    : from_(from), to_(to), node_bytes_(static_cast<std::size_t>(n_nodes), 0) {}

void ByteAccounting::on_event(const TraceEvent& ev) {
  if (ev.t < from_ || ev.t >= to_ || ev.bytes == 0) return;
  switch (ev.kind) {
    case TraceEventKind::send:
    case TraceEventKind::confirm:
      node_bytes_[ev.src] += ev.bytes;
      pair_tx_[{ev.src, ev.dst}] += ev.bytes;
      break;
    case TraceEventKind::receive:
      node_bytes_[ev.dst] += ev.bytes;
      break;
    case TraceEventKind::timeout:
      break;
  }
}

std::uint64_t ByteAccounting::total_bytes() const {
  std::uint64_t sum = 0;
  for (std::uint64_t b : node_bytes_) sum += b;
  return sum;
}

double ByteAccounting::per_node_kbps(TimeMs window_len) const {
  if (window_len <= 0 || node_bytes_.empty()) return 0.0;
  double per_node = static_cast<double>(total_bytes()) / static_cast<double>(node_bytes_.size());
  return per_node / 1000.0 / to_seconds(window_len);
}

double ByteAccounting::per_pair_kbps(TimeMs window_len) const {
  if (window_len <= 0 || pair_tx_.empty()) return 0.0;
  std::uint64_t sum = 0;
  for (const auto& [pair, b] : pair_tx_) sum += b;
  double per_pair = static_cast<double>(sum) / static_cast<double>(pair_tx_.size());
  return per_pair / 1000.0 / to_seconds(window_len);
}

ByteAccounting fold_trace_csv(std::istream& is, int n_nodes, TimeMs from, TimeMs to) {
  ByteAccounting acc(n_nodes, from, to);
  std::string line;
  if (!std::getline(is, line)) return acc;  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    TraceEvent ev;

    std::getline(row, field, ',');
    ev.t = ms_from_seconds(std::stod(field));
    std::getline(row, field, ',');
    if (field == "send") {
      ev.kind = TraceEventKind::send;
    } else if (field == "receive") {
      ev.kind = TraceEventKind::receive;
    } else if (field == "confirm") {
      ev.kind = TraceEventKind::confirm;
    } else if (field == "timeout") {
      ev.kind = TraceEventKind::timeout;
    } else {
      throw std::invalid_argument("unknown trace event: " + field);
    }
    std::getline(row, field, ',');
    ev.src = std::stoi(field);
    std::getline(row, field, ',');
    ev.dst = std::stoi(field);
    std::getline(row, field, ',');
    ev.bytes = std::stoull(field);
    acc.on_event(ev);
  }
  return acc;
}

}  // namespace hsim
