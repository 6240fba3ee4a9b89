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
#include "hsim/protocol.hpp"

#include <cassert>

namespace hsim {

namespace {

/// Flagged slots at transfer resolution with index >= lb.
std::set<std::int64_t> qualifying_slots(const TimeSeries& ts, TimeMs transfer_len,
                                        std::int64_t lb) {
  std::set<std::int64_t> out;
  TimeMs store_len = ts.slot_len();
  if (store_len == transfer_len) {
    for (auto it = ts.slots().lower_bound(lb); it != ts.slots().end(); ++it) out.insert(*it);
  } else if (store_len < transfer_len) {
    assert(transfer_len % store_len == 0);
    std::int64_t r = transfer_len / store_len;
    for (auto it = ts.slots().lower_bound(lb * r); it != ts.slots().end(); ++it) {
      out.insert(floor_div(*it, r));
    }
  } else {
    assert(store_len % transfer_len == 0);
    std::int64_t r = store_len / transfer_len;
    for (auto it = ts.slots().lower_bound(floor_div(lb, r)); it != ts.slots().end(); ++it) {
      for (std::int64_t k = 0; k < r; ++k) {
        std::int64_t s = *it * r + k;
        if (s >= lb) out.insert(s);
      }
    }
  }
  return out;
}

}  // namespace

std::uint64_t dataset_wire_bytes(const TransferDataset& d, const WireModel& w) {
  std::uint64_t bytes = w.header_bytes;
  for (const auto& e : d.entries) {
    bytes += w.series_id_bytes + w.timestamp_bytes + w.run_offset_bytes;
    bytes += (e.flags.size() + 7) / 8;
  }
  return bytes;
}

std::uint64_t confirm_wire_bytes(const WireModel& w) {
  return w.header_bytes + w.confirm_entry_bytes;
}

std::vector<NodeId> candidate_set(NodeId self, const std::vector<int>& hop_row, int max_hop) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < static_cast<NodeId>(hop_row.size()); ++v) {
    if (v != self && hop_row[v] >= 1 && hop_row[v] <= max_hop) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> select_peers(const std::vector<NodeId>& candidates, int max_peers,
                                 Rng& rng) {
  if (max_peers == 0 || candidates.size() <= static_cast<std::size_t>(max_peers)) {
    return candidates;
  }
  return rng.sample(candidates, static_cast<std::size_t>(max_peers));
}

TransferDataset SyncAgent::build_dataset(const TimeSeriesStore& store, NodeId peer,
                                         TimeMs now, const ProtocolConfig& cfg) const {
  TransferDataset out;
  out.slot_len = cfg.transfer_slot_len;
  const PeerSync* ps = nullptr;
  if (auto it = peers_.find(peer); it != peers_.end()) ps = &it->second;

  std::int64_t age_lb = ceil_div(now - cfg.aging_limit, cfg.transfer_slot_len);
  for (const auto& [id, ts] : store.all()) {
    TimeMs wm = kNeverMs;
    if (ps) {
      if (auto it = ps->watermark.find(id); it != ps->watermark.end()) wm = it->second;
    }
    std::int64_t lb = std::max(age_lb, slot_of(wm, cfg.transfer_slot_len) + 1);
    std::set<std::int64_t> slots = qualifying_slots(ts, cfg.transfer_slot_len, lb);
    if (slots.empty()) continue;

    TransferEntry e;
    e.id = id;
    e.first_slot = *slots.begin();
    std::int64_t last = *slots.rbegin();
    e.flags.assign(static_cast<std::size_t>(last - e.first_slot + 1), false);
    for (std::int64_t s : slots) e.flags[static_cast<std::size_t>(s - e.first_slot)] = true;
    e.newest_slot_time = slot_start(last, cfg.transfer_slot_len);
    out.entries.push_back(std::move(e));
  }
  return out;
}

std::vector<OutboundTransfer> SyncAgent::run_cycle(const TimeSeriesStore& store,
                                                   const std::vector<int>& hop_row,
                                                   TimeMs now, const ProtocolConfig& cfg,
                                                   Rng& rng) {
  std::vector<NodeId> candidates = candidate_set(self_, hop_row, cfg.max_hop_distance);
  std::erase_if(candidates, [this](NodeId v) { return pending_with(v); });
  std::vector<OutboundTransfer> out;
  for (NodeId peer : select_peers(candidates, cfg.max_peers, rng)) {
    TransferDataset d = build_dataset(store, peer, now, cfg);
    if (d.empty()) continue;
    PeerSync& ps = peers_[peer];
    ps.pending = true;
    ps.pending_id = next_transfer_id_++;
    if (observer_) observer_->dataset_sent(self_, peer, ps.pending_id, now, d);
    out.push_back({peer, ps.pending_id, std::move(d)});
  }
  return out;
}

Confirmation SyncAgent::accept_dataset(TimeSeriesStore& store, NodeId from,
                                       const TransferDataset& d,
                                       std::uint64_t transfer_id) const {
  store.merge(d);
  Confirmation c;
  c.from = self_;
  c.to = from;
  c.transfer_id = transfer_id;
  c.confirmed.reserve(d.entries.size());
  for (const auto& e : d.entries) c.confirmed.emplace_back(e.id, e.newest_slot_time);
  return c;
}

void SyncAgent::on_confirm(const Confirmation& c) {
  auto it = peers_.find(c.from);
  if (it == peers_.end()) return;
  PeerSync& ps = it->second;
  if (!ps.pending || ps.pending_id != c.transfer_id) return;  // stale confirmation
  for (const auto& [id, newest] : c.confirmed) {
    TimeMs& wm = ps.watermark.try_emplace(id, kNeverMs).first->second;
    if (newest > wm) wm = newest;
  }
  ps.pending = false;
  if (observer_) observer_->transfer_confirmed(self_, c.from, c.transfer_id);
}

bool SyncAgent::on_timeout(NodeId peer, std::uint64_t transfer_id) {
  auto it = peers_.find(peer);
  if (it == peers_.end()) return false;
  if (it->second.pending && it->second.pending_id == transfer_id) {
    it->second.pending = false;
    return true;
  }
  return false;
}

bool SyncAgent::pending_with(NodeId peer) const {
  auto it = peers_.find(peer);
  return it != peers_.end() && it->second.pending;
}

TimeMs SyncAgent::watermark(NodeId peer, SeriesId series) const {
  auto it = peers_.find(peer);
  if (it == peers_.end()) return kNeverMs;
  auto w = it->second.watermark.find(series);
  return w == it->second.watermark.end() ? kNeverMs : w->second;
}

}  // namespace hsim
