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
#include <map>
#include <vector>

#include "hsim/timeseries.hpp"
#include "hsim/world.hpp"

namespace hsim {

/// Serialized sizes in bytes. A dataset message carries a fixed header
/// plus, per series, its id, newest-slot timestamp, run offset and the
/// flag run packed as a bitmap. A confirmation is fixed-size: the sender
/// retains the pending dataset, so the wire ack carries only the transfer
/// id and the sender reconstructs the per-series watermarks locally.
struct WireModel {
  std::uint64_t header_bytes = 64;
  std::uint64_t series_id_bytes = 8;
  std::uint64_t timestamp_bytes = 8;
  std::uint64_t run_offset_bytes = 4;
  std::uint64_t confirm_entry_bytes = 24;
};

std::uint64_t dataset_wire_bytes(const TransferDataset& d, const WireModel& w);
std::uint64_t confirm_wire_bytes(const WireModel& w);

struct ProtocolConfig {
  /// Peers synchronized per cycle; 0 means every candidate.
  int max_peers = 1;
  int max_hop_distance = 1;
  TimeMs cycle_period = 9375;
  /// Aging limit T: slots older than now - T never enter a dataset.
  TimeMs aging_limit = 300'000;
  TimeMs transfer_slot_len = 100;
  TimeMs confirm_timeout = 60'000;
  WireModel wire;

  /// A confirmation that has not arrived by the next cycle is useless,
  /// so the wait is capped at one cycle period.
  TimeMs effective_confirm_timeout() const {
    return confirm_timeout < cycle_period ? confirm_timeout : cycle_period;
  }
};

/// Nodes within [1, max_hop] hops, ascending id. The node itself never
/// qualifies.
std::vector<NodeId> candidate_set(NodeId self, const std::vector<int>& hop_row, int max_hop);

/// Uniform choice of min(max_peers, |candidates|) peers; max_peers == 0
/// selects every candidate. Order is the draw order.
std::vector<NodeId> select_peers(const std::vector<NodeId>& candidates, int max_peers,
                                 Rng& rng);

struct OutboundTransfer {
  NodeId to = 0;
  std::uint64_t transfer_id = 0;
  TransferDataset dataset;
};

/// Per-series acknowledgement: the id and the newest slot timestamp of
/// the entry as received.
struct Confirmation {
  NodeId from = 0;
  NodeId to = 0;
  std::uint64_t transfer_id = 0;
  std::vector<std::pair<SeriesId, TimeMs>> confirmed;
};

class SyncObserver {
 public:
  virtual ~SyncObserver() = default;
  virtual void dataset_sent(NodeId src, NodeId dst, std::uint64_t transfer_id, TimeMs at,
                            const TransferDataset& d) = 0;
  virtual void transfer_confirmed(NodeId src, NodeId dst, std::uint64_t transfer_id) = 0;
};

/// Gossip synchronization state of one node: per-peer, per-series
/// watermarks of confirmed data, plus the pending-transfer machine.
///
/// A slot enters the dataset for peer p iff its start lies strictly
/// above the watermark t_s(series, p) and at or above now - aging_limit;
/// the run between the first and last qualifying slot ships verbatim,
/// so interior gaps cost bits but the ends are always flagged. The
/// watermark only advances when the peer's confirmation is accepted,
/// which keeps successive confirmed transfers disjoint per series.
class SyncAgent {
 public:
  explicit SyncAgent(NodeId self) : self_(self) {}

  NodeId self() const { return self_; }
  void set_observer(SyncObserver* obs) { observer_ = obs; }

  /// Builds the incremental dataset for one peer. Empty when nothing
  /// qualifies.
  TransferDataset build_dataset(const TimeSeriesStore& store, NodeId peer, TimeMs now,
                                const ProtocolConfig& cfg) const;

  /// One gossip cycle: pick peers among candidates (peers awaiting a
  /// confirmation are skipped), build datasets, and mark each non-empty
  /// transfer pending. Transmission is the caller's job.
  std::vector<OutboundTransfer> run_cycle(const TimeSeriesStore& store,
                                          const std::vector<int>& hop_row, TimeMs now,
                                          const ProtocolConfig& cfg, Rng& rng);

  /// Receiver side: merge and build the confirmation to send back.
  Confirmation accept_dataset(TimeSeriesStore& store, NodeId from,
                              const TransferDataset& d, std::uint64_t transfer_id) const;

  /// Sender side. A confirmation for the pending transfer advances the
  /// watermarks; anything stale (already timed out or superseded) is
  /// ignored.
  void on_confirm(const Confirmation& c);

  /// Sender side timeout: forget the transfer, watermarks untouched.
  /// True when the transfer was still pending.
  bool on_timeout(NodeId peer, std::uint64_t transfer_id);

  bool pending_with(NodeId peer) const;
  TimeMs watermark(NodeId peer, SeriesId series) const;

 private:
  struct PeerSync {
    std::map<SeriesId, TimeMs> watermark;
    bool pending = false;
    std::uint64_t pending_id = 0;
  };

  NodeId self_;
  std::uint64_t next_transfer_id_ = 1;
  std::map<NodeId, PeerSync> peers_;
  SyncObserver* observer_ = nullptr;
};

}  // namespace hsim
