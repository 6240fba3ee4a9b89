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

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <vector>

#include "hsim/time.hpp"

namespace hsim {

/// Monitored entities: services and clients share one id space.
using EntityId = std::int32_t;

/// One directed dependence: source invoked target at some point in time.
struct SeriesId {
  EntityId source = 0;
  EntityId target = 0;
  auto operator<=>(const SeriesId&) const = default;
};

std::ostream& operator<<(std::ostream& os, const SeriesId& id);

/// Boolean time series over fixed-length slots. A slot is either flagged
/// (the dependence was observed inside it) or absent; absent means false.
/// Slot k covers [k*slot_len, (k+1)*slot_len).
class TimeSeries {
 public:
  explicit TimeSeries(TimeMs slot_len);

  TimeMs slot_len() const { return slot_len_; }
  bool empty() const { return slots_.empty(); }
  std::size_t flagged_count() const { return slots_.size(); }
  bool flagged(std::int64_t slot) const { return slots_.count(slot) != 0; }

  void flag(std::int64_t slot) { slots_.insert(slot); }
  void flag_time(TimeMs t) { slots_.insert(slot_of(t, slot_len_)); }

  /// pre: !empty()
  std::int64_t newest_slot() const { return *slots_.rbegin(); }
  std::int64_t oldest_slot() const { return *slots_.begin(); }
  TimeMs newest_slot_start() const { return slot_start(newest_slot(), slot_len_); }

  const std::set<std::int64_t>& slots() const { return slots_; }

  void drop_slots_before(std::int64_t slot);

  /// True if any flagged slot overlaps [from, to).
  bool any_in(TimeMs from, TimeMs to) const;

  /// Converts to a different resolution. Aggregation (coarser target)
  /// ORs source slots together; splitting (finer target) replicates a
  /// flag across every covered slot, so a flag never gets lost and a
  /// round trip may only widen the series.
  /// throws std::invalid_argument if the lengths are not commensurate.
  TimeSeries resample(TimeMs target_slot_len) const;

 private:
  TimeMs slot_len_;
  std::set<std::int64_t> slots_;
};

/// Contiguous run of slot flags starting at first_slot.
struct SlotRun {
  std::int64_t first_slot = 0;
  std::vector<bool> flags;
};

/// Strips leading and trailing false flags, adjusting first_slot so the
/// run begins and ends on a flagged slot. An all-false run comes back
/// empty. Interior gaps are kept verbatim.
SlotRun trim_empty_ends(const SlotRun& run);

/// One series inside a transfer: a trimmed run plus the timestamp of the
/// newest flagged slot, which the receiver echoes in its confirmation.
struct TransferEntry {
  SeriesId id;
  std::int64_t first_slot = 0;
  std::vector<bool> flags;
  TimeMs newest_slot_time = 0;
};

/// Payload of one synchronization message.
struct TransferDataset {
  TimeMs slot_len = 0;
  std::vector<TransferEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t slot_count() const;
};

/// Per-node collection of series at one resolution, with bounded
/// retention. Merging is an OR per slot, so it is commutative,
/// associative and idempotent regardless of arrival order.
class TimeSeriesStore {
 public:
  TimeSeriesStore(TimeMs slot_len, TimeMs retention);

  TimeMs slot_len() const { return slot_len_; }
  TimeMs retention() const { return retention_; }

  /// Flags the slot containing `t`, creating the series if new.
  void record_occurrence(SeriesId id, TimeMs t);

  void flag_slot(SeriesId id, std::int64_t slot);

  /// Drops every slot whose interval ends before now - retention.
  /// Series left without slots are dropped entirely.
  void prune(TimeMs now);

  /// OR-merges a received dataset, converting resolution when the
  /// dataset was built at a commensurate but different slot length.
  void merge(const TransferDataset& dataset);

  const TimeSeries* find(SeriesId id) const;
  void erase(SeriesId id) { series_.erase(id); }
  bool contains(SeriesId id) const { return series_.count(id) != 0; }
  std::size_t series_count() const { return series_.size(); }
  std::size_t slot_count() const;
  const std::map<SeriesId, TimeSeries>& all() const { return series_; }

  /// Flagged slots per series, restricted to slots overlapping
  /// [from, to); series with nothing in range are omitted. This is the
  /// canonical shape for exact store comparisons.
  std::map<SeriesId, std::set<std::int64_t>> snapshot(TimeMs from, TimeMs to) const;

  /// CSV rows: node,source,target,slot_index,slot_len (slot_len in seconds).
  void dump(std::ostream& os, std::int32_t node) const;

 private:
  TimeMs slot_len_;
  TimeMs retention_;
  std::map<SeriesId, TimeSeries> series_;
};

}  // namespace hsim
