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
#include "hsim/timeseries.hpp"

#include <cassert>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace hsim {

std::ostream& operator<<(std::ostream& os, const SeriesId& id) {
  return os << id.source << "->" << id.target;
}

TimeSeries::TimeSeries(TimeMs slot_len) : slot_len_(slot_len) { assert(slot_len > 0); }

void TimeSeries::drop_slots_before(std::int64_t slot) {
  slots_.erase(slots_.begin(), slots_.lower_bound(slot));
}

bool TimeSeries::any_in(TimeMs from, TimeMs to) const {
  if (from >= to) return false;
  // First slot whose interval ends after `from`.
  std::int64_t lo = slot_of(from, slot_len_);
  if (slot_end(lo, slot_len_) <= from) ++lo;
  auto it = slots_.lower_bound(lo);
  return it != slots_.end() && slot_start(*it, slot_len_) < to;
}

TimeSeries TimeSeries::resample(TimeMs target_slot_len) const {
  if (target_slot_len <= 0 ||
      (slot_len_ % target_slot_len != 0 && target_slot_len % slot_len_ != 0)) {
    throw std::invalid_argument("resample: slot lengths are not commensurate");
  }
  TimeSeries out(target_slot_len);
  if (target_slot_len == slot_len_) {
    out.slots_ = slots_;
  } else if (target_slot_len > slot_len_) {
    std::int64_t ratio = target_slot_len / slot_len_;
    for (std::int64_t s : slots_) out.slots_.insert(floor_div(s, ratio));
  } else {
    std::int64_t ratio = slot_len_ / target_slot_len;
    for (std::int64_t s : slots_) {
      for (std::int64_t k = 0; k < ratio; ++k) out.slots_.insert(s * ratio + k);
    }
  }
  return out;
}

SlotRun trim_empty_ends(const SlotRun& run) {
  std::size_t lo = 0;
  std::size_t hi = run.flags.size();
  while (lo < hi && !run.flags[lo]) ++lo;
  while (hi > lo && !run.flags[hi - 1]) --hi;
  SlotRun out;
  out.first_slot = run.first_slot + static_cast<std::int64_t>(lo);
  out.flags.assign(run.flags.begin() + static_cast<std::ptrdiff_t>(lo),
                   run.flags.begin() + static_cast<std::ptrdiff_t>(hi));
  return out;
}

std::size_t TransferDataset::slot_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.flags.size();
  return n;
}

TimeSeriesStore::TimeSeriesStore(TimeMs slot_len, TimeMs retention)
    : slot_len_(slot_len), retention_(retention) {
  assert(slot_len > 0 && retention > 0);
}

void TimeSeriesStore::record_occurrence(SeriesId id, TimeMs t) {
  assert(t >= 0);
  series_.try_emplace(id, slot_len_).first->second.flag_time(t);
}

void TimeSeriesStore::flag_slot(SeriesId id, std::int64_t slot) {
  series_.try_emplace(id, slot_len_).first->second.flag(slot);
}

void TimeSeriesStore::prune(TimeMs now) {
  // Keep slot k iff (k+1)*len >= now - retention.
  std::int64_t keep_from = ceil_div(now - retention_, slot_len_) - 1;
  for (auto it = series_.begin(); it != series_.end();) {
    it->second.drop_slots_before(keep_from);
    if (it->second.empty()) {
      it = series_.erase(it);
    } else {
      ++it;
    }
  }
}

void TimeSeriesStore::merge(const TransferDataset& dataset) {
  if (dataset.slot_len <= 0 ||
      (dataset.slot_len % slot_len_ != 0 && slot_len_ % dataset.slot_len != 0)) {
    throw std::invalid_argument("merge: dataset slot length is not commensurate with store");
  }
  for (const auto& entry : dataset.entries) {
    TimeSeries& dst = series_.try_emplace(entry.id, slot_len_).first->second;
    for (std::size_t i = 0; i < entry.flags.size(); ++i) {
      if (!entry.flags[i]) continue;
      std::int64_t s = entry.first_slot + static_cast<std::int64_t>(i);
      if (dataset.slot_len == slot_len_) {
        dst.flag(s);
      } else if (dataset.slot_len > slot_len_) {
        std::int64_t ratio = dataset.slot_len / slot_len_;
        for (std::int64_t k = 0; k < ratio; ++k) dst.flag(s * ratio + k);
      } else {
        dst.flag(floor_div(s, slot_len_ / dataset.slot_len));
      }
    }
  }
}

const TimeSeries* TimeSeriesStore::find(SeriesId id) const {
  auto it = series_.find(id);
  return it == series_.end() ? nullptr : &it->second;
}

std::size_t TimeSeriesStore::slot_count() const {
  std::size_t n = 0;
  for (const auto& [id, ts] : series_) n += ts.flagged_count();
  return n;
}

std::map<SeriesId, std::set<std::int64_t>> TimeSeriesStore::snapshot(TimeMs from,
                                                                     TimeMs to) const {
  std::map<SeriesId, std::set<std::int64_t>> out;
  for (const auto& [id, ts] : series_) {
    std::set<std::int64_t> keep;
    for (std::int64_t s : ts.slots()) {
      if (slot_end(s, slot_len_) > from && slot_start(s, slot_len_) < to) keep.insert(s);
    }
    if (!keep.empty()) out.emplace(id, std::move(keep));
  }
  return out;
}

void TimeSeriesStore::dump(std::ostream& os, std::int32_t node) const {
  char line[128];
  for (const auto& [id, ts] : series_) {
    for (std::int64_t s : ts.slots()) {
      std::snprintf(line, sizeof(line), "%d,%d,%d,%lld,%g\n", node, id.source, id.target,
                    static_cast<long long>(s), to_seconds(slot_len_));
      os << line;
    }
  }
}

}  // namespace hsim
