#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "hsim/protocol.hpp"
#include "hsim/rng.hpp"
#include "hsim/timeseries.hpp"

using namespace hsim;

namespace {

ProtocolConfig fixture_cfg() {
  ProtocolConfig cfg;
  cfg.max_peers = 1;
  cfg.max_hop_distance = 1;
  cfg.cycle_period = 1000;
  cfg.aging_limit = 7000;
  cfg.transfer_slot_len = 1000;
  cfg.confirm_timeout = 60'000;
  return cfg;
}

// Store with five series against one peer whose watermarks cover the
// interesting cases: partially synced, synced long ago, fully synced,
// and never synced but aged out.
struct Fixture {
  TimeSeriesStore store{1000, 1'000'000};
  SyncAgent agent{0};
  ProtocolConfig cfg = fixture_cfg();
  NodeId peer = 9;

  Fixture() {
    store.flag_slot({1, 2}, 6);
    store.flag_slot({1, 2}, 8);
    store.flag_slot({1, 3}, 3);
    store.flag_slot({1, 3}, 5);
    store.flag_slot({1, 3}, 7);
    store.flag_slot({2, 4}, 3);
    store.flag_slot({2, 4}, 4);
    store.flag_slot({2, 5}, 4);
    store.flag_slot({2, 5}, 5);
    store.flag_slot({3, 6}, 2);

    // Establish watermarks through a real confirmed transfer.
    std::vector<int> hop_row{0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
    Rng rng(1);
    auto out = agent.run_cycle(store, hop_row, 0, cfg, rng);
    REQUIRE(out.size() == 1);
    Confirmation c;
    c.from = peer;
    c.to = 0;
    c.transfer_id = out[0].transfer_id;
    c.confirmed = {{{1, 2}, 5000}, {{1, 3}, 2000}, {{2, 4}, 2000}, {{2, 5}, 5000}};
    agent.on_confirm(c);
    REQUIRE(!agent.pending_with(peer));
  }
};

}  // namespace

TEST_CASE("wire sizes follow the serialization model") {
  WireModel w;
  TransferDataset d;
  d.slot_len = 1000;
  d.entries.push_back({{1, 2}, 0, {true}, 0});                    // 1 flag -> 1 byte
  d.entries.push_back({{1, 3}, 0, std::vector<bool>(9, true), 0});  // 9 flags -> 2 bytes
  CHECK(dataset_wire_bytes(d, w) == 64 + (8 + 8 + 4 + 1) + (8 + 8 + 4 + 2));
  CHECK(confirm_wire_bytes(w) == 64 + 24);
}

TEST_CASE("candidate_set filters by hop distance and excludes self") {
  std::vector<int> hop_row{0, 1, 2, kUnreachable, 1, 3};
  CHECK(candidate_set(0, hop_row, 1) == std::vector<NodeId>{1, 4});
  CHECK(candidate_set(0, hop_row, 2) == std::vector<NodeId>{1, 2, 4});
  CHECK(candidate_set(0, hop_row, 10) == std::vector<NodeId>{1, 2, 4, 5});
}

TEST_CASE("select_peers honors the limit and zero means everyone") {
  Rng rng(3);
  std::vector<NodeId> cands{2, 5, 7, 9};
  CHECK(select_peers(cands, 0, rng) == cands);
  CHECK(select_peers(cands, 10, rng) == cands);
  for (int i = 0; i < 50; ++i) {
    auto got = select_peers(cands, 2, rng);
    CHECK(got.size() == 2);
    std::set<NodeId> uniq(got.begin(), got.end());
    CHECK(uniq.size() == 2);
    for (NodeId v : got) CHECK(std::set<NodeId>(cands.begin(), cands.end()).count(v) == 1);
  }
}

TEST_CASE("build_dataset applies watermark aging and trimming") {
  Fixture f;
  TimeMs now = 10'000;
  TransferDataset d = f.agent.build_dataset(f.store, f.peer, now, f.cfg);

  REQUIRE(d.entries.size() == 3);
  CHECK(d.slot_len == 1000);

  // (1,2): watermark 5000 admits slots 6 and 8; run trimmed to [6,8].
  CHECK(d.entries[0].id == SeriesId{1, 2});
  CHECK(d.entries[0].first_slot == 6);
  CHECK(d.entries[0].flags == std::vector<bool>{true, false, true});
  CHECK(d.entries[0].newest_slot_time == 8000);

  // (1,3): watermark 2000 and aging floor 3000 coincide at slot 3.
  CHECK(d.entries[1].id == SeriesId{1, 3});
  CHECK(d.entries[1].first_slot == 3);
  CHECK(d.entries[1].flags == std::vector<bool>{true, false, true, false, true});
  CHECK(d.entries[1].newest_slot_time == 7000);

  // (2,4): everything after the watermark qualifies.
  CHECK(d.entries[2].id == SeriesId{2, 4});
  CHECK(d.entries[2].first_slot == 3);
  CHECK(d.entries[2].flags == std::vector<bool>{true, true});
  CHECK(d.entries[2].newest_slot_time == 4000);

  // (2,5) is fully confirmed and (3,6) aged out: both omitted.
  CHECK(d.slot_count() == 10);
  CHECK(dataset_wire_bytes(d, f.cfg.wire) == 64 + 3 * (8 + 8 + 4) + 3);
}

TEST_CASE("slot exactly at the aging boundary is included, older excluded") {
  TimeSeriesStore store(1000, 1'000'000);
  store.flag_slot({1, 2}, 3);  // starts exactly at now - T
  store.flag_slot({1, 2}, 2);  // 1s older
  SyncAgent agent(0);
  auto cfg = fixture_cfg();
  TransferDataset d = agent.build_dataset(store, 9, 10'000, cfg);
  REQUIRE(d.entries.size() == 1);
  CHECK(d.entries[0].first_slot == 3);
  CHECK(d.entries[0].flags == std::vector<bool>{true});
}

TEST_CASE("build_dataset aggregates a finer store into transfer slots") {
  TimeSeriesStore store(100, 1'000'000);
  for (std::int64_t s = 40; s < 50; ++s) store.flag_slot({1, 2}, s);
  SyncAgent agent(0);
  auto cfg = fixture_cfg();  // transfer slots of 1s
  TransferDataset d = agent.build_dataset(store, 9, 5000, cfg);
  REQUIRE(d.entries.size() == 1);
  CHECK(d.entries[0].first_slot == 4);
  CHECK(d.entries[0].flags == std::vector<bool>{true});
  CHECK(d.entries[0].newest_slot_time == 4000);
}

TEST_CASE("build_dataset splits a coarser store into transfer slots") {
  TimeSeriesStore store(1000, 1'000'000);
  store.flag_slot({1, 2}, 4);
  SyncAgent agent(0);
  auto cfg = fixture_cfg();
  cfg.transfer_slot_len = 100;
  TransferDataset d = agent.build_dataset(store, 9, 5000, cfg);
  REQUIRE(d.entries.size() == 1);
  CHECK(d.entries[0].first_slot == 40);
  CHECK(d.entries[0].flags == std::vector<bool>(10, true));
  CHECK(d.entries[0].newest_slot_time == 4900);
}

TEST_CASE("pending peers are skipped until confirm or timeout") {
  Fixture f;
  f.store.flag_slot({7, 7}, 9);
  std::vector<int> hop_row{0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
  Rng rng(2);

  auto first = f.agent.run_cycle(f.store, hop_row, 10'000, f.cfg, rng);
  REQUIRE(first.size() == 1);
  CHECK(f.agent.pending_with(f.peer));

  // Peer still pending: nothing goes out even though data remains.
  CHECK(f.agent.run_cycle(f.store, hop_row, 11'000, f.cfg, rng).empty());

  // Timeout with a stale id changes nothing.
  f.agent.on_timeout(f.peer, first[0].transfer_id + 100);
  CHECK(f.agent.pending_with(f.peer));

  f.agent.on_timeout(f.peer, first[0].transfer_id);
  CHECK(!f.agent.pending_with(f.peer));

  // A confirmation arriving after the timeout is ignored: watermarks
  // stay put and the same slots ship again.
  Confirmation late;
  late.from = f.peer;
  late.to = 0;
  late.transfer_id = first[0].transfer_id;
  late.confirmed = {{{7, 7}, 9000}};
  f.agent.on_confirm(late);
  CHECK(f.agent.watermark(f.peer, {7, 7}) == kNeverMs);

  auto retry = f.agent.run_cycle(f.store, hop_row, 12'000, f.cfg, rng);
  REQUIRE(retry.size() == 1);
  bool found = false;
  for (const auto& e : retry[0].dataset.entries) {
    if (e.id == SeriesId{7, 7}) found = true;
  }
  CHECK(found);
  CHECK(retry[0].transfer_id != first[0].transfer_id);
}

TEST_CASE("confirmed slots never ship to the same peer again") {
  Fixture f;
  std::vector<int> hop_row{0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
  Rng rng(4);
  auto out = f.agent.run_cycle(f.store, hop_row, 10'000, f.cfg, rng);
  REQUIRE(out.size() == 1);
  TimeSeriesStore sink(1000, 1'000'000);
  SyncAgent receiver(f.peer);
  Confirmation c = receiver.accept_dataset(sink, 0, out[0].dataset, out[0].transfer_id);
  f.agent.on_confirm(c);

  // No new data: the next build is empty for this peer.
  CHECK(f.agent.build_dataset(f.store, f.peer, 11'000, f.cfg).empty());

  // New occurrence in slot 10 ships alone.
  f.store.flag_slot({1, 2}, 10);
  TransferDataset d = f.agent.build_dataset(f.store, f.peer, 11'000, f.cfg);
  REQUIRE(d.entries.size() == 1);
  CHECK(d.entries[0].id == SeriesId{1, 2});
  CHECK(d.entries[0].first_slot == 10);
  CHECK(d.entries[0].flags == std::vector<bool>{true});
}

TEST_CASE("empty dataset produces no message and no pending state") {
  TimeSeriesStore store(1000, 1'000'000);
  SyncAgent agent(0);
  std::vector<int> hop_row{0, 1};
  Rng rng(5);
  CHECK(agent.run_cycle(store, hop_row, 1000, fixture_cfg(), rng).empty());
  CHECK(!agent.pending_with(1));
}

TEST_CASE("accept_dataset merges and echoes per series newest timestamps") {
  TimeSeriesStore store(100, 1'000'000);
  SyncAgent agent(3);
  TransferDataset d;
  d.slot_len = 1000;
  d.entries.push_back({{1, 2}, 4, {true, false, true}, 6000});
  d.entries.push_back({{2, 3}, 7, {true}, 7000});
  Confirmation c = agent.accept_dataset(store, 0, d, 42);
  CHECK(c.from == 3);
  CHECK(c.to == 0);
  CHECK(c.transfer_id == 42);
  REQUIRE(c.confirmed.size() == 2);
  CHECK(c.confirmed[0] == std::pair<SeriesId, TimeMs>{{1, 2}, 6000});
  CHECK(c.confirmed[1] == std::pair<SeriesId, TimeMs>{{2, 3}, 7000});
  // 1s dataset slots 4 and 6 split into 100ms store slots 40..49, 60..69.
  auto snap = store.snapshot(0, 100'000);
  CHECK(snap[{1, 2}].size() == 20);
  CHECK(snap[{1, 2}].count(40) == 1);
  CHECK(snap[{1, 2}].count(50) == 0);
  CHECK(snap[{1, 2}].count(69) == 1);
}

namespace {

// Records sent datasets and verifies, on every accepted confirmation,
// that confirmed transfers stay disjoint per series with strictly
// increasing newest timestamps.
class DisjointnessAudit : public SyncObserver {
 public:
  void dataset_sent(NodeId src, NodeId dst, std::uint64_t id, TimeMs,
                    const TransferDataset& d) override {
    in_flight_[{src, dst, id}] = d;
  }
  void transfer_confirmed(NodeId src, NodeId dst, std::uint64_t id) override {
    auto it = in_flight_.find({src, dst, id});
    REQUIRE(it != in_flight_.end());
    for (const auto& e : it->second.entries) {
      auto& seen = confirmed_slots_[{src, dst, e.id}];
      for (std::size_t i = 0; i < e.flags.size(); ++i) {
        if (!e.flags[i]) continue;
        std::int64_t s = e.first_slot + static_cast<std::int64_t>(i);
        CHECK(seen.insert(s).second);  // never confirmed twice
      }
      auto [np, first_time] = newest_confirmed_.try_emplace({src, dst, e.id}, kNeverMs);
      (void)first_time;
      CHECK(e.newest_slot_time > np->second);
      np->second = e.newest_slot_time;
    }
    ++confirmed_count_;
  }
  int confirmed_count() const { return confirmed_count_; }

 private:
  std::map<std::tuple<NodeId, NodeId, std::uint64_t>, TransferDataset> in_flight_;
  std::map<std::tuple<NodeId, NodeId, SeriesId>, std::set<std::int64_t>> confirmed_slots_;
  std::map<std::tuple<NodeId, NodeId, SeriesId>, TimeMs> newest_confirmed_;
  int confirmed_count_ = 0;
};

}  // namespace

TEST_CASE("lossy cycles keep confirmed transfers disjoint per series") {
  ProtocolConfig cfg = fixture_cfg();
  cfg.aging_limit = 50'000;
  TimeSeriesStore src_store(1000, 1'000'000);
  TimeSeriesStore dst_store(1000, 1'000'000);
  SyncAgent sender(0);
  SyncAgent receiver(1);
  DisjointnessAudit audit;
  sender.set_observer(&audit);
  std::vector<int> hop_row{0, 1};
  Rng rng(2026);

  for (int cycle = 0; cycle < 300; ++cycle) {
    TimeMs now = cycle * cfg.cycle_period;
    // Fresh observations trickle in on a few series.
    src_store.record_occurrence({1, static_cast<EntityId>(2 + cycle % 3)}, now);
    auto out = sender.run_cycle(src_store, hop_row, now, cfg, rng);
    for (const auto& tr : out) {
      if (rng.chance(0.7)) {  // dataset survives the air
        Confirmation c = receiver.accept_dataset(dst_store, 0, tr.dataset, tr.transfer_id);
        if (rng.chance(0.7)) {  // confirmation survives
          sender.on_confirm(c);
          continue;
        }
      }
      sender.on_timeout(tr.to, tr.transfer_id);
    }
  }
  CHECK(audit.confirmed_count() > 50);
  // Everything confirmed is actually present at the receiver.
  for (const auto& [id, slots] : dst_store.all()) {
    CHECK(!slots.empty());
  }
}

TEST_CASE("a static line of agents converges to the union of all stores") {
  const int n = 4;
  ProtocolConfig cfg = fixture_cfg();
  cfg.aging_limit = 10'000'000;
  std::vector<TimeSeriesStore> stores(n, TimeSeriesStore(1000, 1'000'000));
  std::vector<SyncAgent> agents;
  for (int i = 0; i < n; ++i) agents.emplace_back(i);

  // Distinct data at every node.
  std::map<SeriesId, std::set<std::int64_t>> expected;
  Rng data_rng(8);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 6; ++k) {
      SeriesId id{static_cast<EntityId>(i), static_cast<EntityId>(10 + k)};
      std::int64_t slot = data_rng.uniform_int(0, 30);
      stores[i].flag_slot(id, slot);
      expected[id].insert(slot);
    }
  }

  // Line adjacency 0-1-2-3, lossless instant delivery.
  auto hop_row_for = [&](int i) {
    std::vector<int> row(n);
    for (int j = 0; j < n; ++j) row[j] = std::abs(i - j);
    return row;
  };
  Rng rng(99);
  for (int cycle = 0; cycle < 60; ++cycle) {
    TimeMs now = cycle * cfg.cycle_period;
    for (int i = 0; i < n; ++i) {
      for (const auto& tr : agents[i].run_cycle(stores[i], hop_row_for(i), now, cfg, rng)) {
        Confirmation c =
            agents[tr.to].accept_dataset(stores[tr.to], i, tr.dataset, tr.transfer_id);
        agents[i].on_confirm(c);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    CHECK(stores[i].snapshot(kNeverMs, 10'000'000) == expected);
  }
}
