#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <sstream>

#include "doctest.h"
#include "edgesim/sched_parallel.hpp"
#include "support/fixtures.hpp"

using namespace edgesim;

namespace {

// Drives decode for every instruction of a block.
void decode_all(ParallelScheduler& s, const Block& b) {
  for (size_t i = 0; i < b.instructions.size(); ++i) {
    DecodedReady dr = decoded_ready_state(b.instructions[i]);
    s.decode(static_cast<int>(i), dr.drdys, dr.dbid, b.instructions[i].binput.slot);
  }
}

struct GoldenRow {
  uint8_t dbid;
  int drt, drf, dr0, dr1;
  int rt, rf, r0, r1, inh, rdy;
};

void check_rows(const ParallelScheduler& s, const std::vector<GoldenRow>& rows) {
  for (size_t i = 0; i < rows.size(); ++i) {
    CAPTURE(i);
    const auto& e = s.entry(static_cast<int>(i));
    const auto& g = rows[i];
    CHECK(e.dbid == g.dbid);
    CHECK(e.drt == bool(g.drt));
    CHECK(e.drf == bool(g.drf));
    CHECK(e.dr0 == bool(g.dr0));
    CHECK(e.dr1 == bool(g.dr1));
    CHECK(e.rt == bool(g.rt));
    CHECK(e.rf == bool(g.rf));
    CHECK(e.r0 == bool(g.r0));
    CHECK(e.r1 == bool(g.r1));
    CHECK(e.inh == bool(g.inh));
    CHECK(e.rdy == bool(g.rdy));
  }
}

}  // namespace

TEST_CASE("ready state table after issuing the left-operand read") {
  // Six decoded instructions; the read feeding operand #0 of the add has
  // issued. Golden 12-bit state for the first seven entries.
  Program p = testing::demo_table();
  ParallelScheduler s;
  s.reset();
  decode_all(s, p.blocks[0]);

  TargetedEvent ev{2, RdyVec(RdyVec::kR0), EventOrigin::IsForward};
  auto sel = s.step({&ev, 1}, std::nullopt, 0);

  check_rows(s, {
                    {0b00, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0},  // issued read
                    {0b00, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1},  // second read, ready
                    {0b00, 1, 1, 0, 0, 1, 1, 1, 0, 0, 0},  // add got operand #0
                    {0b00, 1, 1, 0, 1, 1, 1, 0, 1, 0, 0},  // test awaits operand #0
                    {0b01, 0, 1, 1, 1, 0, 1, 1, 1, 0, 0},  // branch on true
                    {0b01, 1, 0, 1, 1, 1, 0, 1, 1, 0, 0},  // branch on false
                    {0b00, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},  // undecoded
                });
  CHECK(sel == 1);  // the remaining read is the lowest ready entry
}

TEST_CASE("broadcast wakes exactly the matching listeners, in one step") {
  Program p = testing::demo_table();
  ParallelScheduler s;
  s.reset();
  decode_all(s, p.blocks[0]);
  s.step({}, std::nullopt, std::nullopt);  // settle decoded bits into actives

  BroadcastEvent bc{1, RdyVec(RdyVec::kRT), EventOrigin::Ex};
  s.step({}, bc, std::nullopt);

  CHECK(s.entry(4).rt);
  CHECK(s.entry(4).rdy);        // predicated-true branch is now ready
  CHECK(s.entry(5).rt);         // bit set, harmless
  CHECK_FALSE(s.entry(5).rdy);  // still awaits a false predicate, forever
  CHECK_FALSE(s.entry(2).r0);   // non-listeners see nothing
  CHECK_FALSE(s.entry(2).rdy);
}

TEST_CASE("zero-channel broadcast matches nothing") {
  Program p = testing::demo_table();
  ParallelScheduler s;
  s.reset();
  decode_all(s, p.blocks[0]);
  BroadcastEvent bc{0, RdyVec(RdyVec::kRT), EventOrigin::Ex};
  s.step({}, bc, std::nullopt);
  // entries with no channel (dbid 00) must not see the predicate bit
  CHECK_FALSE(s.entry(4).rt);  // listener needs channel 1, not 0
}

TEST_CASE("empty step leaves state unchanged") {
  Program p = testing::demo_table();
  ParallelScheduler s;
  s.reset();
  decode_all(s, p.blocks[0]);
  s.step({}, std::nullopt, std::nullopt);
  auto before = s.entry(2);
  auto sel1 = s.step({}, std::nullopt, std::nullopt);
  auto after = s.entry(2);
  CHECK(before.r0 == after.r0);
  CHECK(before.rdy == after.rdy);
  auto sel2 = s.step({}, std::nullopt, std::nullopt);
  CHECK(sel1 == sel2);
}

TEST_CASE("reset clears everything, refresh keeps decoded state") {
  Program p = testing::demo_table();
  ParallelScheduler s;
  s.reset();
  decode_all(s, p.blocks[0]);
  TargetedEvent ev{2, RdyVec(RdyVec::kR0), EventOrigin::IsForward};
  s.step({&ev, 1}, std::nullopt, 0);

  SUBCASE("refresh") {
    s.refresh();
    for (int i = 0; i < 6; ++i) {
      CAPTURE(i);
      CHECK(s.entry(i).drt == (i != 4));
      CHECK_FALSE(s.entry(i).rt);
      CHECK_FALSE(s.entry(i).inh);
      CHECK_FALSE(s.entry(i).rdy);
    }
    CHECK(s.entry(4).dbid == 1);

    // replay both read wakeups with no decode calls: add becomes ready again
    TargetedEvent e0{2, RdyVec(RdyVec::kR0), EventOrigin::IsForward};
    s.step({&e0, 1}, std::nullopt, std::nullopt);
    TargetedEvent e1{2, RdyVec(RdyVec::kR1), EventOrigin::IsForward};
    s.step({&e1, 1}, std::nullopt, std::nullopt);
    CHECK(s.entry(2).rdy);
  }

  SUBCASE("reset") {
    s.reset();
    for (int i = 0; i < 7; ++i) {
      CHECK_FALSE(s.entry(i).drt);
      CHECK_FALSE(s.entry(i).rt);
      CHECK_FALSE(s.entry(i).rdy);
    }
  }
}

TEST_CASE("ready formula invariant holds over random event streams") {
  std::mt19937_64 rng(5);
  Program p = testing::demo_table();
  for (int trial = 0; trial < 200; ++trial) {
    ParallelScheduler s;
    s.reset();
    decode_all(s, p.blocks[0]);
    for (int cyc = 0; cyc < 20; ++cyc) {
      std::vector<TargetedEvent> evs;
      int n = rng() % 3;
      bool pred = rng() & 1;
      for (int k = 0; k < n; ++k) {
        uint8_t bit = pred ? (rng() % 2 ? RdyVec::kRT : RdyVec::kRF)
                           : (rng() % 2 ? RdyVec::kR0 : RdyVec::kR1);
        evs.push_back({static_cast<uint8_t>(rng() % 8), RdyVec(bit),
                       EventOrigin::IsForward});
      }
      std::optional<int> issued;
      if (rng() % 3 == 0) issued = static_cast<int>(rng() % 8);
      s.step(evs, std::nullopt, issued);
      for (int i = 0; i < kWindowEntries; ++i) {
        const auto& e = s.entry(i);
        CHECK(e.rdy == (e.rt && e.rf && e.r0 && e.r1 && !e.inh));
      }
    }
  }
}

TEST_CASE("select lowest equals a linear scan") {
  auto naive = [](uint32_t mask) -> std::optional<int> {
    for (int i = 0; i < 32; ++i)
      if (mask & (1u << i)) return i;
    return std::nullopt;
  };

  CHECK(ParallelScheduler::select_lowest(0) == std::nullopt);
  CHECK(ParallelScheduler::select_lowest(1u << 17) == 17);
  CHECK(ParallelScheduler::select_lowest((1u << 3) | (1u << 4)) == 3);
  for (int i = 0; i < 32; ++i)
    CHECK(ParallelScheduler::select_lowest(1u << i) == i);

  std::mt19937_64 rng(42);
  for (int i = 0; i < 100000; ++i) {
    uint32_t mask = static_cast<uint32_t>(rng());
    CHECK(ParallelScheduler::select_lowest(mask) == naive(mask));
  }
}

TEST_CASE("dump renders a table row per entry") {
  Program p = testing::demo_table();
  ParallelScheduler s;
  s.reset();
  decode_all(s, p.blocks[0]);
  TargetedEvent ev{2, RdyVec(RdyVec::kR0), EventOrigin::IsForward};
  s.step({&ev, 1}, std::nullopt, 0);
  std::ostringstream os;
  s.dump(os);
  std::string text = os.str();
  CHECK(text.find("DBID") != std::string::npos);
  CHECK(text.find("INH") != std::string::npos);
}
