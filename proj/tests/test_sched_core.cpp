#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "edgesim/sched_core.hpp"

using namespace edgesim;

TEST_CASE("ready merge accumulates decoded, active, and event bits") {
  // decoded-only entry picking up its first operand
  auto r = merge_ready(true, RdyVec(0b1100), false, RdyVec(), RdyVec(0b0001));
  CHECK(r.ardys_next == RdyVec(0b1101));
  CHECK_FALSE(r.ready);

  // second operand completes it
  r = merge_ready(true, RdyVec(0b1100), true, RdyVec(0b1101), RdyVec(0b0010));
  CHECK(r.ardys_next == RdyVec(0b1111));
  CHECK(r.ready);

  // nothing valid, no event
  r = merge_ready(false, RdyVec(), false, RdyVec(), RdyVec());
  CHECK(r.ardys_next == RdyVec(0b0000));
  CHECK_FALSE(r.ready);

  // event to an undecoded entry contributes only the event bits
  r = merge_ready(false, RdyVec(0b1100), false, RdyVec(), RdyVec(0b0010));
  CHECK(r.ardys_next == RdyVec(0b0010));
  CHECK_FALSE(r.ready);
}

TEST_CASE("ready merge is monotone and idempotent") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    bool dv = rng() & 1;
    RdyVec drdys(static_cast<uint8_t>(rng()));
    RdyVec ardys;
    bool av = false;
    bool ever_ready = false;
    for (int step = 0; step < 8; ++step) {
      RdyVec evt(static_cast<uint8_t>(1 << (rng() % 4)));
      if (rng() % 3 == 0) evt = RdyVec();
      auto r = merge_ready(dv, drdys, av, ardys, evt);
      // set bits never clear
      CHECK((r.ardys_next.bits() & ardys.bits()) == (av ? ardys.bits() : 0));
      if (ever_ready) CHECK(r.ready);  // ready is sticky under merging
      // no event, no change
      auto again = merge_ready(dv, drdys, true, r.ardys_next, RdyVec());
      CHECK(again.ardys_next == r.ardys_next);
      ardys = r.ardys_next;
      av = true;
      ever_ready = r.ready;
    }
  }
}

TEST_CASE("ready vector rendering and slot masks") {
  CHECK(RdyVec(0b1101).str() == "1101");
  CHECK(RdyVec().str() == "0000");
  CHECK(RdyVec::for_slot(Slot::Op0) == RdyVec(RdyVec::kR0));
  CHECK(RdyVec::for_slot(Slot::Op1) == RdyVec(RdyVec::kR1));
  CHECK(RdyVec::for_slot(Slot::Predicate, true) == RdyVec(RdyVec::kRT));
  CHECK(RdyVec::for_slot(Slot::Predicate, false) == RdyVec(RdyVec::kRF));
  CHECK(RdyVec(RdyVec::kRT).delivers_predicate());
  CHECK(RdyVec(RdyVec::kR1).delivers_operand());
  CHECK_FALSE(RdyVec(0b1010).one_hot());
}
