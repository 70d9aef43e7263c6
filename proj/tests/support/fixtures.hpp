#pragma once
//
// Shared demo programs. kDemoText is the canonical two-reads-feed-an-add
// block with a predicate broadcast to a branch pair; kDemoTableText is the
// same block with the reads swapped so the left-operand read is iid 0.
//

#include <string>

#include "edgesim/assembler.hpp"

namespace edgesim::testing {

inline constexpr const char* kDemoText = R"(
blk0:
    READ R0 T[2R]
    READ R7 T[2L]
    ADD T[3L]
    TLEI #5 B[1P]
    BRO.T B1 blk1
    BRO.F B1 blk2
blk1:
    BRO halt
blk2:
    BRO halt
)";

inline constexpr const char* kDemoTableText = R"(
blk0:
    READ R7 T[2L]
    READ R0 T[2R]
    ADD T[3L]
    TLEI #5 B[1P]
    BRO.T B1 blk1
    BRO.F B1 blk2
blk1:
    BRO halt
blk2:
    BRO halt
)";

inline constexpr const char* kLoopText = R"(
loop:
    READ R1 T[1L]
    ADDI #-1 T[2L]
    MOV T[3L] W[R1]
    TLEI #0 B[1P]
    BRO.T B1 halt
    BRO.F B1 loop
)";

// READ feeding a chain of k dependent single-cycle ops, result to R2.
inline std::string chain_text(int k) {
  std::string s = "chain:\n    READ R1 T[1L]\n";
  for (int i = 1; i <= k; ++i) {
    s += "    ADDI #1 ";
    s += i == k ? "W[R2]" : ("T[" + std::to_string(i + 1) + "L]");
    s += "\n";
  }
  s += "    BRO halt\n";
  return s;
}

// One data broadcast feeding k listener moves. With all_even the listeners
// sit at even iids only (odd slots padded with NOPs).
inline std::string broadcast_fanout_text(int k, bool all_even) {
  std::string s = "fan:\n    READ R1 B[1L]\n";
  int reg = 8;
  for (int i = 0; i < k; ++i) {
    if (all_even) s += "    NOP\n";
    s += "    MOV B1 W[R" + std::to_string(reg++) + "]\n";
  }
  s += "    BRO halt\n";
  return s;
}

// One move waking two same-parity consumers in a single cycle.
inline constexpr const char* kBankConflictText = R"(
conflict:
    READ R1 T[1L]
    MOV T[2L] T[4L]
    MOV W[R8]
    NOP
    MOV W[R9]
    BRO halt
)";

inline Program demo() { return assemble(kDemoText); }
inline Program demo_table() { return assemble(kDemoTableText); }

}  // namespace edgesim::testing
