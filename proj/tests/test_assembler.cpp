#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "edgesim/assembler.hpp"
#include "edgesim/blockgen.hpp"
#include "support/fixtures.hpp"

using namespace edgesim;

TEST_CASE("demo block assembles to the expected structure") {
  Program p = testing::demo();
  REQUIRE(p.blocks.size() == 3);
  const Block& b = p.blocks[0];
  REQUIRE(b.instructions.size() == 6);

  CHECK(b.instructions[0].opcode == Opcode::Read);
  CHECK(b.instructions[0].reg == 0);
  CHECK(b.instructions[0].targets[0] == Target{TargetKind::Op1, 2});

  CHECK(b.instructions[1].targets[0] == Target{TargetKind::Op0, 2});

  CHECK(b.instructions[2].opcode == Opcode::Add);
  CHECK(b.instructions[2].targets[0] == Target{TargetKind::Op0, 3});

  const Instruction& tlei = b.instructions[3];
  CHECK(tlei.opcode == Opcode::Tlei);
  CHECK(tlei.imm == 5);
  CHECK(tlei.bid == 1);

  const Instruction& brot = b.instructions[4];
  CHECK(brot.pred == Pred::True);
  CHECK(brot.binput.channel == 1);
  CHECK(brot.binput.slot == Slot::Predicate);
  CHECK(b.exits[brot.exit_index] == "blk1");

  const Instruction& brof = b.instructions[5];
  CHECK(brof.pred == Pred::False);
  CHECK(b.exits[brof.exit_index] == "blk2");

  // decoded ready vectors line up with the per-instruction shape
  CHECK(decoded_ready_state(b.instructions[0]).drdys == RdyVec(0b1111));
  CHECK(decoded_ready_state(b.instructions[1]).drdys == RdyVec(0b1111));
  CHECK(decoded_ready_state(b.instructions[2]).drdys == RdyVec(0b1100));
  CHECK(decoded_ready_state(b.instructions[3]).drdys == RdyVec(0b1101));
  CHECK(decoded_ready_state(b.instructions[4]).drdys == RdyVec(0b0111));
  CHECK(decoded_ready_state(b.instructions[4]).dbid == 1);
  CHECK(decoded_ready_state(b.instructions[5]).drdys == RdyVec(0b1011));
}

TEST_CASE("assembler error reporting") {
  CHECK_THROWS_AS(assemble("blk:\n"), AsmError);  // empty block

  try {
    assemble("blk:\n    ADD T[9L]\n    BRO halt\n");
    FAIL("expected range error");
  } catch (const AsmError& e) {
    CHECK(e.kind == AsmError::Kind::TargetOutOfRange);
    CHECK(e.line == 2);
  }

  // 33 instructions in one block
  std::string big = "big:\n";
  for (int i = 0; i < 32; ++i) big += "    NOP\n";
  big += "    BRO halt\n";
  try {
    assemble(big);
    FAIL("expected size error");
  } catch (const AsmError& e) {
    CHECK(e.kind == AsmError::Kind::BlockTooLarge);
  }

  try {
    assemble("blk:\n    BRO nowhere\n");
    FAIL("expected dangling label");
  } catch (const AsmError& e) {
    CHECK(e.kind == AsmError::Kind::DanglingLabel);
  }

  // slot both broadcast-fed and explicitly targeted
  try {
    assemble(
        "blk:\n"
        "    READ R0 B[1L]\n"
        "    READ R1 T[2L]\n"
        "    MOV B1 W[R3]\n"
        "    BRO halt\n");
    FAIL("expected slot conflict");
  } catch (const AsmError& e) {
    CHECK(e.kind == AsmError::Kind::SlotConflict);
  }

  // listener with no sender on the channel
  CHECK_THROWS_AS(assemble("blk:\n    MOV B2 W[R1]\n    BRO halt\n"), AsmError);

  CHECK_THROWS_AS(assemble("    NOP\n"), AsmError);           // before any label
  CHECK_THROWS_AS(assemble("halt:\n    NOP\n"), AsmError);    // reserved label
  CHECK_THROWS_AS(assemble("b:\n    FROB\n    BRO halt\n"), AsmError);
}

TEST_CASE("disassembly renders the canonical notation") {
  Program p = testing::demo();
  std::string text = disassemble(p);
  CHECK(text.find("TLEI #5 B[1P]") != std::string::npos);
  CHECK(text.find("READ R0 T[2R]") != std::string::npos);
  CHECK(text.find("BRO.T B1 blk1") != std::string::npos);

  Program nopp = assemble("solo:\n    BRO halt\n");
  CHECK(disassemble(nopp) == "solo:\n    BRO halt\n");
}

TEST_CASE("assemble/disassemble round-trip on the demo") {
  Program p = testing::demo();
  CHECK(assemble(disassemble(p)) == p);
  Program t = testing::demo_table();
  CHECK(assemble(disassemble(t)) == t);
  Program loop = assemble(testing::kLoopText);
  CHECK(assemble(disassemble(loop)) == loop);
}

TEST_CASE("assemble/disassemble round-trip on random blocks") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 500; ++i) {
    Program p;
    p.blocks.push_back(generate_block(rng));
    Program back = assemble(disassemble(p));
    REQUIRE(back == p);
  }
}

TEST_CASE("memory order ids are dense in block order") {
  std::mt19937_64 rng(78);
  for (int i = 0; i < 200; ++i) {
    Block b = generate_block(rng);
    int expect = 0;
    for (const auto& insn : b.instructions) {
      if (is_memory(insn.opcode))
        CHECK(insn.lsid == expect++);
      else
        CHECK(insn.lsid == -1);
    }
  }
}
