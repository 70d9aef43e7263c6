#pragma once
//
// Functional dataflow interpreter: executes a block to fixpoint with no
// notion of cycles. Ground truth for both timed engines.
//

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "edgesim/isa.hpp"

namespace edgesim {

struct ArchState {
  std::array<uint32_t, 32> regs{};
  std::map<uint32_t, uint32_t> mem;  // word-aligned byte address -> word

  bool operator==(const ArchState&) const = default;
};

struct BlockResult {
  std::vector<std::pair<uint8_t, uint32_t>> regwrites;  // sorted by register
  std::vector<std::pair<uint32_t, uint32_t>> stores;    // (addr, value), lsid order
  std::string exit;
  std::vector<uint8_t> fired;  // sorted iids that issued

  bool operator==(const BlockResult&) const = default;
};

struct ExecError : Error {
  enum class Kind {
    Deadlock,
    DoubleFire,
    DoubleDelivery,
    UnalignedAddress,
    UnknownLabel,
    BlockLimitExceeded,
    CycleLimitExceeded,
  };
  Kind kind;
  ExecError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
};

// Evaluates the block's dataflow graph against the entry state. Registers
// read the entry snapshot; loads see earlier same-block stores. The result
// is independent of firing order; order_seed shuffles the internal worklist
// to exercise that.
BlockResult interpret_block(const Block& block, const ArchState& state,
                            uint64_t order_seed = 0);

// Applies a block's writes atomically.
void commit(const BlockResult& result, ArchState& state);

struct RunResult {
  ArchState state;
  std::vector<std::string> exits;  // one label per executed block
};

// Interpret blocks from `start`, committing between blocks, until the halt
// label or max_blocks block executions. max_blocks == 0 returns the initial
// state untouched.
RunResult run_program(const Program& program, ArchState state,
                      const std::string& start, uint64_t max_blocks,
                      uint64_t order_seed = 0);

}  // namespace edgesim
