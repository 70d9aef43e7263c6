#include "edgesim/refinterp.hpp"

#include <algorithm>
#include <optional>
#include <random>

namespace edgesim {

namespace {

using EK = ExecError::Kind;

struct InsnState {
  std::optional<uint32_t> op[2];
  std::optional<bool> pred;  // delivered predicate value
  bool fired = false;
};

struct Eval {
  const Block& block;
  const ArchState& entry;
  std::vector<InsnState> st;
  std::vector<std::pair<uint32_t, uint32_t>> stores;
  std::map<uint8_t, uint32_t> regwrites;
  std::vector<std::string> exits_taken;
  int next_lsid = 0;
  int total_memory = 0;
  std::mt19937_64 rng;
  bool shuffle;

  Eval(const Block& b, const ArchState& s, uint64_t seed)
      : block(b), entry(s), st(b.instructions.size()), rng(seed), shuffle(seed != 0) {
    for (const auto& i : b.instructions)
      if (is_memory(i.opcode)) ++total_memory;
  }

  const Instruction& insn(int i) const { return block.instructions[i]; }

  // An instruction may fire once its awaited inputs are delivered and, if
  // predicated, the delivered predicate matches. Memory additionally waits
  // for its turn in lsid order.
  bool ready(int i) const {
    const Instruction& in = insn(i);
    if (st[i].fired) return false;
    int n = operand_count(in.opcode);
    for (int s = 0; s < n; ++s)
      if (!st[i].op[s]) return false;
    if (in.pred != Pred::None) {
      if (!st[i].pred) return false;
      if (*st[i].pred != (in.pred == Pred::True)) return false;  // never fires
    }
    if (is_memory(in.opcode) && in.lsid != next_lsid) return false;
    return true;
  }

  void deliver_operand(int iid, Slot s, uint32_t value) {
    auto& slot = st[iid].op[static_cast<int>(s)];
    if (slot) throw ExecError(EK::DoubleDelivery, "operand delivered twice");
    slot = value;
  }

  void deliver_pred(int iid, bool value) {
    if (st[iid].pred) throw ExecError(EK::DoubleDelivery, "predicate delivered twice");
    st[iid].pred = value;
  }

  uint32_t mem_read(uint32_t addr) {
    if (addr % 4) throw ExecError(EK::UnalignedAddress, "unaligned load");
    // store-to-load forwarding within the block, latest earlier store wins
    for (auto it = stores.rbegin(); it != stores.rend(); ++it)
      if (it->first == addr) return it->second;
    auto it = entry.mem.find(addr);
    return it == entry.mem.end() ? 0 : it->second;
  }

  void fire(int i) {
    const Instruction& in = insn(i);
    st[i].fired = true;

    std::optional<uint32_t> value;
    std::optional<bool> predicate;
    uint32_t a = st[i].op[0].value_or(0);
    uint32_t b = st[i].op[1].value_or(0);
    int32_t imm = in.imm;

    switch (in.opcode) {
      case Opcode::Nop: break;
      case Opcode::Read: value = entry.regs[in.reg]; break;
      case Opcode::Mov: value = a; break;
      case Opcode::Add: value = a + b; break;
      case Opcode::Sub: value = a - b; break;
      case Opcode::And: value = a & b; break;
      case Opcode::Or: value = a | b; break;
      case Opcode::Xor: value = a ^ b; break;
      case Opcode::Addi: value = a + static_cast<uint32_t>(imm); break;
      case Opcode::Tlei: predicate = static_cast<int32_t>(a) <= imm; break;
      case Opcode::Tlt:
        predicate = static_cast<int32_t>(a) < static_cast<int32_t>(b);
        break;
      case Opcode::Teq: predicate = a == b; break;
      case Opcode::Bro: exits_taken.push_back(block.exits[in.exit_index]); break;
      case Opcode::Ld: {
        uint32_t addr = a + static_cast<uint32_t>(imm);
        value = mem_read(addr);
        ++next_lsid;
        break;
      }
      case Opcode::St: {
        uint32_t addr = a + static_cast<uint32_t>(imm);
        if (addr % 4) throw ExecError(EK::UnalignedAddress, "unaligned store");
        stores.emplace_back(addr, b);
        ++next_lsid;
        break;
      }
    }

    for (const Target& t : in.targets) {
      switch (t.kind) {
        case TargetKind::None: break;
        case TargetKind::Op0: deliver_operand(t.index, Slot::Op0, *value); break;
        case TargetKind::Op1: deliver_operand(t.index, Slot::Op1, *value); break;
        case TargetKind::PredTrue:
        case TargetKind::PredFalse: deliver_pred(t.index, *predicate); break;
        case TargetKind::Reg: {
          auto [it, inserted] = regwrites.emplace(t.index, *value);
          if (!inserted)
            throw ExecError(EK::DoubleDelivery,
                            "register " + std::to_string(t.index) + " written twice");
          break;
        }
      }
    }

    if (in.bid != 0) {
      for (size_t l = 0; l < block.instructions.size(); ++l) {
        const Instruction& listener = block.instructions[l];
        if (listener.binput.channel != in.bid) continue;
        if (listener.binput.slot == Slot::Predicate)
          deliver_pred(static_cast<int>(l), *predicate);
        else
          deliver_operand(static_cast<int>(l), listener.binput.slot, *value);
      }
    }
  }

  BlockResult run() {
    std::vector<int> candidates;
    for (;;) {
      candidates.clear();
      for (size_t i = 0; i < st.size(); ++i)
        if (ready(static_cast<int>(i))) candidates.push_back(static_cast<int>(i));
      if (candidates.empty()) break;
      int pick = 0;
      if (shuffle && candidates.size() > 1)
        pick = static_cast<int>(rng() % candidates.size());
      fire(candidates[pick]);
    }

    if (exits_taken.empty())
      throw ExecError(EK::Deadlock, "no branch fired in block '" + block.name + "'");
    if (exits_taken.size() > 1)
      throw ExecError(EK::DoubleFire,
                      "two branches fired in block '" + block.name + "'");
    if (next_lsid != total_memory)
      throw ExecError(EK::Deadlock,
                      "memory never became ready in block '" + block.name + "'");

    BlockResult result;
    result.exit = exits_taken[0];
    result.stores = std::move(stores);
    for (auto [r, v] : regwrites) result.regwrites.emplace_back(r, v);
    for (size_t i = 0; i < st.size(); ++i)
      if (st[i].fired) result.fired.push_back(static_cast<uint8_t>(i));
    return result;
  }
};

}  // namespace

BlockResult interpret_block(const Block& block, const ArchState& state,
                            uint64_t order_seed) {
  Eval eval(block, state, order_seed);
  return eval.run();
}

void commit(const BlockResult& result, ArchState& state) {
  for (auto [r, v] : result.regwrites) state.regs[r] = v;
  for (auto [a, v] : result.stores) state.mem[a] = v;
}

RunResult run_program(const Program& program, ArchState state,
                      const std::string& start, uint64_t max_blocks,
                      uint64_t order_seed) {
  RunResult out;
  if (max_blocks == 0) {
    out.state = std::move(state);
    return out;
  }
  const Block* block = program.find(start);
  if (!block)
    throw ExecError(EK::UnknownLabel, "unknown start label '" + start + "'");

  for (uint64_t executed = 0;; ++executed) {
    if (executed == max_blocks)
      throw ExecError(EK::BlockLimitExceeded,
                      "block limit " + std::to_string(max_blocks) + " reached");
    BlockResult r = interpret_block(*block, state, order_seed);
    commit(r, state);
    out.exits.push_back(r.exit);
    if (r.exit == kHaltLabel) break;
    block = program.find(r.exit);
    if (!block) throw ExecError(EK::UnknownLabel, "unknown label '" + r.exit + "'");
  }
  out.state = std::move(state);
  return out;
}

}  // namespace edgesim
