#include "edgesim/blockgen.hpp"

#include <algorithm>
#include <cassert>

namespace edgesim {

namespace {

struct Producer {
  int iid;
  int free_targets;
  bool aligned;  // value is a word-aligned address
};

int pick(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % (hi - lo + 1));
}

bool coin(std::mt19937_64& rng) { return rng() & 1; }

}  // namespace

ArchState generate_state(std::mt19937_64& rng) {
  ArchState st;
  for (int r = 0; r < 32; ++r) st.regs[r] = static_cast<uint32_t>(rng());
  for (int r = 0; r < kAlignedRegCount; ++r)
    st.regs[kAlignedRegBase + r] = 0x1000 + 4 * (rng() % 32);
  for (int i = 0; i < 16; ++i)
    st.mem[0x1000 + 4 * (rng() % 64)] = static_cast<uint32_t>(rng());
  return st;
}

namespace {

class BlockBuilder {
 public:
  BlockBuilder(std::mt19937_64& rng, const GenOptions& opt) : rng_(rng), opt_(opt) {}

  Block build() {
    int n = pick(rng_, opt_.min_insns, opt_.max_insns);

    enum class Tail { Plain, Pair, Leaves };
    Tail tail = Tail::Plain;
    // worst-case tail cost including reads inserted to feed the test/leaf
    int tail_reserve = 1;
    if (opt_.predication && n >= 6 && coin(rng_)) {
      if (opt_.broadcasts && coin(rng_)) {
        tail = Tail::Pair;
        tail_reserve = 5;  // 2 feed reads + test + two BROs
      } else {
        tail = Tail::Leaves;
        tail_reserve = 5;  // 2 feed reads + test + leaf + BRO
      }
    }
    int body_budget = std::max(tail == Tail::Plain ? 0 : 1, n - tail_reserve);

    block_.name = "b0";
    block_.exits = {kHaltLabel};

    if (opt_.broadcasts && body_budget >= 3 && coin(rng_)) {
      data_channel_ = 1;
      data_slot_ = coin(rng_) ? Slot::Op0 : Slot::Op1;
    }

    build_body(body_budget);
    build_tail(tail == Tail::Plain ? 0 : tail == Tail::Pair ? 1 : 2);

    assign_lsids(block_);
    validate_block(block_);
    return std::move(block_);
  }

 private:
  int add(const Instruction& insn) {
    block_.instructions.push_back(insn);
    return static_cast<int>(block_.instructions.size()) - 1;
  }

  int count() const { return static_cast<int>(block_.instructions.size()); }

  void register_producer(int iid, bool aligned) {
    int cap = compact_form(block_.instructions[iid].opcode) ? 1 : 2;
    producers_.push_back({iid, cap, aligned});
  }

  int candidates(bool aligned_only) const {
    int c = 0;
    for (const auto& p : producers_)
      if (p.free_targets > 0 && (!aligned_only || p.aligned)) ++c;
    return c;
  }

  // Routes one producer output into (consumer, slot).
  void wire(int consumer, Slot slot, bool aligned_only) {
    std::vector<int> cands;
    for (size_t i = 0; i < producers_.size(); ++i)
      if (producers_[i].free_targets > 0 && (!aligned_only || producers_[i].aligned))
        cands.push_back(static_cast<int>(i));
    assert(!cands.empty());
    Producer& p = producers_[cands[rng_() % cands.size()]];
    Instruction& insn = block_.instructions[p.iid];
    TargetKind k = slot == Slot::Op0 ? TargetKind::Op0 : TargetKind::Op1;
    for (auto& t : insn.targets) {
      if (t.kind == TargetKind::None) {
        t = {k, static_cast<uint8_t>(consumer)};
        --p.free_targets;
        return;
      }
    }
    assert(false && "wire on a full producer");
  }

  int add_read(bool aligned) {
    Instruction insn;
    insn.opcode = Opcode::Read;
    insn.reg = aligned
                   ? static_cast<uint8_t>(kAlignedRegBase + rng_() % kAlignedRegCount)
                   : static_cast<uint8_t>(rng_() % 8);
    int iid = add(insn);
    register_producer(iid, aligned);
    return iid;
  }

  void ensure_candidates(int want, bool aligned_only) {
    while (candidates(aligned_only) < want) add_read(aligned_only || coin(rng_));
  }

  void build_body(int budget) {
    int reads = std::min(budget, pick(rng_, 1, 3));
    for (int k = 0; k < reads; ++k) add_read(opt_.memory && (k == 0 || coin(rng_)));

    if (data_channel_ != 0) {
      // first read doubles as the data broadcast sender
      block_.instructions[producers_[0].iid].bid = static_cast<uint8_t>(data_channel_);
      data_sender_ = producers_[0].iid;
    }

    while (count() < budget) {
      const int remaining = budget - count();
      std::vector<Opcode> choices = {Opcode::Mov, Opcode::Addi, Opcode::Nop,
                                     Opcode::Add, Opcode::Sub, Opcode::And,
                                     Opcode::Or,  Opcode::Xor, Opcode::Read};
      if (opt_.memory) {
        choices.push_back(Opcode::Ld);
        if (count() >= 2) choices.push_back(Opcode::St);
      }
      Opcode op = choices[rng_() % choices.size()];

      Instruction insn;
      insn.opcode = op;
      if (op == Opcode::Read) {
        add_read(coin(rng_));
        continue;
      }
      if (op == Opcode::Addi) insn.imm = static_cast<int16_t>(pick(rng_, -64, 64));
      if (op == Opcode::Ld || op == Opcode::St)
        insn.imm = static_cast<int16_t>(4 * pick(rng_, 0, 7));

      // a non-compact consumer may take the channel slot from the broadcast
      bool listen = data_channel_ != 0 && data_sender_ >= 0 && !compact_form(op) &&
                    slot_awaited(insn, data_slot_) && data_listeners_ < 6 &&
                    coin(rng_);
      int explicit_needs = operand_count(op) - (listen ? 1 : 0);

      // reads inserted to feed this instruction count against the budget
      int shortfall = 0;
      if (op == Opcode::Ld || op == Opcode::St) {
        if (candidates(true) < 1) shortfall += 1;
        if (explicit_needs > 1 && candidates(false) + shortfall < 2)
          shortfall += 2 - candidates(false) - shortfall;
      } else if (explicit_needs > 0) {
        shortfall = std::max(0, explicit_needs - candidates(false));
      }
      if (1 + shortfall > remaining) {
        add_read(coin(rng_));
        continue;
      }
      if (op == Opcode::Ld || op == Opcode::St) {
        ensure_candidates(1, true);
        if (explicit_needs > 1) ensure_candidates(2, false);
      } else if (explicit_needs > 0) {
        ensure_candidates(explicit_needs, false);
      }

      int iid = add(insn);
      Instruction& placed = block_.instructions[iid];
      if (listen) {
        placed.binput = {static_cast<uint8_t>(data_channel_), data_slot_};
        ++data_listeners_;
      }
      if (op == Opcode::Ld) {
        wire(iid, Slot::Op0, true);
      } else if (op == Opcode::St) {
        wire(iid, Slot::Op0, true);
        wire(iid, Slot::Op1, false);
      } else {
        for (Slot s : {Slot::Op0, Slot::Op1}) {
          if (!slot_awaited(placed, s)) continue;
          if (listen && s == data_slot_) continue;
          wire(iid, s, false);
        }
      }
      if (produces_value(op)) register_producer(iid, false);
    }

    // spare producer outputs become commit-time register writes
    for (auto& p : producers_) {
      if (next_wreg_ >= 20) break;
      if (p.free_targets == 0 || rng_() % 4 != 0) continue;
      Instruction& insn = block_.instructions[p.iid];
      for (auto& t : insn.targets) {
        if (t.kind == TargetKind::None) {
          t = {TargetKind::Reg, next_wreg_++};
          --p.free_targets;
          break;
        }
      }
    }
  }

  // leaves: 0 = unconditional BRO, 1 = broadcast branch pair, 2 = explicit
  // predicate targets to predicated leaf moves plus an unconditional BRO
  void build_tail(int kind) {
    if (kind == 0) {
      Instruction bro;
      bro.opcode = Opcode::Bro;
      add(bro);
      return;
    }

    ensure_candidates(2, false);
    Instruction test;
    bool two_ops = kind == 1 && coin(rng_);
    if (two_ops) {
      test.opcode = coin(rng_) ? Opcode::Tlt : Opcode::Teq;
    } else {
      test.opcode = Opcode::Tlei;
      test.imm = static_cast<int16_t>(pick(rng_, -64, 64));
    }
    int test_iid = add(test);
    wire(test_iid, Slot::Op0, false);
    if (two_ops) wire(test_iid, Slot::Op1, false);

    if (kind == 1) {
      block_.instructions[test_iid].bid = 3;
      for (Pred pred : {Pred::True, Pred::False}) {
        Instruction bro;
        bro.opcode = Opcode::Bro;
        bro.pred = pred;
        bro.binput = {3, Slot::Predicate};
        add(bro);
      }
      return;
    }

    // one predicated leaf move woken by an explicit predicate target
    Instruction leaf;
    leaf.opcode = Opcode::Mov;
    leaf.pred = coin(rng_) ? Pred::True : Pred::False;
    leaf.targets[0] = {TargetKind::Reg, next_wreg_++};
    int leaf_iid = add(leaf);
    wire(leaf_iid, Slot::Op0, false);
    block_.instructions[test_iid].targets[0] = {TargetKind::PredTrue,
                                                static_cast<uint8_t>(leaf_iid)};
    Instruction bro;
    bro.opcode = Opcode::Bro;
    add(bro);
  }

  std::mt19937_64& rng_;
  const GenOptions& opt_;
  Block block_;
  std::vector<Producer> producers_;
  int data_channel_ = 0;
  Slot data_slot_ = Slot::Op0;
  int data_sender_ = -1;
  int data_listeners_ = 0;
  uint8_t next_wreg_ = 8;
};

}  // namespace

Block generate_block(std::mt19937_64& rng, const GenOptions& opt) {
  BlockBuilder builder(rng, opt);
  return builder.build();
}

Instruction generate_instruction(std::mt19937_64& rng) {
  Instruction insn;
  insn.opcode = static_cast<Opcode>(rng() % kNumOpcodes);
  insn.pred = static_cast<Pred>(rng() % 3);
  const bool value = produces_value(insn.opcode);
  const bool test = produces_predicate(insn.opcode);
  if ((value || test) && rng() % 3 == 0)
    insn.bid = static_cast<uint8_t>(1 + rng() % kBroadcastChannels);
  if (insn.opcode == Opcode::Read) insn.reg = static_cast<uint8_t>(rng() % 32);
  if (has_immediate(insn.opcode))
    insn.imm = static_cast<int16_t>(pick(rng, kMinImmediate, kMaxImmediate));

  if (insn.opcode == Opcode::Bro) {
    insn.exit_index = static_cast<uint8_t>(rng() % 4);
    if (insn.pred != Pred::None && coin(rng))
      insn.binput = {static_cast<uint8_t>(1 + rng() % 3), Slot::Predicate};
    return insn;
  }

  int max_targets = compact_form(insn.opcode) ? 1 : 2;
  int ntargets = (value || test) ? static_cast<int>(rng() % (max_targets + 1)) : 0;
  for (int k = 0; k < ntargets; ++k) {
    Target t;
    if (test) {
      t.kind = coin(rng) ? TargetKind::PredTrue : TargetKind::PredFalse;
      t.index = static_cast<uint8_t>(rng() % kWindowEntries);
    } else if (rng() % 4 == 0) {
      t.kind = TargetKind::Reg;
      t.index = static_cast<uint8_t>(rng() % 32);
    } else {
      t.kind = coin(rng) ? TargetKind::Op0 : TargetKind::Op1;
      t.index = static_cast<uint8_t>(rng() % kWindowEntries);
    }
    insn.targets[k] = t;
  }

  if (!compact_form(insn.opcode) && rng() % 3 == 0) {
    std::vector<Slot> slots;
    if (operand_count(insn.opcode) >= 1) slots.push_back(Slot::Op0);
    if (operand_count(insn.opcode) >= 2) slots.push_back(Slot::Op1);
    if (insn.pred != Pred::None) slots.push_back(Slot::Predicate);
    if (!slots.empty())
      insn.binput = {static_cast<uint8_t>(1 + rng() % 3), slots[rng() % slots.size()]};
  }
  return insn;
}

}  // namespace edgesim
