#include "edgesim/isa.hpp"

#include <algorithm>
#include <sstream>

namespace edgesim {

std::string RdyVec::str() const {
  std::string s(4, '0');
  if (rt()) s[0] = '1';
  if (rf()) s[1] = '1';
  if (r0()) s[2] = '1';
  if (r1()) s[3] = '1';
  return s;
}

namespace {

struct OpInfo {
  const char* name;
  int operands;
  bool value;
  bool predicate;
  bool memory;
  bool immediate;
};

constexpr OpInfo kOps[kNumOpcodes] = {
    {"NOP", 0, false, false, false, false},
    {"READ", 0, true, false, false, false},
    {"MOV", 1, true, false, false, false},
    {"ADD", 2, true, false, false, false},
    {"SUB", 2, true, false, false, false},
    {"AND", 2, true, false, false, false},
    {"OR", 2, true, false, false, false},
    {"XOR", 2, true, false, false, false},
    {"ADDI", 1, true, false, false, true},
    {"TLEI", 1, false, true, false, true},
    {"TLT", 2, false, true, false, false},
    {"TEQ", 2, false, true, false, false},
    {"BRO", 0, false, false, false, false},
    {"LD", 1, true, false, true, true},
    {"ST", 2, false, false, true, true},
};

const OpInfo& info(Opcode op) { return kOps[static_cast<int>(op)]; }

}  // namespace

const char* mnemonic(Opcode op) { return info(op).name; }

std::optional<Opcode> opcode_from_mnemonic(std::string_view s) {
  for (int i = 0; i < kNumOpcodes; ++i)
    if (s == kOps[i].name) return static_cast<Opcode>(i);
  return std::nullopt;
}

int operand_count(Opcode op) { return info(op).operands; }
bool produces_value(Opcode op) { return info(op).value; }
bool produces_predicate(Opcode op) { return info(op).predicate; }
bool is_memory(Opcode op) { return info(op).memory; }
bool has_immediate(Opcode op) { return info(op).immediate; }
bool compact_form(Opcode op) { return info(op).immediate || op == Opcode::Read; }

const Block* Program::find(std::string_view label) const {
  for (const auto& b : blocks)
    if (b.name == label) return &b;
  return nullptr;
}

DecodedReady decoded_ready_state(const Instruction& insn) {
  uint8_t bits = 0xF;
  if (insn.pred == Pred::True) bits &= ~RdyVec::kRT;
  if (insn.pred == Pred::False) bits &= ~RdyVec::kRF;
  int n = operand_count(insn.opcode);
  if (n >= 1) bits &= ~RdyVec::kR0;
  if (n >= 2) bits &= ~RdyVec::kR1;
  return {RdyVec(bits), insn.binput.channel};
}

bool slot_awaited(const Instruction& insn, Slot s) {
  switch (s) {
    case Slot::Op0: return operand_count(insn.opcode) >= 1;
    case Slot::Op1: return operand_count(insn.opcode) >= 2;
    case Slot::Predicate: return insn.pred != Pred::None;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

constexpr uint32_t kOpcodeShift = 26;
constexpr uint32_t kPredShift = 24;
constexpr uint32_t kBidShift = 22;
constexpr uint32_t kListenChShift = 20;
constexpr uint32_t kListenSlotShift = 18;
constexpr uint32_t kT1Shift = 9;
constexpr uint32_t kT0Shift = 0;
constexpr uint32_t kPayloadShift = 9;  // compact forms, 13 bits [21:9]

uint32_t encode_target(const Target& t) {
  if (t.index > 63)
    throw EncodeError(EncodeError::Kind::FieldRange, "target payload out of range");
  if (t.kind == TargetKind::None && t.index != 0)
    throw EncodeError(EncodeError::Kind::FieldRange, "NONE target with payload");
  return (static_cast<uint32_t>(t.kind) << 6) | t.index;
}

Target decode_target(uint32_t field) {
  uint32_t kindbits = field >> 6;
  uint8_t index = field & 0x3F;
  if (kindbits > static_cast<uint32_t>(TargetKind::Reg))
    throw DecodeError(DecodeError::Kind::InvalidTargetKind, "reserved target kind");
  auto kind = static_cast<TargetKind>(kindbits);
  if (kind == TargetKind::None && index != 0)
    throw DecodeError(DecodeError::Kind::InvalidTargetKind, "NONE target with payload");
  if (kind != TargetKind::None && kind != TargetKind::Reg && index >= kWindowEntries)
    throw DecodeError(DecodeError::Kind::InvalidTargetKind, "target iid out of range");
  if (kind == TargetKind::Reg && index >= 32)
    throw DecodeError(DecodeError::Kind::InvalidTargetKind, "target register out of range");
  return {kind, index};
}

}  // namespace

uint32_t encode_instruction(const Instruction& insn) {
  if (insn.bid > kBroadcastChannels)
    throw EncodeError(EncodeError::Kind::FieldRange, "broadcast send channel out of range");
  uint32_t word = static_cast<uint32_t>(insn.opcode) << kOpcodeShift;
  word |= static_cast<uint32_t>(insn.pred) << kPredShift;
  word |= static_cast<uint32_t>(insn.bid) << kBidShift;

  if (compact_form(insn.opcode)) {
    if (insn.targets[1].kind != TargetKind::None)
      throw EncodeError(EncodeError::Kind::TooManyTargets,
                        std::string(mnemonic(insn.opcode)) + " allows one explicit target");
    if (insn.binput.channel != 0)
      throw EncodeError(EncodeError::Kind::BroadcastInputConflict,
                        std::string(mnemonic(insn.opcode)) + " cannot listen on a broadcast");
    uint32_t payload;
    if (insn.opcode == Opcode::Read) {
      if (insn.reg >= 32)
        throw EncodeError(EncodeError::Kind::FieldRange, "register number out of range");
      payload = insn.reg;
    } else {
      if (insn.imm < kMinImmediate || insn.imm > kMaxImmediate)
        throw EncodeError(EncodeError::Kind::UnencodableImmediate,
                          "immediate " + std::to_string(insn.imm) + " out of range");
      payload = static_cast<uint32_t>(static_cast<int32_t>(insn.imm)) & 0x1FFF;
    }
    word |= payload << kPayloadShift;
    word |= encode_target(insn.targets[0]) << kT0Shift;
    return word;
  }

  if (insn.binput.channel > kBroadcastChannels)
    throw EncodeError(EncodeError::Kind::FieldRange, "broadcast listen channel out of range");
  if (insn.binput.channel != 0)
    word |= (static_cast<uint32_t>(insn.binput.channel) << kListenChShift) |
            (static_cast<uint32_t>(insn.binput.slot) << kListenSlotShift);

  if (insn.opcode == Opcode::Bro) {
    if (insn.targets[0].kind != TargetKind::None ||
        insn.targets[1].kind != TargetKind::None)
      throw EncodeError(EncodeError::Kind::TooManyTargets, "BRO carries no targets");
    word |= static_cast<uint32_t>(insn.exit_index) << kT0Shift;
    return word;
  }

  word |= encode_target(insn.targets[1]) << kT1Shift;
  word |= encode_target(insn.targets[0]) << kT0Shift;
  return word;
}

Instruction decode_instruction(uint32_t word) {
  uint32_t opbits = word >> kOpcodeShift;
  if (opbits >= kNumOpcodes)
    throw DecodeError(DecodeError::Kind::InvalidOpcode, "opcode " + std::to_string(opbits));

  Instruction insn;
  insn.opcode = static_cast<Opcode>(opbits);

  uint32_t predbits = (word >> kPredShift) & 0x3;
  if (predbits == 3)
    throw DecodeError(DecodeError::Kind::InvalidPredicate, "reserved predicate encoding");
  insn.pred = static_cast<Pred>(predbits);
  insn.bid = (word >> kBidShift) & 0x3;

  if (compact_form(insn.opcode)) {
    uint32_t payload = (word >> kPayloadShift) & 0x1FFF;
    if (insn.opcode == Opcode::Read) {
      if (payload >= 32)
        throw DecodeError(DecodeError::Kind::InvalidRegister, "register number out of range");
      insn.reg = static_cast<uint8_t>(payload);
    } else {
      // sign-extend 13 bits
      insn.imm = static_cast<int16_t>(static_cast<int32_t>(payload << 19) >> 19);
    }
    insn.targets[0] = decode_target(word & 0x1FF);
    return insn;
  }

  uint32_t ch = (word >> kListenChShift) & 0x3;
  uint32_t slotbits = (word >> kListenSlotShift) & 0x3;
  if (ch == 0 && slotbits != 0)
    throw DecodeError(DecodeError::Kind::InvalidBroadcastInput,
                      "listen slot without a channel");
  if (slotbits > 2)
    throw DecodeError(DecodeError::Kind::InvalidBroadcastInput, "reserved listen slot");
  if (ch != 0) insn.binput = {static_cast<uint8_t>(ch), static_cast<Slot>(slotbits)};

  if (insn.opcode == Opcode::Bro) {
    insn.exit_index = static_cast<uint8_t>(word & 0x1FF);
    return insn;
  }

  insn.targets[1] = decode_target((word >> kT1Shift) & 0x1FF);
  insn.targets[0] = decode_target((word >> kT0Shift) & 0x1FF);
  return insn;
}

// ---------------------------------------------------------------------------
// Block validation

void assign_lsids(Block& block) {
  int8_t next = 0;
  for (auto& insn : block.instructions)
    insn.lsid = is_memory(insn.opcode) ? next++ : -1;
}

namespace {

[[noreturn]] void fail(int iid, const std::string& msg) { throw BlockError(iid, msg); }

Slot target_slot(TargetKind k) {
  switch (k) {
    case TargetKind::Op0: return Slot::Op0;
    case TargetKind::Op1: return Slot::Op1;
    default: return Slot::Predicate;
  }
}

}  // namespace

void validate_block(const Block& block) {
  const auto& insns = block.instructions;
  if (insns.empty()) fail(-1, "block '" + block.name + "' is empty");
  if (insns.size() > kWindowEntries)
    fail(-1, "block '" + block.name + "' exceeds " + std::to_string(kWindowEntries) +
                 " instructions");

  int n = static_cast<int>(insns.size());
  int8_t expect_lsid = 0;

  for (int i = 0; i < n; ++i) {
    const Instruction& insn = insns[i];
    const bool value = produces_value(insn.opcode);
    const bool test = produces_predicate(insn.opcode);

    // lsid density in program order
    if (is_memory(insn.opcode)) {
      if (insn.lsid != expect_lsid++) fail(i, "memory lsid not dense in block order");
    } else if (insn.lsid != -1) {
      fail(i, "lsid on a non-memory instruction");
    }

    if (is_memory(insn.opcode)) {
      if (insn.pred != Pred::None) fail(i, "memory instructions may not be predicated");
      if (insn.binput.channel != 0)
        fail(i, "memory instructions may not listen on a broadcast");
    }

    if (insn.opcode == Opcode::Bro) {
      if (insn.exit_index >= block.exits.size()) fail(i, "BRO exit index out of range");
    } else if (insn.exit_index != 0) {
      fail(i, "exit index on a non-branch instruction");
    }

    if (insn.bid != 0 && !value && !test)
      fail(i, std::string(mnemonic(insn.opcode)) + " produces nothing to broadcast");
    if (insn.bid > kBroadcastChannels) fail(i, "broadcast send channel out of range");
    if (insn.binput.channel > kBroadcastChannels)
      fail(i, "broadcast listen channel out of range");

    if (insn.binput.channel != 0) {
      if (compact_form(insn.opcode))
        fail(i, std::string(mnemonic(insn.opcode)) + " cannot listen on a broadcast");
      if (!slot_awaited(insn, insn.binput.slot))
        fail(i, "broadcast listen on a slot this instruction never reads");
    }

    if (insn.opcode == Opcode::Read && insn.reg >= 32) fail(i, "register out of range");

    // explicit targets
    int explicit_targets = 0;
    for (int ti = 0; ti < 2; ++ti) {
      const Target& t = insn.targets[ti];
      if (t.kind == TargetKind::None) continue;
      ++explicit_targets;
      if (t.kind == TargetKind::Reg) {
        if (!value) fail(i, "register write from a non-value instruction");
        if (t.index >= 32) fail(i, "register target out of range");
        continue;
      }
      if (t.index >= n) fail(i, "target iid out of range");
      const Instruction& consumer = insns[t.index];
      Slot s = target_slot(t.kind);
      if (t.kind == TargetKind::PredTrue || t.kind == TargetKind::PredFalse) {
        if (!test) fail(i, "predicate target from a non-test instruction");
        if (consumer.pred == Pred::None)
          fail(i, "predicate target to an unpredicated instruction");
      } else {
        if (!value) fail(i, "operand target from a non-value instruction");
        if (!slot_awaited(consumer, s))
          fail(i, "target to a slot the consumer never reads");
      }
      // same (iid, slot) twice from one instruction
      for (int tj = 0; tj < ti; ++tj) {
        const Target& u = insn.targets[tj];
        if (u.kind != TargetKind::None && u.kind != TargetKind::Reg &&
            u.index == t.index && target_slot(u.kind) == s)
          fail(i, "both targets hit the same slot");
      }
      // slot both broadcast-listened and explicitly targeted
      if (consumer.binput.channel != 0 && consumer.binput.slot == s)
        fail(i, "slot " + std::to_string(t.index) + " is broadcast-fed");
    }
    if (compact_form(insn.opcode) && explicit_targets > 1)
      fail(i, std::string(mnemonic(insn.opcode)) + " allows one explicit target");
  }

  // broadcast channel consistency
  for (uint8_t ch = 1; ch <= kBroadcastChannels; ++ch) {
    std::vector<int> senders, listeners;
    for (int i = 0; i < n; ++i) {
      if (insns[i].bid == ch) senders.push_back(i);
      if (insns[i].binput.channel == ch) listeners.push_back(i);
    }
    if (listeners.empty()) continue;
    if (senders.empty())
      fail(listeners[0], "broadcast channel " + std::to_string(ch) + " has no sender");
    bool pred_channel = insns[listeners[0]].binput.slot == Slot::Predicate;
    Slot slot0 = insns[listeners[0]].binput.slot;
    for (int l : listeners) {
      if (insns[l].binput.slot != slot0)
        fail(l, "broadcast channel " + std::to_string(ch) + " feeds mixed slots");
    }
    for (int s : senders) {
      if (pred_channel != produces_predicate(insns[s].opcode))
        fail(s, "broadcast sender kind does not match channel " + std::to_string(ch));
    }
  }

  // every awaited slot must be reachable from some producer
  for (int i = 0; i < n; ++i) {
    const Instruction& insn = insns[i];
    for (Slot s : {Slot::Op0, Slot::Op1, Slot::Predicate}) {
      if (!slot_awaited(insn, s)) continue;
      if (insn.binput.channel != 0 && insn.binput.slot == s) continue;  // channel-fed
      bool fed = false;
      for (int p = 0; p < n && !fed; ++p) {
        for (const Target& t : insns[p].targets) {
          if (t.kind == TargetKind::None || t.kind == TargetKind::Reg) continue;
          if (t.index == i && target_slot(t.kind) == s) fed = true;
        }
      }
      if (!fed) fail(i, "awaited input is never delivered");
    }
  }
}

void validate_program(const Program& program) {
  for (const auto& b : program.blocks) {
    for (const auto& other : program.blocks)
      if (&b != &other && b.name == other.name)
        throw Error("duplicate block label '" + b.name + "'");
    for (const auto& e : b.exits)
      if (e != kHaltLabel && program.find(e) == nullptr)
        throw Error("block '" + b.name + "' exits to unknown label '" + e + "'");
  }
}

}  // namespace edgesim
