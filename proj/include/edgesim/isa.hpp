#pragma once
//
// Target-form instruction set: opcodes, targets, blocks, decoded ready state,
// and the bit-exact 32-bit word encoding used by the block file format.
//

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edgesim/sched_core.hpp"

namespace edgesim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Opcode : uint8_t {
  Nop = 0,  // opcode 0 so the all-zero word is a bare NOP
  Read,     // read a global register, zero dataflow inputs
  Mov,
  Add,
  Sub,
  And,
  Or,
  Xor,
  Addi,
  Tlei,  // test <= immediate (signed)
  Tlt,   // test < (signed)
  Teq,
  Bro,  // branch to an exit label; ends the block when it fires
  Ld,
  St,
};
inline constexpr int kNumOpcodes = 15;

enum class Pred : uint8_t { None = 0, True = 1, False = 2 };

const char* mnemonic(Opcode op);
std::optional<Opcode> opcode_from_mnemonic(std::string_view s);

// Dataflow operand count. Single-operand instructions consume slot 0.
int operand_count(Opcode op);
bool produces_value(Opcode op);      // result routable to operand/reg targets
bool produces_predicate(Opcode op);  // tests: boolean result, never a value
bool is_memory(Opcode op);
bool has_immediate(Opcode op);  // Addi, Tlei, Ld, St
// Compact word forms pack a 13-bit payload (immediate, or the register
// number for READ) over the t1 and broadcast-input fields, leaving a single
// explicit target and no broadcast listen.
bool compact_form(Opcode op);

enum class TargetKind : uint8_t {
  None = 0,
  Op0,        // left operand of the named instruction
  Op1,        // right operand
  PredTrue,   // predicate slot; delivers RT on true, RF on false
  PredFalse,  // predicate slot, alternate encoding
  Reg,        // global register write at block commit
};

struct Target {
  TargetKind kind = TargetKind::None;
  uint8_t index = 0;  // iid for Op0/Op1/Pred*, register number for Reg

  constexpr bool operator==(const Target&) const = default;
};

// Broadcast listen: channel 0 means no listen; slot says which input the
// channel feeds (uniform per channel across a block, see validate_block).
struct BroadcastInput {
  uint8_t channel = 0;
  Slot slot = Slot::Op0;

  constexpr bool operator==(const BroadcastInput&) const = default;
};

struct Instruction {
  Opcode opcode = Opcode::Nop;
  Pred pred = Pred::None;
  uint8_t bid = 0;  // broadcast send channel, 0 = none
  BroadcastInput binput;
  int16_t imm = 0;
  uint8_t reg = 0;  // READ source register
  std::array<Target, 2> targets{};
  uint8_t exit_index = 0;  // BRO only: index into Block::exits
  int8_t lsid = -1;        // dense memory order within the block, -1 if not memory

  bool operator==(const Instruction&) const = default;
};

struct Block {
  std::string name;
  std::vector<Instruction> instructions;  // 1..32
  std::vector<std::string> exits;         // labels referenced by BROs

  bool operator==(const Block&) const = default;
};

struct Program {
  std::vector<Block> blocks;

  const Block* find(std::string_view label) const;
  bool operator==(const Program&) const = default;
};

// Exit label that terminates execution instead of naming a block.
inline constexpr const char* kHaltLabel = "halt";

// ---------------------------------------------------------------------------
// Decoded ready state

struct DecodedReady {
  RdyVec drdys;
  uint8_t dbid = 0;
};

// Which inputs are pre-ready at decode: RT/RF cleared by predication, R0/R1
// cleared per operand count. Immediates and unused slots are pre-ready.
DecodedReady decoded_ready_state(const Instruction& insn);

// True when slot `s` is a dataflow input of this instruction.
bool slot_awaited(const Instruction& insn, Slot s);

// ---------------------------------------------------------------------------
// Binary encoding
//
// 32-bit word layout:
//   [31:26] opcode        [25:24] predicate (0 none, 1 true, 2 false)
//   [23:22] bid           [21:20] listen channel   [19:18] listen slot
//   [17:9]  t1            [8:0]   t0
// Target fields: [8:6] kind, [5:0] payload (iid or register number).
// Compact forms (READ, ADDI, TLEI, LD, ST) replace bits [21:9] with a 13-bit
// payload: signed immediate, or the source register for READ. BRO carries
// its exit index raw in the t0 field.

struct EncodeError : Error {
  enum class Kind {
    UnencodableImmediate,
    TooManyTargets,
    BroadcastInputConflict,
    FieldRange,
  };
  Kind kind;
  EncodeError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
};

struct DecodeError : Error {
  enum class Kind {
    InvalidOpcode,
    InvalidPredicate,
    InvalidTargetKind,
    InvalidBroadcastInput,
    InvalidRegister,
  };
  Kind kind;
  DecodeError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
};

inline constexpr int16_t kMinImmediate = -4096;
inline constexpr int16_t kMaxImmediate = 4095;

uint32_t encode_instruction(const Instruction& insn);
Instruction decode_instruction(uint32_t word);

// ---------------------------------------------------------------------------
// Block-level validation

struct BlockError : Error {
  int iid;  // offending instruction, -1 for block-level problems
  BlockError(int i, const std::string& msg) : Error(msg), iid(i) {}
};

// Renumbers lsids densely in instruction order over LD/ST.
void assign_lsids(Block& block);

// Structural and dataflow well-formedness; throws BlockError on the first
// violation. Checks target ranges and slot legality per opcode class, slot
// conflicts, broadcast channel consistency, memory instruction restrictions,
// and reachability of every awaited slot.
void validate_block(const Block& block);

// Per-program checks: names unique, exit labels resolve to a block or halt.
void validate_program(const Program& program);

}  // namespace edgesim
