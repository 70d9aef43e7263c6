#pragma once
//
// Text assembly for instruction blocks.
//
// One block per label, one instruction per line, ';' comments. Instruction
// syntax:  MNEMONIC[.T|.F] [operands] [targets]
//   operands: Rn (READ source), #imm, Bn (listen on broadcast channel n),
//             exit label (BRO)
//   targets:  T[<iid>L], T[<iid>R], T[<iid>P]   explicit operand/predicate
//             B[<ch>L],  B[<ch>R],  B[<ch>P]    broadcast send on channel
//             W[R<n>]                           register write at commit
//

#include <string>
#include <string_view>

#include "edgesim/isa.hpp"

namespace edgesim {

struct AsmError : Error {
  enum class Kind {
    Parse,
    TargetOutOfRange,
    BlockTooLarge,
    DanglingLabel,
    SlotConflict,
  };
  Kind kind;
  int line;  // 1-based source line, 0 if not tied to a line
  AsmError(Kind k, int ln, const std::string& msg)
      : Error("line " + std::to_string(ln) + ": " + msg), kind(k), line(ln) {}
};

Program assemble(std::string_view source);

// Canonical text form; assemble(disassemble(p)) reproduces p structurally.
std::string disassemble(const Program& program);
std::string disassemble(const Block& block);

}  // namespace edgesim
