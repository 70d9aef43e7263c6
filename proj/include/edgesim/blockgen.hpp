#pragma once
//
// Random well-formed block generation for property tests and the fuzz
// subcommand. Generated blocks always validate and terminate: memory address
// chains stay word-aligned, predicated instructions are leaves or branch
// pairs, and exactly one branch fires per execution.
//

#include <random>

#include "edgesim/isa.hpp"
#include "edgesim/refinterp.hpp"

namespace edgesim {

struct GenOptions {
  int min_insns = 1;
  int max_insns = 32;
  bool memory = true;
  bool broadcasts = true;
  bool predication = true;
};

// Registers 24..27 hold word-aligned addresses in generated states; memory
// instructions derive their addresses from these.
inline constexpr int kAlignedRegBase = 24;
inline constexpr int kAlignedRegCount = 4;

Block generate_block(std::mt19937_64& rng, const GenOptions& opt = {});
ArchState generate_state(std::mt19937_64& rng);

// Random encodable instruction (for encode/decode round-trip tests); not
// necessarily meaningful inside a block.
Instruction generate_instruction(std::mt19937_64& rng);

}  // namespace edgesim
