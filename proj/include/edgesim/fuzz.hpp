#pragma once
//
// Randomized equivalence checking: every generated block must produce the
// same architectural outcome under the reference interpreter and both timed
// engines.
//

#include <cstdint>
#include <string>

#include "edgesim/blockgen.hpp"

namespace edgesim {

struct FuzzOutcome {
  uint64_t runs = 0;
  uint64_t mismatches = 0;
  std::string first_failure;  // empty when clean
};

FuzzOutcome run_equivalence_fuzz(uint64_t count, uint64_t seed,
                                 const GenOptions& opt = {});

}  // namespace edgesim
