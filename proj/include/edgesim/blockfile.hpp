#pragma once
//
// Binary block file ("EDGB"): magic, version byte, block count, then per
// block the name, the 32-bit little-endian encoded instruction words, and
// the exit label table. Bit-exact per the instruction word layout.
//

#include <iosfwd>
#include <string>

#include "edgesim/isa.hpp"

namespace edgesim {

struct FileError : Error {
  using Error::Error;
};

void save_program(const Program& program, std::ostream& os);
void save_program(const Program& program, const std::string& path);

Program load_program(std::istream& is);
Program load_program(const std::string& path);

}  // namespace edgesim
