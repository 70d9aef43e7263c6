#include "edgesim/blockfile.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace edgesim {

namespace {

constexpr char kMagic[4] = {'E', 'D', 'G', 'B'};
constexpr uint8_t kVersion = 1;

void put_u16(std::ostream& os, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

void put_u32(std::ostream& os, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 4);
}

uint16_t get_u16(std::istream& is) {
  unsigned char b[2];
  if (!is.read(reinterpret_cast<char*>(b), 2)) throw FileError("truncated file");
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw FileError("truncated file");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (uint32_t(b[3]) << 24);
}

std::string get_str(std::istream& is) {
  uint16_t len = get_u16(is);
  std::string s(len, '\0');
  if (len && !is.read(s.data(), len)) throw FileError("truncated file");
  return s;
}

void put_str(std::ostream& os, const std::string& s) {
  if (s.size() > 0xFFFF) throw FileError("label too long");
  put_u16(os, static_cast<uint16_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

}  // namespace

void save_program(const Program& program, std::ostream& os) {
  os.write(kMagic, 4);
  os.put(static_cast<char>(kVersion));
  put_u32(os, static_cast<uint32_t>(program.blocks.size()));
  for (const auto& block : program.blocks) {
    put_str(os, block.name);
    put_u16(os, static_cast<uint16_t>(block.instructions.size()));
    for (const auto& insn : block.instructions) put_u32(os, encode_instruction(insn));
    put_u16(os, static_cast<uint16_t>(block.exits.size()));
    for (const auto& e : block.exits) put_str(os, e);
  }
  if (!os) throw FileError("write failed");
}

void save_program(const Program& program, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FileError("cannot open '" + path + "' for writing");
  save_program(program, os);
}

Program load_program(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw FileError("not a block file (bad magic)");
  int version = is.get();
  if (version != kVersion)
    throw FileError("unsupported version " + std::to_string(version));

  Program program;
  uint32_t nblocks = get_u32(is);
  for (uint32_t bi = 0; bi < nblocks; ++bi) {
    Block block;
    block.name = get_str(is);
    uint16_t ninsns = get_u16(is);
    if (ninsns == 0 || ninsns > kWindowEntries)
      throw FileError("block '" + block.name + "' has bad instruction count");
    for (uint16_t i = 0; i < ninsns; ++i)
      block.instructions.push_back(decode_instruction(get_u32(is)));
    uint16_t nexits = get_u16(is);
    for (uint16_t i = 0; i < nexits; ++i) block.exits.push_back(get_str(is));
    assign_lsids(block);
    validate_block(block);
    program.blocks.push_back(std::move(block));
  }
  validate_program(program);
  return program;
}

Program load_program(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileError("cannot open '" + path + "'");
  return load_program(is);
}

}  // namespace edgesim
