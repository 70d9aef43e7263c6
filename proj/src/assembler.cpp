#include "edgesim/assembler.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <vector>

namespace edgesim {

namespace {

using Kind = AsmError::Kind;

[[noreturn]] void err(Kind k, int line, const std::string& msg) {
  throw AsmError(k, line, msg);
}

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool is_ident(std::string_view s) {
  if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_'))
    return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

struct PendingInsn {
  Instruction insn;
  int line;
  bool listens = false;  // listener slot resolved once senders are known
  std::string exit_label;
};

struct PendingBlock {
  std::string name;
  int line;
  std::vector<PendingInsn> insns;
  // broadcast send slot kind per channel, from B[<ch>X] targets
  std::array<std::optional<Slot>, kBroadcastChannels + 1> channel_slot{};
};

Slot slot_from_letter(char c, int line) {
  switch (c) {
    case 'L': return Slot::Op0;
    case 'R': return Slot::Op1;
    case 'P': return Slot::Predicate;
  }
  err(Kind::Parse, line, std::string("bad slot letter '") + c + "'");
}

long parse_int(std::string_view s, int line, const char* what) {
  try {
    size_t pos = 0;
    long v = std::stol(std::string(s), &pos, 10);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    err(Kind::Parse, line, std::string("malformed ") + what);
  }
}

void add_target(PendingInsn& pi, Target t, int line) {
  for (auto& slot : pi.insn.targets) {
    if (slot.kind == TargetKind::None) {
      slot = t;
      return;
    }
  }
  err(Kind::Parse, line, "more than two targets");
}

// One operand or target token.
void parse_token(PendingBlock& blk, PendingInsn& pi, const std::string& tok, int line) {
  Instruction& insn = pi.insn;
  const Opcode op = insn.opcode;

  if (tok.size() >= 2 && tok[0] == 'R' && std::isdigit(static_cast<unsigned char>(tok[1]))) {
    if (op != Opcode::Read) err(Kind::Parse, line, "register operand only on READ");
    long r = parse_int(tok.substr(1), line, "register");
    if (r < 0 || r > 31) err(Kind::Parse, line, "register out of range");
    insn.reg = static_cast<uint8_t>(r);
    return;
  }

  if (tok[0] == '#') {
    if (!has_immediate(op)) err(Kind::Parse, line, "immediate not allowed here");
    long v = parse_int(tok.substr(1), line, "immediate");
    if (v < kMinImmediate || v > kMaxImmediate)
      err(Kind::Parse, line, "immediate out of range");
    insn.imm = static_cast<int16_t>(v);
    return;
  }

  // B<ch> : broadcast listen
  if (tok.size() == 2 && tok[0] == 'B' && std::isdigit(static_cast<unsigned char>(tok[1]))) {
    long ch = tok[1] - '0';
    if (ch < 1 || ch > kBroadcastChannels)
      err(Kind::Parse, line, "broadcast channel out of range");
    if (pi.listens) err(Kind::Parse, line, "instruction listens twice");
    pi.listens = true;
    insn.binput.channel = static_cast<uint8_t>(ch);
    return;
  }

  // T[<iid>X] / B[<ch>X] / W[R<n>]
  if (tok.size() >= 4 && tok[1] == '[' && tok.back() == ']') {
    std::string body = tok.substr(2, tok.size() - 3);
    if (tok[0] == 'W') {
      if (body.size() < 2 || body[0] != 'R') err(Kind::Parse, line, "malformed W target");
      long r = parse_int(body.substr(1), line, "register");
      if (r < 0 || r > 31) err(Kind::Parse, line, "register out of range");
      add_target(pi, {TargetKind::Reg, static_cast<uint8_t>(r)}, line);
      return;
    }
    if (body.size() < 2) err(Kind::Parse, line, "malformed target");
    Slot s = slot_from_letter(body.back(), line);
    long idx = parse_int(body.substr(0, body.size() - 1), line, "target index");
    if (tok[0] == 'T') {
      if (idx < 0 || idx >= kWindowEntries)
        err(Kind::TargetOutOfRange, line, "target index out of range");
      TargetKind k = s == Slot::Op0   ? TargetKind::Op0
                     : s == Slot::Op1 ? TargetKind::Op1
                                      : TargetKind::PredTrue;
      add_target(pi, {k, static_cast<uint8_t>(idx)}, line);
      return;
    }
    if (tok[0] == 'B') {
      if (idx < 1 || idx > kBroadcastChannels)
        err(Kind::Parse, line, "broadcast channel out of range");
      if (insn.bid != 0) err(Kind::Parse, line, "instruction broadcasts twice");
      insn.bid = static_cast<uint8_t>(idx);
      auto& chs = blk.channel_slot[idx];
      if (chs && *chs != s)
        err(Kind::Parse, line, "broadcast channel sent with two slot kinds");
      chs = s;
      return;
    }
  }

  // bare identifier: BRO exit label
  if (op == Opcode::Bro && is_ident(tok)) {
    if (!pi.exit_label.empty()) err(Kind::Parse, line, "BRO names two exits");
    pi.exit_label = tok;
    return;
  }

  err(Kind::Parse, line, "unrecognized token '" + tok + "'");
}

Block finish_block(PendingBlock& pb) {
  if (pb.insns.empty()) err(Kind::Parse, pb.line, "empty block '" + pb.name + "'");
  if (pb.insns.size() > kWindowEntries)
    err(Kind::BlockTooLarge, pb.line,
        "block '" + pb.name + "' has " + std::to_string(pb.insns.size()) +
            " instructions");

  Block block;
  block.name = pb.name;

  // exits, in first-reference order
  for (auto& pi : pb.insns) {
    if (pi.insn.opcode == Opcode::Bro) {
      if (pi.exit_label.empty()) err(Kind::Parse, pi.line, "BRO without an exit label");
      auto it = std::find(block.exits.begin(), block.exits.end(), pi.exit_label);
      if (it == block.exits.end()) {
        block.exits.push_back(pi.exit_label);
        it = std::prev(block.exits.end());
      }
      pi.insn.exit_index = static_cast<uint8_t>(it - block.exits.begin());
    } else if (!pi.exit_label.empty()) {
      err(Kind::Parse, pi.line, "exit label on a non-branch");
    }
  }

  // resolve listener slots from the channel's send kind
  for (auto& pi : pb.insns) {
    if (!pi.listens) continue;
    auto& chs = pb.channel_slot[pi.insn.binput.channel];
    if (!chs)
      err(Kind::Parse, pi.line,
          "broadcast channel " + std::to_string(pi.insn.binput.channel) +
              " has no sender");
    pi.insn.binput.slot = *chs;
  }

  for (auto& pi : pb.insns) block.instructions.push_back(pi.insn);
  assign_lsids(block);

  try {
    validate_block(block);
  } catch (const BlockError& e) {
    int line = e.iid >= 0 ? pb.insns[e.iid].line : pb.line;
    std::string msg = e.what();
    Kind k = Kind::Parse;
    if (msg.find("out of range") != std::string::npos) k = Kind::TargetOutOfRange;
    if (msg.find("broadcast-fed") != std::string::npos) k = Kind::SlotConflict;
    err(k, line, msg);
  }
  return block;
}

}  // namespace

Program assemble(std::string_view source) {
  Program program;
  std::optional<PendingBlock> current;

  int lineno = 0;
  size_t pos = 0;
  while (pos <= source.size()) {
    size_t nl = source.find('\n', pos);
    std::string_view raw =
        source.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
    ++lineno;

    std::string line = trim(raw.substr(0, raw.find(';')));
    if (line.empty()) continue;

    if (line.back() == ':') {
      std::string name = trim(line.substr(0, line.size() - 1));
      if (!is_ident(name)) err(Kind::Parse, lineno, "bad label '" + name + "'");
      if (name == kHaltLabel) err(Kind::Parse, lineno, "label 'halt' is reserved");
      if (current) program.blocks.push_back(finish_block(*current));
      current = PendingBlock{name, lineno, {}, {}};
      continue;
    }

    if (!current) err(Kind::Parse, lineno, "instruction before any label");

    std::istringstream iss(line);
    std::string mnem;
    iss >> mnem;
    PendingInsn pi;
    pi.line = lineno;
    size_t dot = mnem.find('.');
    if (dot != std::string::npos) {
      std::string suffix = mnem.substr(dot + 1);
      if (suffix == "T")
        pi.insn.pred = Pred::True;
      else if (suffix == "F")
        pi.insn.pred = Pred::False;
      else
        err(Kind::Parse, lineno, "bad predicate suffix '." + suffix + "'");
      mnem = mnem.substr(0, dot);
    }
    auto op = opcode_from_mnemonic(mnem);
    if (!op) err(Kind::Parse, lineno, "unknown mnemonic '" + mnem + "'");
    pi.insn.opcode = *op;

    std::string tok;
    while (iss >> tok) parse_token(*current, pi, tok, lineno);
    current->insns.push_back(pi);
  }
  if (current) program.blocks.push_back(finish_block(*current));
  if (program.blocks.empty()) err(Kind::Parse, 1, "no blocks in source");

  // cross-block exit resolution
  for (const auto& b : program.blocks) {
    for (const auto& e : b.exits) {
      if (e != kHaltLabel && program.find(e) == nullptr)
        throw AsmError(Kind::DanglingLabel, 0,
                       "block '" + b.name + "' exits to unknown label '" + e + "'");
    }
  }
  for (const auto& a : program.blocks)
    for (const auto& b : program.blocks)
      if (&a != &b && a.name == b.name)
        throw AsmError(Kind::Parse, 0, "duplicate label '" + a.name + "'");

  return program;
}

// ---------------------------------------------------------------------------
// Disassembly

namespace {

char slot_letter(Slot s) {
  switch (s) {
    case Slot::Op0: return 'L';
    case Slot::Op1: return 'R';
    case Slot::Predicate: return 'P';
  }
  return '?';
}

// Send slot kind for a channel: uniform across listeners; with no listeners,
// predicate senders print P and value senders L.
Slot channel_send_slot(const Block& block, uint8_t ch) {
  for (const auto& insn : block.instructions)
    if (insn.binput.channel == ch) return insn.binput.slot;
  for (const auto& insn : block.instructions)
    if (insn.bid == ch && produces_predicate(insn.opcode)) return Slot::Predicate;
  return Slot::Op0;
}

}  // namespace

std::string disassemble(const Block& block) {
  std::ostringstream os;
  os << block.name << ":\n";
  for (const auto& insn : block.instructions) {
    os << "    " << mnemonic(insn.opcode);
    if (insn.pred == Pred::True) os << ".T";
    if (insn.pred == Pred::False) os << ".F";
    if (insn.opcode == Opcode::Read) os << " R" << int(insn.reg);
    if (has_immediate(insn.opcode)) os << " #" << insn.imm;
    if (insn.binput.channel != 0) os << " B" << int(insn.binput.channel);
    if (insn.opcode == Opcode::Bro) os << ' ' << block.exits[insn.exit_index];
    for (const auto& t : insn.targets) {
      switch (t.kind) {
        case TargetKind::None: break;
        case TargetKind::Reg: os << " W[R" << int(t.index) << ']'; break;
        case TargetKind::Op0: os << " T[" << int(t.index) << "L]"; break;
        case TargetKind::Op1: os << " T[" << int(t.index) << "R]"; break;
        case TargetKind::PredTrue:
        case TargetKind::PredFalse: os << " T[" << int(t.index) << "P]"; break;
      }
    }
    if (insn.bid != 0)
      os << " B[" << int(insn.bid) << slot_letter(channel_send_slot(block, insn.bid))
         << ']';
    os << '\n';
  }
  return os.str();
}

std::string disassemble(const Program& program) {
  std::string out;
  for (size_t i = 0; i < program.blocks.size(); ++i) {
    if (i) out += '\n';
    out += disassemble(program.blocks[i]);
  }
  return out;
}

}  // namespace edgesim
