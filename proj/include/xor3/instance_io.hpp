#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xor3/instance.hpp"

namespace xor3 {

/// Text form of an instance before keys are bound to a limb count:
/// line 1 is `3XOR v1 n=<n> w=<w>`, followed by n lines of lowercase hex,
/// exactly ceil(w/4) digits each, sorted strictly ascending.
struct RawInstanceText {
  std::size_t n = 0;
  unsigned width = 0;
  std::vector<std::string> lines;
};

inline RawInstanceText read_instance_text(std::istream& in) {
  RawInstanceText raw;
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("instance file: missing header");
  std::istringstream hs(header);
  std::string magic, version, nfield, wfield;
  hs >> magic >> version >> nfield >> wfield;
  if (magic != "3XOR" || version != "v1" || nfield.rfind("n=", 0) != 0 ||
      wfield.rfind("w=", 0) != 0)
    throw std::runtime_error("instance file: bad header '" + header + "'");
  try {
    raw.n = std::stoull(nfield.substr(2));
    raw.width = unsigned(std::stoul(wfield.substr(2)));
  } catch (const std::exception&) {
    throw std::runtime_error("instance file: bad header '" + header + "'");
  }
  if (raw.width < 1 || raw.width > kMaxKeyBits)
    throw std::runtime_error("instance file: width out of range");
  if (raw.n < 1) throw std::runtime_error("instance file: n must be positive");
  unsigned digits = hex_digit_count(raw.width);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() && raw.lines.size() == raw.n) break;
    if (line.size() != digits)
      throw std::runtime_error("instance file: line '" + line + "' has " +
                               std::to_string(line.size()) + " digits, want " +
                               std::to_string(digits));
    if (!raw.lines.empty()) {
      if (line == raw.lines.back())
        throw std::runtime_error("instance file: duplicate key '" + line + "'");
      if (line < raw.lines.back())
        throw std::runtime_error("instance file: keys not sorted ascending");
    }
    raw.lines.push_back(line);
  }
  if (raw.lines.size() != raw.n)
    throw std::runtime_error("instance file: expected " + std::to_string(raw.n) +
                             " keys, found " + std::to_string(raw.lines.size()));
  return raw;
}

template <std::size_t L>
XorInstance<L> instance_from_text(const RawInstanceText& raw) {
  std::vector<BitWord<L>> words;
  words.reserve(raw.n);
  for (const auto& line : raw.lines)
    words.push_back(from_hex<L>(line, raw.width));
  return XorInstance<L>(std::move(words), raw.width);
}

template <std::size_t L>
void write_instance(std::ostream& out, const XorInstance<L>& inst) {
  out << "3XOR v1 n=" << inst.size() << " w=" << inst.width() << '\n';
  for (const auto& w : inst.words()) out << to_hex(w, inst.width()) << '\n';
}

}  // namespace xor3
