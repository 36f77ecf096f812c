#pragma once

// Bit-blasting of the dataflow IR into the three-operator netlist.
//
// Encodings: bools are single bits; an integer of window [lo, lo+2^w-1] is w
// bits holding value-lo (the storage offset travels in the bit map); enum
// values are one-hot vectors in variant A and binary ordinals in variant B.
// Free inputs, block outputs and symbolic constants always use the binary
// form so the two variants expose identical input interfaces.
//
// The two variants also differ structurally: A sums with ripple-carry
// adders and folds chains left to right, B uses carry-select adders and
// balanced trees.  Both are bit-exact with the reference interpreter,
// including its defined continuations (division by zero gives zero, an
// empty min/max selection gives zero, an out-of-range index reads the last
// element, stores wrap into the storage window).
//
// Streams with a non-constant initial definition are driven through a
// first-cycle multiplexer on a dedicated "$init" latch; block results
// become fresh free inputs whose contracts are emitted as constraints.

#include <functional>
#include <string>
#include <vector>

#include "ebv/hll_ast.hpp"
#include "ebv/lll.hpp"

namespace ebv::lll {

enum class Variant { A, B };

// Where each IR-level scalar leaf lives in the netlist; the decoder for
// counterexample lifting and the naming source for code generation.
struct MapEntry {
  enum class Role { Input, State, Wire, SymConst, BlockOut, Const };
  enum class Enc { Bool, Int, EnumOneHot, EnumBinary };

  Role role;
  std::string name;    // stream name, or block instance name
  std::string suffix;  // leaf path inside the stream ("" for scalars)
  Enc enc = Enc::Bool;
  i128 offset = 0;  // Int: window base
  int enum_id = -1;
  std::vector<uint32_t> bits;  // LSB first; one-hot in ordinal order
  i128 const_value = 0;        // Const only (no bits)

  int stream = -1;    // IR stream id (instance id for BlockOut)
  int leaf = -1;      // leaf ordinal within the stream
};

struct BitMap {
  std::vector<MapEntry> entries;
};

// value of one entry given a bit reader (Const entries need no bits)
i128 decode_entry(const MapEntry& e, const std::function<bool(uint32_t)>& bit);

std::string print_bitmap(const BitMap& m, const Netlist& n);
BitMap parse_bitmap(const std::string& text, const std::string& filename,
                    const Netlist& n);

struct Expansion {
  Netlist netlist;
  BitMap map;
  Variant variant = Variant::A;
};

// model must be elaborated
Expansion expand(const hll::HllModel& m, Variant v);

}  // namespace ebv::lll
