#pragma once

// Bit-level netlist: every variable is boolean and every gate is one of the
// three permitted operators (negation, implication, equivalence).  Latches
// carry state across cycles; everything else is combinational.  Variables 0
// and 1 are the constants false and true.  Named outputs come in three
// flavours: constraints (assumed true every cycle), obligations (to be
// proved true every cycle) and plain outputs (probe points for equivalence
// checking and code generation).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ebv/diag.hpp"

namespace ebv::lll {

enum class Op : uint8_t { Neg, Impl, Equiv };

struct Gate {
  uint32_t out = 0;
  Op op = Op::Neg;
  uint32_t a = 0, b = 0;  // Neg uses a only (b stays 0)
};

struct Latch {
  uint32_t out = 0;
  uint32_t init = 0;  // constant 0/1, or an input (free initial value)
  uint32_t next = 0;  // any variable
};

struct Output {
  std::string name;
  uint32_t var = 0;
};

struct Netlist {
  enum class Kind : uint8_t { Const, Input, Latch, Gate };

  // parallel per-variable tables; vars 0/1 are the boolean constants
  std::vector<std::string> names{"0", "1"};
  std::vector<Kind> kinds{Kind::Const, Kind::Const};

  std::vector<uint32_t> inputs;  // declaration order
  std::vector<Latch> latches;
  std::vector<Gate> gates;  // operands always defined earlier
  std::vector<Output> constraints;
  std::vector<Output> obligations;
  std::vector<Output> outputs;

  std::map<std::string, uint32_t> ids;  // variable name -> var

  uint32_t add_input(const std::string& name);
  // latch is created first and wired up once its circuits exist
  uint32_t add_latch(const std::string& name);
  void set_latch(uint32_t var, uint32_t init, uint32_t next);
  uint32_t add_gate(Op op, uint32_t a, uint32_t b, const std::string& name = "");

  uint32_t var(const std::string& name) const;  // throws on unknown
  size_t var_count() const { return names.size(); }

 private:
  uint32_t new_var(const std::string& name, Kind k);
};

// Structural checks: tables consistent, every reference defined, gates in
// dependency order (combinational acyclicity), latch initials restricted to
// constants and inputs, section names unique.  Throws Error on violation.
void validate(const Netlist& n);

// Textual form: one definition per line.  Loses nothing: parse(print(n))
// prints back identically.
std::string print_netlist(const Netlist& n);
Netlist parse_netlist(const std::string& text, const std::string& filename);

// Cycle-accurate evaluation.  Latches take their initial value on the first
// step (inputs are already set, so a free initial value reads this cycle's
// input) and advance per their next literals afterwards.
class Sim {
 public:
  explicit Sim(const Netlist& n);

  // values parallel to n.inputs
  void step(const std::vector<bool>& inputs);

  bool value(uint32_t var) const { return val_[var] != 0; }
  int cycle() const { return cycle_; }

  bool all_constraints() const;
  bool all_obligations() const;

 private:
  const Netlist& n_;
  std::vector<char> val_;
  std::vector<char> latched_;
  int cycle_ = -1;
};

}  // namespace ebv::lll
