#include "ebv/lll.hpp"

#include <sstream>

namespace ebv::lll {

uint32_t Netlist::new_var(const std::string& name, Kind k) {
  if (name.empty()) throw Error("netlist variable needs a name");
  if (!ids.emplace(name, (uint32_t)names.size()).second)
    throw Error("duplicate netlist variable '" + name + "'");
  names.push_back(name);
  kinds.push_back(k);
  return (uint32_t)names.size() - 1;
}

uint32_t Netlist::add_input(const std::string& name) {
  uint32_t v = new_var(name, Kind::Input);
  inputs.push_back(v);
  return v;
}

uint32_t Netlist::add_latch(const std::string& name) {
  uint32_t v = new_var(name, Kind::Latch);
  latches.push_back({v, 0, 0});
  return v;
}

void Netlist::set_latch(uint32_t var, uint32_t init, uint32_t next) {
  for (auto& l : latches)
    if (l.out == var) {
      l.init = init;
      l.next = next;
      return;
    }
  throw Error("set_latch: '" + names.at(var) + "' is not a latch");
}

uint32_t Netlist::add_gate(Op op, uint32_t a, uint32_t b, const std::string& name) {
  uint32_t v = new_var(name.empty() ? "g" + std::to_string(names.size()) : name,
                       Kind::Gate);
  gates.push_back({v, op, a, op == Op::Neg ? 0 : b});
  return v;
}

uint32_t Netlist::var(const std::string& name) const {
  auto it = ids.find(name);
  if (it == ids.end()) throw Error("unknown netlist variable '" + name + "'");
  return it->second;
}

// ---------------------------------------------------------------- validate

void validate(const Netlist& n) {
  size_t nv = n.names.size();
  auto fail = [](const std::string& m) { throw Error("netlist: " + m); };

  if (n.kinds.size() != nv) fail("name/kind tables differ in size");
  if (nv < 2 || n.kinds[0] != Netlist::Kind::Const ||
      n.kinds[1] != Netlist::Kind::Const || n.names[0] != "0" || n.names[1] != "1")
    fail("variables 0/1 must be the boolean constants");
  if (n.ids.size() != nv - 2) fail("name index out of sync");
  for (auto& [name, v] : n.ids) {
    if (v < 2 || v >= nv) fail("name index entry out of range");
    if (n.names[v] != name) fail("name index disagrees with the name table");
  }

  std::vector<char> seen(nv, 0);  // combinational definition seen so far
  auto def = [&](uint32_t v) { return v < nv && (seen[v] || v < 2); };

  size_t ni = 0, nl = 0, ng = 0;
  for (uint32_t v : n.inputs) {
    if (v >= nv || n.kinds[v] != Netlist::Kind::Input) fail("input table corrupt");
    seen[v] = 1;
    ni++;
  }
  for (auto& l : n.latches) {
    if (l.out >= nv || n.kinds[l.out] != Netlist::Kind::Latch)
      fail("latch table corrupt");
    seen[l.out] = 1;
    nl++;
  }
  for (uint32_t v = 2; v < nv; v++)
    if (n.kinds[v] != Netlist::Kind::Gate && !seen[v])
      fail("variable '" + n.names[v] + "' is not in its section table");

  for (auto& g : n.gates) {
    if (g.out >= nv || n.kinds[g.out] != Netlist::Kind::Gate)
      fail("gate table corrupt");
    if (seen[g.out]) fail("gate '" + n.names[g.out] + "' defined twice");
    if (g.op != Op::Neg && g.op != Op::Impl && g.op != Op::Equiv)
      fail("gate '" + n.names[g.out] + "' uses an operator outside the alphabet");
    if (!def(g.a) || (g.op != Op::Neg && !def(g.b)))
      fail("gate '" + n.names[g.out] + "' reads an undefined operand");
    if (g.op == Op::Neg && g.b != 0) fail("negation gate carries a second operand");
    seen[g.out] = 1;
    ng++;
  }
  if (ni + nl + ng + 2 != nv) fail("a variable is defined in no section");

  for (auto& l : n.latches) {
    if (l.init >= nv ||
        (l.init > 1 && n.kinds[l.init] != Netlist::Kind::Input))
      fail("latch '" + n.names[l.out] + "' initial must be a constant or an input");
    if (l.next >= nv) fail("latch '" + n.names[l.out] + "' next is undefined");
  }

  auto outs = [&](const std::vector<Output>& os, const char* what) {
    std::map<std::string, int> names;
    for (auto& o : os) {
      if (o.name.empty()) fail(std::string(what) + " output needs a name");
      if (!names.emplace(o.name, 1).second)
        fail("duplicate " + std::string(what) + " '" + o.name + "'");
      if (o.var >= nv) fail(std::string(what) + " '" + o.name + "' is undefined");
    }
  };
  outs(n.constraints, "constraint");
  outs(n.obligations, "obligation");
  outs(n.outputs, "output");
}

// ---------------------------------------------------------------- print

static const char* op_name(Op op) {
  switch (op) {
    case Op::Neg: return "NEG";
    case Op::Impl: return "IMPL";
    case Op::Equiv: return "EQUIV";
  }
  return "?";
}

std::string print_netlist(const Netlist& n) {
  std::ostringstream out;
  out << "lll\n";
  for (uint32_t v : n.inputs) out << "input " << n.names[v] << "\n";
  for (auto& l : n.latches)
    out << "latch " << n.names[l.out] << " init " << n.names[l.init] << " next "
        << n.names[l.next] << "\n";
  for (auto& g : n.gates) {
    out << n.names[g.out] << " := " << op_name(g.op) << " " << n.names[g.a];
    if (g.op != Op::Neg) out << " " << n.names[g.b];
    out << "\n";
  }
  for (auto& o : n.constraints)
    out << "constraint " << o.name << " := " << n.names[o.var] << "\n";
  for (auto& o : n.obligations)
    out << "obligation " << o.name << " := " << n.names[o.var] << "\n";
  for (auto& o : n.outputs)
    out << "output " << o.name << " := " << n.names[o.var] << "\n";
  return out.str();
}

// ---------------------------------------------------------------- parse

namespace {

struct LineParser {
  std::string file;
  int lineno = 0;
  std::vector<std::string> toks;

  [[noreturn]] void err(const std::string& m) const {
    throw Error(file + ":" + std::to_string(lineno) + ": " + m);
  }
  const std::string& tok(size_t i) const {
    if (i >= toks.size()) err("truncated line");
    return toks[i];
  }
  void arity(size_t k) const {
    if (toks.size() != k) err("malformed line");
  }
};

}  // namespace

Netlist parse_netlist(const std::string& text, const std::string& filename) {
  Netlist n;
  // latch/output references may point forward; resolve by name at the end
  std::vector<std::pair<uint32_t, std::pair<std::string, std::string>>> latch_refs;
  std::vector<std::string> out_refs;  // in file order across the three sections

  LineParser lp;
  lp.file = filename;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    lp.lineno++;
    lp.toks.clear();
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) {
      if (t[0] == '#') break;
      lp.toks.push_back(t);
    }
    if (lp.toks.empty()) continue;
    if (!header) {
      if (lp.toks[0] != "lll") lp.err("expected the 'lll' header");
      lp.arity(1);
      header = true;
      continue;
    }
    const std::string& k = lp.toks[0];
    try {
      if (k == "input") {
        lp.arity(2);
        n.add_input(lp.tok(1));
      } else if (k == "latch") {
        lp.arity(6);
        if (lp.tok(2) != "init" || lp.tok(4) != "next")
          lp.err("latch line is 'latch <name> init <ref> next <ref>'");
        uint32_t v = n.add_latch(lp.tok(1));
        latch_refs.push_back({v, {lp.tok(3), lp.tok(5)}});
      } else if (k == "constraint" || k == "obligation" || k == "output") {
        lp.arity(4);
        if (lp.tok(2) != ":=") lp.err("expected ':='");
        auto& vec = k == "constraint" ? n.constraints
                    : k == "obligation" ? n.obligations
                                        : n.outputs;
        vec.push_back({lp.tok(1), 0});
        out_refs.push_back(lp.tok(3));  // slot fixed below
      } else {
        // gate: <name> := OP <a> [<b>]
        if (lp.tok(1) != ":=") lp.err("expected ':='");
        const std::string& op = lp.tok(2);
        if (op == "NEG") {
          lp.arity(4);
          n.add_gate(Op::Neg, n.var(lp.tok(3)), 0, lp.tok(0));
        } else if (op == "IMPL" || op == "EQUIV") {
          lp.arity(5);
          n.add_gate(op == "IMPL" ? Op::Impl : Op::Equiv, n.var(lp.tok(3)),
                     n.var(lp.tok(4)), lp.tok(0));
        } else {
          lp.err("unknown operator '" + op + "'");
        }
      }
    } catch (const Error& e) {
      lp.err(e.what());
    }
  }
  if (!header) throw Error(filename + ": empty netlist file");

  // second pass: output slots were appended in file order
  size_t ci = 0, oi = 0, pi = 0, ri = 0;
  std::istringstream in2(text);
  lp.lineno = 0;
  while (std::getline(in2, line)) {
    lp.lineno++;
    std::istringstream ls(line);
    std::string k;
    if (!(ls >> k) || k[0] == '#') continue;
    try {
      if (k == "constraint") n.constraints[ci++].var = n.var(out_refs[ri++]);
      else if (k == "obligation") n.obligations[oi++].var = n.var(out_refs[ri++]);
      else if (k == "output") n.outputs[pi++].var = n.var(out_refs[ri++]);
    } catch (const Error& e) {
      lp.err(e.what());
    }
  }
  for (auto& [v, refs] : latch_refs) {
    try {
      n.set_latch(v, n.var(refs.first), n.var(refs.second));
    } catch (const Error& e) {
      throw Error(filename + ": " + e.what());
    }
  }
  validate(n);
  return n;
}

// ---------------------------------------------------------------- simulate

Sim::Sim(const Netlist& n) : n_(n) {
  validate(n);
  val_.assign(n.var_count(), 0);
  latched_.assign(n.latches.size(), 0);
}

void Sim::step(const std::vector<bool>& inputs) {
  if (inputs.size() != n_.inputs.size())
    throw Error("simulator: expected " + std::to_string(n_.inputs.size()) +
                " input value(s), got " + std::to_string(inputs.size()));
  cycle_++;
  val_[0] = 0;
  val_[1] = 1;
  for (size_t i = 0; i < inputs.size(); i++) val_[n_.inputs[i]] = inputs[i];
  for (size_t i = 0; i < n_.latches.size(); i++)
    val_[n_.latches[i].out] = cycle_ == 0 ? val_[n_.latches[i].init] : latched_[i];
  for (auto& g : n_.gates) {
    bool a = val_[g.a] != 0, b = val_[g.b] != 0;
    switch (g.op) {
      case Op::Neg: val_[g.out] = !a; break;
      case Op::Impl: val_[g.out] = !a || b; break;
      case Op::Equiv: val_[g.out] = a == b; break;
    }
  }
  for (size_t i = 0; i < n_.latches.size(); i++)
    latched_[i] = val_[n_.latches[i].next];
}

bool Sim::all_constraints() const {
  for (auto& o : n_.constraints)
    if (!val_[o.var]) return false;
  return true;
}

bool Sim::all_obligations() const {
  for (auto& o : n_.obligations)
    if (!val_[o.var]) return false;
  return true;
}

}  // namespace ebv::lll
