#pragma once

// AST and model registry for the synchronous dataflow IR.  A model is a set
// of typed streams grouped in namespaces: constants, declared streams
// (inputs when left undefined), definitions (combinational `v := e;` or
// state `I(v) := e0; X(v) := e1;`), uninterpreted blocks with call-site
// instances, constraints (assumed every cycle) and proof obligations
// (to prove every cycle).

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ebv/diag.hpp"

namespace ebv::hll {

// ---------------------------------------------------------------- types

struct HType;
using HTypePtr = std::shared_ptr<const HType>;

struct HType {
  enum K { Bool, Int, Enum, Array, Struct } k = Bool;
  i128 lo = 0, hi = 0;       // Int: declared interval
  int enum_id = -1;          // Enum: index into HllModel::enums
  HTypePtr elem;             // Array
  i128 size = 0;             // Array
  std::vector<std::pair<std::string, HTypePtr>> fields;  // Struct

  static HTypePtr mk_bool();
  static HTypePtr mk_int(i128 lo, i128 hi);
  static HTypePtr mk_enum(int id);
  static HTypePtr mk_array(HTypePtr elem, i128 size);
  static HTypePtr mk_struct(std::vector<std::pair<std::string, HTypePtr>> fields);

  bool same(const HType& o) const;
  bool scalar() const { return k == Bool || k == Int || k == Enum; }
  std::string str(const std::vector<struct HEnum>& enums) const;

  // storage window for Int: the power-of-two span starting at lo that the
  // netlist and the interpreter wrap into
  int bit_width() const;       // scalar only; Bool=1, Enum=ceil(log2(n)) min 1
  i128 storage_span() const;   // Int only: 1 << bit_width()
};

// Scalar leaves of a possibly structured type, in canonical DFS order.
struct LeafPath {
  std::string suffix;  // "" | "[2]" | ".f[0]" ...
  HTypePtr type;       // scalar
};
std::vector<LeafPath> leaf_paths(const HTypePtr& t);
i128 leaf_count(const HTypePtr& t);

// ---------------------------------------------------------------- expressions

enum class HK {
  BoolLit, IntLit, Name, Index, Member,
  Not, And, Or, Imp, Eqv, Ite,
  Eq, Ne, Lt, Le, Gt, Ge,
  Add, Sub, Mul, Div, Mod, Neg,
  All, Some, MinR, MaxR, Population,
  Call,      // block application; one instance per call site
  AllBlock,  // contract quantifier over a block's instances
};

struct HExpr;
using HExprPtr = std::shared_ptr<HExpr>;

struct HBinder {
  std::string var;
  HExprPtr lo, hi;      // constant expressions
  i128 clo = 0, chi = -1;  // folded by the checker
};

struct HExpr {
  HK k;
  SourcePos pos;
  std::vector<HExprPtr> kids;

  std::string name;  // Name / Member field / Call & AllBlock block name
  i128 ival = 0;
  bool bval = false;

  std::vector<HBinder> binders;  // All/Some/MinR/MaxR; AllBlock uses binders[0].var

  // filled by the checker
  HTypePtr type;
  enum class Ref { Unres, Stream, EnumConst, Binder, BlockVar } ref = Ref::Unres;
  int ref_id = -1;    // Stream: stream id; EnumConst: enum id
  int enum_val = -1;  // EnumConst: item ordinal
  int instance = -1;  // Call: instance id
  int block = -1;     // Call/AllBlock: block id

  static HExprPtr mk(HK k, SourcePos pos);
};

// ---------------------------------------------------------------- model parts

struct HEnum {
  std::string name;
  std::vector<std::string> items;
};

// Constants and declared streams share the registry; classification happens
// during elaboration (a declared stream with no definition is a free input).
struct HStream {
  std::string name;
  HTypePtr type;
  int ns = 0;
  SourcePos pos;
  bool is_const = false;
  HExprPtr const_value;     // null for symbolic constants
  // elaboration results
  bool is_input = false;    // declared, never defined
  bool is_state = false;    // has I()/X() definitions
  int def_plain = -1, def_init = -1, def_next = -1;  // indices into defs
};

struct PathSeg {
  bool is_field = false;
  std::string field;   // is_field
  std::string binder;  // array dimension binder variable
};

struct HDef {
  enum Kind { Plain, Init, Next } kind = Plain;
  bool comma_form = false;  // printed `v := e0, e1;` (Init+Next pair)
  std::string target;
  std::vector<PathSeg> path;
  HExprPtr rhs;
  SourcePos pos;
  int ns = 0;
  int stream = -1;  // resolved
};

struct HBlockDecl {
  std::string name;
  std::vector<HTypePtr> args;
  HTypePtr ret;
  int ns = 0;
  SourcePos pos;
};

struct HBlockInstance {
  int block = -1;
  std::string name;          // deterministic: <block>#<ordinal>
  std::vector<HExprPtr> args;  // the call site's argument expressions
  SourcePos pos;
};

struct HProp {
  std::string label;  // may be empty for constraints
  HExprPtr expr;
  int ns = 0;
  SourcePos pos;
};

struct HllModel {
  std::vector<std::string> namespaces;  // [0] is the root ""
  std::vector<HEnum> enums;
  std::vector<std::pair<std::string, HTypePtr>> aliases;  // Types section entries
  std::vector<HStream> streams;
  std::vector<HDef> defs;
  std::vector<HBlockDecl> blocks;
  std::vector<HProp> constraints;
  std::vector<HProp> obligations;

  // elaboration results
  std::vector<HBlockInstance> instances;
  std::vector<int> order0;   // def evaluation order at cycle 0 (Init + Plain)
  std::vector<int> orderS;   // steady-state order (Plain only)
  bool elaborated = false;

  std::map<std::string, int> stream_ids;
  std::map<std::string, int> block_ids;
  std::map<std::string, std::pair<int, int>> enum_item_ids;  // item -> (enum, ordinal)

  int stream_id(const std::string& n) const;          // -1 if absent
  const HStream& stream(const std::string& n) const;  // throws if absent
  int block_id(const std::string& n) const;
  int ns_id(const std::string& n);                     // interns
};

}  // namespace ebv::hll
