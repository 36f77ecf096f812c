#pragma once

// AST for the finite-state Event-B subset: contexts (.ebc) and machines (.ebm).
// Expressions and predicates share one node type; the typechecker distinguishes
// them by the inferred type (Bool vs the rest).

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ebv/diag.hpp"

namespace ebv::eb {

// ---------------------------------------------------------------- types

struct EType;
using ETypePtr = std::shared_ptr<const EType>;

struct EType {
  enum Kind { Bool, Int, Carrier, Pow, Pair } kind = Int;
  int carrier = -1;           // Kind::Carrier: index into the carrier registry
  bool has_bounds = false;    // Kind::Int arising from a typing interval n..m
  i128 lo = 0, hi = 0;
  ETypePtr a, b;              // Pow: a = element type; Pair: a, b

  static ETypePtr mk_bool();
  static ETypePtr mk_int();
  static ETypePtr mk_int_bounded(i128 lo, i128 hi);
  static ETypePtr mk_carrier(int id);
  static ETypePtr mk_pow(ETypePtr elem);
  static ETypePtr mk_pair(ETypePtr a, ETypePtr b);

  bool same(const EType& o) const;  // structural equality, bounds ignored
  std::string str(const std::vector<std::string>& carrier_names) const;
};

// ---------------------------------------------------------------- expressions

enum class EK {
  // atoms
  IntLit, BoolLit, Ident, EmptySet, IntSet, NatSet, BoolSet,
  // unary-ish builtins
  Not, Neg, Finite, BoolOf, Card, Dom, Ran, PowOp, Pow1Op, MinOp, MaxOp,
  UnionGen, InterGen,  // generalized union/inter over a set of sets
  // binary
  And, Or, Imp, Eqv, Eq, Ne, Lt, Le, Gt, Ge, In, NotIn, Subset, SSubset,
  Add, Sub, Mul, Div, Mod, Exp, Interval, Union, Inter, Diff, Cross, Maplet,
  RelAll, RelTotal, RelSurj, RelTotalSurj,
  Pfun, Tfun, Pinj, Tinj, Psur, Tsur, Bij,
  // n-ary / binding
  SetLit, SetComp, QUnion, QInter, Forall, Exists, App, Partition,
};

struct EExpr;
using EExprPtr = std::shared_ptr<EExpr>;

struct EExpr {
  EK k;
  SourcePos pos;
  std::vector<EExprPtr> kids;

  std::string name;   // Ident
  i128 ival = 0;      // IntLit
  bool bval = false;  // BoolLit

  // Forall/Exists/SetComp/QUnion/QInter: bound variable names.
  std::vector<std::string> binders;

  // Filled by the typechecker.
  ETypePtr type;
  std::vector<ETypePtr> binder_types;
  enum class Ref {
    Unres, Var, AbsVar, Const, ExternalFn, Param, CarrierSet, QuantVar
  } ref = Ref::Unres;
  int ref_machine = -1;  // AbsVar: index of the machine the variable belongs to

  static EExprPtr mk(EK k, SourcePos pos);
};

// ---------------------------------------------------------------- machine parts

struct EbGuard {
  std::string label;
  SourcePos pos;
  EExprPtr pred;
  bool is_typing = false;  // parameter-typing shape: p ∈ E / p ⊆ E with ground E
};

struct EbAction {
  std::string label;
  SourcePos pos;
  std::string lhs;  // assigned variable
  EExprPtr rhs;
};

struct EbWitness {
  std::string label;  // the abstract parameter being witnessed
  SourcePos pos;
  EExprPtr pred;      // equality: <param> = <expr>
};

struct EbEvent {
  std::string name;
  SourcePos pos;
  std::optional<std::string> refines;
  bool external = false;  // environment acquisition: excluded from equivalence scope
  std::vector<std::string> params;
  std::vector<ETypePtr> param_types;  // resolved from typing guards
  std::vector<EbGuard> guards;
  std::vector<EbWitness> witnesses;
  std::vector<EbAction> actions;
};

enum class InvKind { Typing, Gluing, Safety };

struct EbInvariant {
  std::string label;
  SourcePos pos;
  EExprPtr pred;
  InvKind kind = InvKind::Safety;
  int typed_var = -1;  // Typing: index of the variable it types
};

struct EbVariable {
  std::string name;
  SourcePos pos;
  ETypePtr type;       // from the first typing invariant
  EExprPtr type_expr;  // the RHS of that invariant (carries interval/set shape)
};

struct EbMachine {
  std::string name;
  SourcePos pos;
  std::optional<std::string> refines;
  std::vector<std::string> sees;
  std::vector<EbVariable> variables;
  std::vector<EbInvariant> invariants;
  EbEvent init;  // INITIALISATION
  std::vector<EbEvent> events;
};

// ---------------------------------------------------------------- context parts

struct CarrierSet {
  std::string name;
  SourcePos pos;
  int size = 0;  // finite bound, required
  int id = -1;   // registry index, assigned by the resolver
};

struct EbConstant {
  std::string name;
  SourcePos pos;
  bool external = false;     // uninterpreted function implemented outside the model
  EExprPtr type_expr;        // declared type expression
  ETypePtr type;             // resolved (for external: the function arrow as Pow(Pair))
  std::vector<ETypePtr> sig_args;  // external only
  ETypePtr sig_ret;                // external only
};

struct EbAxiom {
  std::string label;
  SourcePos pos;
  EExprPtr pred;
};

struct EbContext {
  std::string name;
  SourcePos pos;
  std::optional<std::string> extends;
  std::vector<CarrierSet> sets;
  std::vector<EbConstant> constants;
  std::vector<EbAxiom> axioms;
};

// ---------------------------------------------------------------- whole model

struct EbModel {
  std::vector<EbContext> contexts;   // parse order
  std::vector<EbMachine> machines;   // refinement order: abstract first after resolve
  std::vector<std::string> carrier_names;  // registry
  std::vector<int> carrier_sizes;

  const EbContext* find_context(const std::string& n) const;
  const EbMachine* find_machine(const std::string& n) const;
  int machine_index(const std::string& n) const;
};

// One machine with its whole refinement chain and all visible contexts
// collapsed: the concrete events plus everything needed for verification.
struct FlatVariable {
  std::string name;
  ETypePtr type;
  EExprPtr type_expr;
  int origin;        // machine index
  bool concrete;     // declared in the most concrete machine (or persists by name)
};

struct FlatInvariant {
  std::string label;       // qualified: <mac>_<label>
  EExprPtr pred;
  InvKind kind;
  int origin;
};

struct FlatAbstractParam {
  std::string event;   // leaf event name this belongs to
  std::string name;    // qualified shadow name: <abs_mac>_<abs_event>_<param>
  std::string param;   // the original parameter name
  ETypePtr type;
  EExprPtr witness;    // the witness equality: <param> = <expr>
  std::string witness_label;
  int abs_machine = -1;   // machine the parameter belongs to
  std::string abs_event;  // event the parameter belongs to
  int level = -1;         // index of that event in the leaf event's chain
};

// Refinement ancestry of one leaf event, root first (leaf is levels.back()).
struct FlatEventChain {
  std::string leaf;
  std::vector<std::pair<int, const EbEvent*>> levels;  // (machine index, event)
};

struct FlatMachine {
  std::string name;  // most concrete machine name
  const EbModel* model = nullptr;

  std::vector<CarrierSet> sets;
  std::vector<EbConstant> constants;
  std::vector<EbAxiom> axioms;

  std::vector<FlatVariable> variables;       // concrete first, then abstract-only
  std::vector<FlatInvariant> invariants;     // abstract-to-concrete order
  EbEvent init;                              // concrete initialisation
  std::vector<EbEvent> events;               // concrete events, definition order
  std::vector<FlatAbstractParam> abs_params; // witnessed abstract parameters
  std::vector<FlatEventChain> chains;        // one per concrete event

  const FlatVariable* find_variable(const std::string& n) const;
  const FlatEventChain* find_chain(const std::string& leaf_event) const;
};

}  // namespace ebv::eb
