#include "ebv/eb_typecheck.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace ebv::eb {

// ---------------------------------------------------------------- EType

ETypePtr EType::mk_bool() {
  auto t = std::make_shared<EType>();
  t->kind = Bool;
  return t;
}
ETypePtr EType::mk_int() {
  auto t = std::make_shared<EType>();
  t->kind = Int;
  return t;
}
ETypePtr EType::mk_int_bounded(i128 lo, i128 hi) {
  auto t = std::make_shared<EType>();
  t->kind = Int;
  t->has_bounds = true;
  t->lo = lo;
  t->hi = hi;
  return t;
}
ETypePtr EType::mk_carrier(int id) {
  auto t = std::make_shared<EType>();
  t->kind = Carrier;
  t->carrier = id;
  return t;
}
ETypePtr EType::mk_pow(ETypePtr elem) {
  auto t = std::make_shared<EType>();
  t->kind = Pow;
  t->a = std::move(elem);
  return t;
}
ETypePtr EType::mk_pair(ETypePtr a, ETypePtr b) {
  auto t = std::make_shared<EType>();
  t->kind = Pair;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

bool EType::same(const EType& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Bool:
    case Int: return true;
    case Carrier: return carrier == o.carrier;
    case Pow: return a && o.a && a->same(*o.a);
    case Pair: return a && o.a && b && o.b && a->same(*o.a) && b->same(*o.b);
  }
  return false;
}

std::string EType::str(const std::vector<std::string>& cn) const {
  switch (kind) {
    case Bool: return "BOOL";
    case Int:
      if (has_bounds) return i128_str(lo) + ".." + i128_str(hi);
      return "INT";
    case Carrier: return carrier >= 0 && carrier < (int)cn.size() ? cn[carrier] : "<set>";
    case Pow: return "POW(" + (a ? a->str(cn) : "?") + ")";
    case Pair: return "(" + (a ? a->str(cn) : "?") + " \xc3\x97 " + (b ? b->str(cn) : "?") + ")";
  }
  return "?";
}

// ---------------------------------------------------------------- helpers

std::optional<i128> fold_const_int(const EExprPtr& e) {
  if (!e) return std::nullopt;
  switch (e->k) {
    case EK::IntLit: return e->ival;
    case EK::Neg: {
      auto v = fold_const_int(e->kids[0]);
      if (!v) return std::nullopt;
      return -*v;
    }
    case EK::Add:
    case EK::Sub:
    case EK::Mul: {
      auto a = fold_const_int(e->kids[0]);
      auto b = fold_const_int(e->kids[1]);
      if (!a || !b) return std::nullopt;
      i128 r;
      bool ok = e->k == EK::Add   ? i128_add_ok(*a, *b, r)
                : e->k == EK::Sub ? i128_add_ok(*a, -*b, r)
                                  : i128_mul_ok(*a, *b, r);
      if (!ok) return std::nullopt;
      return r;
    }
    default: return std::nullopt;
  }
}

bool is_ground(const EExprPtr& e) {
  if (!e) return true;
  if (e->k == EK::Ident) {
    switch (e->ref) {
      case EExpr::Ref::Const:
      case EExpr::Ref::ExternalFn:
      case EExpr::Ref::CarrierSet: return true;
      default: return false;
    }
  }
  for (auto& k : e->kids)
    if (!is_ground(k)) return false;
  return true;
}

namespace {

struct Sym {
  EExpr::Ref ref;
  ETypePtr type;
  int mac = -1;  // AbsVar: owning machine index
};

struct Checker {
  explicit Checker(EbModel& m) : model(m) {}
  EbModel& model;
  // global scope: carriers, constants, external functions (per visible set)
  std::map<std::string, Sym> globals;
  std::map<std::string, const EbConstant*> ext_sigs;
  // machine-local scopes
  std::map<std::string, Sym> vars;      // concrete machine variables
  std::map<std::string, Sym> abs_vars;  // ancestor variables not re-declared
  std::map<std::string, Sym> params;    // current event parameters
  std::vector<std::map<std::string, ETypePtr>> quants;

  [[noreturn]] void err(const SourcePos& p, const std::string& m) const {
    throw CompileError(p, m);
  }

  const Sym* lookup(const std::string& n) const {
    for (auto it = quants.rbegin(); it != quants.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end()) {
        static thread_local Sym s;
        s = Sym{EExpr::Ref::QuantVar, f->second, -1};
        return &s;
      }
    }
    if (auto f = params.find(n); f != params.end()) return &f->second;
    if (auto f = vars.find(n); f != vars.end()) return &f->second;
    if (auto f = abs_vars.find(n); f != abs_vars.end()) return &f->second;
    if (auto f = globals.find(n); f != globals.end()) return &f->second;
    return nullptr;
  }

  // ---- type expression resolution: a set expression used in a typing
  // position; returns the element type of that set.
  ETypePtr resolve_type_expr(const EExprPtr& e) {
    switch (e->k) {
      case EK::BoolSet: return EType::mk_bool();
      case EK::IntSet: return EType::mk_int();
      case EK::NatSet: {
        auto t = std::make_shared<EType>();
        t->kind = EType::Int;
        t->has_bounds = true;
        t->lo = 0;
        t->hi = -1;  // open upper bound; the translator widens per config
        return t;
      }
      case EK::Interval: {
        auto lo = fold_const_int(e->kids[0]);
        auto hi = fold_const_int(e->kids[1]);
        if (!lo || !hi) err(e->pos, "interval bounds in a typing position must be numeric");
        if (*lo > *hi) err(e->pos, "empty interval in typing position");
        return EType::mk_int_bounded(*lo, *hi);
      }
      case EK::Ident: {
        const Sym* s = lookup(e->name);
        if (!s) err(e->pos, "unknown name '" + e->name + "'");
        if (s->ref == EExpr::Ref::CarrierSet) {
          e->ref = EExpr::Ref::CarrierSet;
          for (size_t i = 0; i < model.carrier_names.size(); i++)
            if (model.carrier_names[i] == e->name) return EType::mk_carrier((int)i);
        }
        err(e->pos, "'" + e->name + "' is not usable as a type here");
      }
      case EK::PowOp: return EType::mk_pow(resolve_type_expr(e->kids[0]));
      case EK::Cross:
        return EType::mk_pair(resolve_type_expr(e->kids[0]), resolve_type_expr(e->kids[1]));
      case EK::SetLit: {
        // {red, green}: a ground literal set types the member as its carrier
        ETypePtr t;
        for (auto& k : e->kids) {
          ETypePtr kt = tc(k);
          if (!t) t = kt;
          else if (!t->same(*kt)) err(e->pos, "mixed element types in typing set literal");
        }
        return t;
      }
      case EK::RelAll:
      case EK::RelTotal:
      case EK::RelSurj:
      case EK::RelTotalSurj:
      case EK::Pfun:
      case EK::Tfun:
      case EK::Pinj:
      case EK::Tinj:
      case EK::Psur:
      case EK::Tsur:
      case EK::Bij: {
        ETypePtr a = resolve_type_expr(e->kids[0]);
        ETypePtr b = resolve_type_expr(e->kids[1]);
        return EType::mk_pow(EType::mk_pair(a, b));
      }
      default:
        err(e->pos, "unsupported type expression");
    }
  }

  // ---- expression typechecking (fills e->type, resolves idents)

  ETypePtr tc_int(const EExprPtr& e) {
    ETypePtr t = tc(e);
    if (t->kind != EType::Int) err(e->pos, "expected an integer expression");
    return t;
  }
  ETypePtr tc_bool(const EExprPtr& e) {
    ETypePtr t = tc(e);
    if (t->kind != EType::Bool) err(e->pos, "expected a predicate");
    return t;
  }
  ETypePtr tc_set(const EExprPtr& e) {
    ETypePtr t = tc(e);
    if (t->kind != EType::Pow) err(e->pos, "expected a set expression");
    return t;
  }

  void unify(const EExprPtr& where, ETypePtr& a, ETypePtr b) {
    if (!a) { a = std::move(b); return; }
    if (!b) return;
    // ∅ has type Pow(null); fill the hole from the other side
    if (a->kind == EType::Pow && !a->a && b->kind == EType::Pow) { a = b; return; }
    if (b->kind == EType::Pow && !b->a && a->kind == EType::Pow) return;
    if (!a->same(*b))
      err(where->pos, "type mismatch: " + a->str(model.carrier_names) + " vs " +
                          b->str(model.carrier_names));
  }

  ETypePtr tc(const EExprPtr& e) {
    ETypePtr t = tc_inner(e);
    e->type = t;
    return t;
  }

  // extracts binder typings from the quantifier-body pattern:
  //   forall:  (x ∈ E ∧ y ∈ F ∧ ...) ⇒ Q   (or nested x∈E ⇒ (y∈F ⇒ Q))
  //   exists / comprehension:  x ∈ E ∧ (...)
  void bind_quant(const EExprPtr& e, bool universal) {
    std::map<std::string, ETypePtr> scope;
    std::set<std::string> pending(e->binders.begin(), e->binders.end());
    if (pending.size() != e->binders.size()) err(e->pos, "duplicate bound variable");

    // walk the guard prefix
    EExprPtr body = e->kids[0];
    std::vector<EExprPtr> frontier;
    if (universal) {
      if (body->k != EK::Imp)
        err(e->pos, "universal quantification must have the form \xe2\x88\x80x \xc2\xb7 x \xe2\x88\x88 E \xe2\x87\x92 P");
      frontier.push_back(body->kids[0]);
    } else {
      frontier.push_back(body);
    }
    // collect conjuncts
    std::vector<EExprPtr> conj;
    while (!frontier.empty()) {
      EExprPtr c = frontier.back();
      frontier.pop_back();
      if (c->k == EK::And) {
        frontier.push_back(c->kids[1]);
        frontier.push_back(c->kids[0]);
      } else {
        conj.push_back(c);
      }
    }
    for (auto& c : conj) {
      if (pending.empty()) break;
      if (c->k == EK::In && c->kids[0]->k == EK::Ident &&
          pending.count(c->kids[0]->name)) {
        if (!is_ground_pre(c->kids[1]))
          err(c->pos, "quantifier domain must be ground (constants and carriers only)");
        ETypePtr elem = resolve_type_expr_value(c->kids[1]);
        scope[c->kids[0]->name] = elem;
        pending.erase(c->kids[0]->name);
      }
    }
    if (!pending.empty())
      err(e->pos, "bound variable '" + *pending.begin() +
                      "' needs a typing guard 'x \xe2\x88\x88 E' at the front of the body");
    e->binder_types.clear();
    for (auto& b : e->binders) e->binder_types.push_back(scope[b]);
    quants.push_back(std::move(scope));
  }

  // Ground-ness before resolution: identifiers must not be variables/params.
  bool is_ground_pre(const EExprPtr& e) {
    if (e->k == EK::Ident) {
      const Sym* s = lookup(e->name);
      if (!s) return false;
      return s->ref == EExpr::Ref::Const || s->ref == EExpr::Ref::CarrierSet ||
             s->ref == EExpr::Ref::ExternalFn;
    }
    for (auto& k : e->kids)
      if (!is_ground_pre(k)) return false;
    return true;
  }

  // A set-valued expression used to type a binder: returns element type.
  ETypePtr resolve_type_expr_value(const EExprPtr& e) {
    ETypePtr t = tc(e);
    if (t->kind != EType::Pow || !t->a)
      err(e->pos, "expected a set in a typing position");
    return t->a;
  }

  ETypePtr tc_inner(const EExprPtr& e) {
    switch (e->k) {
      case EK::IntLit: return EType::mk_int();
      case EK::BoolLit: return EType::mk_bool();
      case EK::EmptySet: return EType::mk_pow(nullptr);
      case EK::IntSet: return EType::mk_pow(EType::mk_int());
      case EK::NatSet: {
        auto t = std::make_shared<EType>();
        t->kind = EType::Int;
        t->has_bounds = true;
        t->lo = 0;
        t->hi = -1;
        return EType::mk_pow(t);
      }
      case EK::BoolSet: return EType::mk_pow(EType::mk_bool());

      case EK::Ident: {
        const Sym* s = lookup(e->name);
        if (!s) err(e->pos, "unknown name '" + e->name + "'");
        e->ref = s->ref;
        e->ref_machine = s->mac;
        if (s->ref == EExpr::Ref::CarrierSet) {
          for (size_t i = 0; i < model.carrier_names.size(); i++)
            if (model.carrier_names[i] == e->name)
              return EType::mk_pow(EType::mk_carrier((int)i));
          err(e->pos, "internal: carrier not registered");
        }
        if (!s->type) err(e->pos, "'" + e->name + "' has no resolvable type here");
        return s->type;
      }

      case EK::Not: tc_bool(e->kids[0]); return EType::mk_bool();
      case EK::And:
      case EK::Or:
      case EK::Imp:
      case EK::Eqv:
        tc_bool(e->kids[0]);
        tc_bool(e->kids[1]);
        return EType::mk_bool();

      case EK::Eq:
      case EK::Ne: {
        ETypePtr a = tc(e->kids[0]);
        ETypePtr b = tc(e->kids[1]);
        unify(e, a, b);
        if (a->kind == EType::Pow && !a->a)
          err(e->pos, "cannot infer the element type of \xe2\x88\x85 here");
        return EType::mk_bool();
      }
      case EK::Lt:
      case EK::Le:
      case EK::Gt:
      case EK::Ge:
        tc_int(e->kids[0]);
        tc_int(e->kids[1]);
        return EType::mk_bool();

      case EK::In:
      case EK::NotIn: {
        ETypePtr a = tc(e->kids[0]);
        ETypePtr s = tc_set(e->kids[1]);
        ETypePtr want = EType::mk_pow(a);
        unify(e, s, want);
        return EType::mk_bool();
      }
      case EK::Subset:
      case EK::SSubset: {
        ETypePtr a = tc_set(e->kids[0]);
        ETypePtr b = tc_set(e->kids[1]);
        unify(e, a, b);
        return EType::mk_bool();
      }
      case EK::Finite: tc_set(e->kids[0]); return EType::mk_bool();
      case EK::BoolOf: tc_bool(e->kids[0]); return EType::mk_bool();

      case EK::Add:
      case EK::Sub:
      case EK::Mul:
      case EK::Div:
      case EK::Mod:
      case EK::Exp:
        tc_int(e->kids[0]);
        tc_int(e->kids[1]);
        return EType::mk_int();
      case EK::Neg: tc_int(e->kids[0]); return EType::mk_int();

      case EK::Interval:
        tc_int(e->kids[0]);
        tc_int(e->kids[1]);
        return EType::mk_pow(EType::mk_int());

      case EK::Union:
      case EK::Inter:
      case EK::Diff: {
        ETypePtr a = tc_set(e->kids[0]);
        ETypePtr b = tc_set(e->kids[1]);
        unify(e, a, b);
        return a;
      }
      case EK::Cross: {
        ETypePtr a = tc_set(e->kids[0]);
        ETypePtr b = tc_set(e->kids[1]);
        if (!a->a || !b->a) err(e->pos, "cannot infer element types for \xc3\x97");
        return EType::mk_pow(EType::mk_pair(a->a, b->a));
      }
      case EK::Maplet: {
        ETypePtr a = tc(e->kids[0]);
        ETypePtr b = tc(e->kids[1]);
        return EType::mk_pair(a, b);
      }
      case EK::SetLit: {
        ETypePtr t;
        for (auto& k : e->kids) {
          ETypePtr kt = tc(k);
          unify(e, t, kt);
        }
        return EType::mk_pow(t);
      }
      case EK::PowOp:
      case EK::Pow1Op: {
        ETypePtr s = tc_set(e->kids[0]);
        return EType::mk_pow(s);
      }
      case EK::Card: tc_set(e->kids[0]); return EType::mk_int();
      case EK::MinOp:
      case EK::MaxOp: {
        ETypePtr s = tc_set(e->kids[0]);
        if (!s->a || s->a->kind != EType::Int)
          err(e->pos, "min/max require a set of integers");
        return EType::mk_int();
      }
      case EK::Dom:
      case EK::Ran: {
        ETypePtr s = tc_set(e->kids[0]);
        if (!s->a || s->a->kind != EType::Pair)
          err(e->pos, "dom/ran require a relation");
        return EType::mk_pow(e->k == EK::Dom ? s->a->a : s->a->b);
      }
      case EK::UnionGen:
      case EK::InterGen: {
        ETypePtr s = tc_set(e->kids[0]);
        if (!s->a || s->a->kind != EType::Pow)
          err(e->pos, "generalized union/intersection require a set of sets");
        return s->a;
      }

      case EK::RelAll:
      case EK::RelTotal:
      case EK::RelSurj:
      case EK::RelTotalSurj:
      case EK::Pfun:
      case EK::Tfun:
      case EK::Pinj:
      case EK::Tinj:
      case EK::Psur:
      case EK::Tsur:
      case EK::Bij: {
        ETypePtr a = tc_set(e->kids[0]);
        ETypePtr b = tc_set(e->kids[1]);
        if (!a->a || !b->a) err(e->pos, "cannot infer element types of the relation arrow");
        return EType::mk_pow(EType::mk_pow(EType::mk_pair(a->a, b->a)));
      }

      case EK::App: {
        // external function application or relation image of a maplet
        EExprPtr f = e->kids[0];
        if (f->k == EK::Ident) {
          const Sym* s = lookup(f->name);
          if (s && s->ref == EExpr::Ref::ExternalFn) {
            f->ref = EExpr::Ref::ExternalFn;
            const EbConstant* sig = ext_sigs.at(f->name);
            f->type = s->type;
            size_t n = e->kids.size() - 1;
            if (n != sig->sig_args.size())
              err(e->pos, "'" + f->name + "' expects " +
                              std::to_string(sig->sig_args.size()) + " argument(s)");
            for (size_t i = 0; i < n; i++) {
              ETypePtr at = tc(e->kids[i + 1]);
              if (!at->same(*sig->sig_args[i]))
                err(e->kids[i + 1]->pos, "argument type mismatch in call of '" + f->name + "'");
            }
            return sig->sig_ret;
          }
        }
        // data function application f(x): f must be a relation
        ETypePtr ft = tc(f);
        if (ft->kind != EType::Pow || !ft->a || ft->a->kind != EType::Pair)
          err(e->pos, "application requires a function (relation-typed expression)");
        if (e->kids.size() != 2)
          err(e->pos, "data function application takes one argument");
        ETypePtr at = tc(e->kids[1]);
        if (!at->same(*ft->a->a)) err(e->kids[1]->pos, "argument type mismatch");
        return ft->a->b;
      }

      case EK::Forall:
      case EK::Exists: {
        bind_quant(e, e->k == EK::Forall);
        tc_bool(e->kids[0]);
        quants.pop_back();
        return EType::mk_bool();
      }
      case EK::SetComp: {
        // {z · P | E}: P must start with a typing guard for each binder
        bind_quant_comp(e);
        tc_bool(e->kids[0]);
        ETypePtr et = tc(e->kids[1]);
        quants.pop_back();
        return EType::mk_pow(et);
      }
      case EK::QUnion:
      case EK::QInter: {
        bind_quant_comp(e);
        tc_bool(e->kids[0]);
        ETypePtr st = tc_set(e->kids[1]);
        quants.pop_back();
        return st;
      }
      case EK::Partition: {
        ETypePtr s = tc_set(e->kids[0]);
        for (size_t i = 1; i < e->kids.size(); i++) {
          ETypePtr pt = tc_set(e->kids[i]);
          unify(e, s, pt);
        }
        return EType::mk_bool();
      }
    }
    err(e->pos, "internal: unhandled expression kind");
  }

  // existential-style binder typing used by SetComp/QUnion/QInter
  void bind_quant_comp(const EExprPtr& e) {
    bool saved = true;
    (void)saved;
    // reuse the exists-pattern: conjunction starting with typing guards
    EExprPtr body = e->kids[0];
    std::map<std::string, ETypePtr> scope;
    std::set<std::string> pending(e->binders.begin(), e->binders.end());
    if (pending.size() != e->binders.size()) err(e->pos, "duplicate bound variable");
    std::vector<EExprPtr> conj;
    std::vector<EExprPtr> frontier{body};
    while (!frontier.empty()) {
      EExprPtr c = frontier.back();
      frontier.pop_back();
      if (c->k == EK::And) {
        frontier.push_back(c->kids[1]);
        frontier.push_back(c->kids[0]);
      } else {
        conj.push_back(c);
      }
    }
    for (auto& c : conj) {
      if (pending.empty()) break;
      if (c->k == EK::In && c->kids[0]->k == EK::Ident && pending.count(c->kids[0]->name)) {
        if (!is_ground_pre(c->kids[1]))
          err(c->pos, "binder domain must be ground (constants and carriers only)");
        scope[c->kids[0]->name] = resolve_type_expr_value(c->kids[1]);
        pending.erase(c->kids[0]->name);
      }
    }
    if (!pending.empty())
      err(e->pos, "bound variable '" + *pending.begin() +
                      "' needs a typing guard 'x \xe2\x88\x88 E' at the front of the predicate");
    e->binder_types.clear();
    for (auto& b : e->binders) e->binder_types.push_back(scope[b]);
    quants.push_back(std::move(scope));
  }
};

// ---------------------------------------------------------------- driver

void check_dup_labels(const std::vector<std::string>& labels, const SourcePos& pos,
                      const std::string& what) {
  std::set<std::string> seen;
  for (auto& l : labels)
    if (!seen.insert(l).second)
      throw CompileError(pos, "duplicate label '@" + l + "' in " + what);
}

bool typing_shape(const EExprPtr& p, const std::string& name) {
  return (p->k == EK::In || p->k == EK::Subset) && p->kids[0]->k == EK::Ident &&
         p->kids[0]->name == name;
}

}  // namespace

const EbContext* EbModel::find_context(const std::string& n) const {
  for (auto& c : contexts)
    if (c.name == n) return &c;
  return nullptr;
}
const EbMachine* EbModel::find_machine(const std::string& n) const {
  for (auto& m : machines)
    if (m.name == n) return &m;
  return nullptr;
}
int EbModel::machine_index(const std::string& n) const {
  for (size_t i = 0; i < machines.size(); i++)
    if (machines[i].name == n) return (int)i;
  return -1;
}

EbModel resolve_and_typecheck(std::vector<ParsedUnit> units) {
  EbModel model;
  for (auto& u : units) {
    if (std::holds_alternative<EbContext>(u))
      model.contexts.push_back(std::move(std::get<EbContext>(u)));
    else
      model.machines.push_back(std::move(std::get<EbMachine>(u)));
  }

  // order contexts so that extended contexts come first
  {
    std::vector<EbContext> ordered;
    std::set<std::string> done;
    size_t guard = 0;
    while (ordered.size() < model.contexts.size()) {
      bool progress = false;
      for (auto& c : model.contexts) {
        if (done.count(c.name)) continue;
        if (!c.extends || done.count(*c.extends)) {
          if (c.extends && !model.find_context(*c.extends))
            throw CompileError(c.pos, "extended context '" + *c.extends + "' not found");
          ordered.push_back(c);
          done.insert(c.name);
          progress = true;
        }
      }
      if (!progress || ++guard > model.contexts.size() + 1)
        throw CompileError(model.contexts[0].pos, "cycle in context 'extends' chain");
    }
    model.contexts = std::move(ordered);
  }

  // order machines abstract-first along refines chains
  {
    std::vector<EbMachine> ordered;
    std::set<std::string> done;
    size_t guard = 0;
    while (ordered.size() < model.machines.size()) {
      bool progress = false;
      for (auto& m : model.machines) {
        if (done.count(m.name)) continue;
        if (!m.refines || done.count(*m.refines)) {
          if (m.refines) {
            bool found = false;
            for (auto& o : model.machines)
              if (o.name == *m.refines) found = true;
            if (!found)
              throw CompileError(m.pos, "refined machine '" + *m.refines + "' not found");
          }
          ordered.push_back(m);
          done.insert(m.name);
          progress = true;
        }
      }
      if (!progress || ++guard > model.machines.size() + 1)
        throw CompileError(model.machines[0].pos, "cycle in machine 'refines' chain");
    }
    model.machines = std::move(ordered);
  }

  Checker ck{model};

  // ---- contexts: carriers, constants, axioms
  std::set<std::string> names_taken;
  for (auto& c : model.contexts) {
    if (!names_taken.insert(c.name).second)
      throw CompileError(c.pos, "duplicate component name '" + c.name + "'");
    for (auto& s : c.sets) {
      if (ck.globals.count(s.name))
        throw CompileError(s.pos, "duplicate name '" + s.name + "'");
      s.id = (int)model.carrier_names.size();
      model.carrier_names.push_back(s.name);
      model.carrier_sizes.push_back(s.size);
      ck.globals[s.name] = Sym{EExpr::Ref::CarrierSet, nullptr, -1};
    }
  }
  for (auto& c : model.contexts) {
    for (auto& k : c.constants) {
      if (ck.globals.count(k.name)) throw CompileError(k.pos, "duplicate name '" + k.name + "'");
      if (k.external) {
        // signature must be a function arrow over scalar-ish element sets
        const EExprPtr& te = k.type_expr;
        bool arrow = te->k == EK::Tfun || te->k == EK::Pfun || te->k == EK::Tinj ||
                     te->k == EK::Pinj || te->k == EK::Tsur || te->k == EK::Psur ||
                     te->k == EK::Bij;
        if (!arrow)
          throw CompileError(te->pos, "external constant '" + k.name +
                                          "' needs a function type (e.g. S \xe2\x86\x92 T)");
        ETypePtr dom = ck.resolve_type_expr(te->kids[0]);
        ETypePtr ret = ck.resolve_type_expr(te->kids[1]);
        // flatten left-nested pair domain into an argument list
        std::vector<ETypePtr> args;
        std::function<void(const ETypePtr&)> flat = [&](const ETypePtr& t) {
          if (t->kind == EType::Pair) {
            flat(t->a);
            args.push_back(t->b);
          } else {
            args.push_back(t);
          }
        };
        flat(dom);
        k.sig_args = std::move(args);
        k.sig_ret = ret;
        k.type = EType::mk_pow(EType::mk_pair(dom, ret));
        ck.globals[k.name] = Sym{EExpr::Ref::ExternalFn, k.type, -1};
        ck.ext_sigs[k.name] = &k;
      } else {
        k.type = ck.resolve_type_expr(k.type_expr);
        ck.globals[k.name] = Sym{EExpr::Ref::Const, k.type, -1};
      }
    }
  }
  for (auto& c : model.contexts) {
    std::vector<std::string> labels;
    for (auto& a : c.axioms) {
      labels.push_back(a.label);
      ck.tc_bool(a.pred);
    }
    check_dup_labels(labels, c.pos, "context '" + c.name + "'");
  }

  // ---- machines
  for (size_t mi = 0; mi < model.machines.size(); mi++) {
    EbMachine& m = model.machines[mi];
    if (!names_taken.insert(m.name).second)
      throw CompileError(m.pos, "duplicate component name '" + m.name + "'");
    for (auto& s : m.sees)
      if (!model.find_context(s))
        throw CompileError(m.pos, "context '" + s + "' not found");

    ck.vars.clear();
    ck.abs_vars.clear();

    // ancestor variables (for gluing invariants and witnesses)
    std::set<std::string> own;
    for (auto& v : m.variables) {
      if (!own.insert(v.name).second)
        throw CompileError(v.pos, "duplicate variable '" + v.name + "'");
      if (ck.globals.count(v.name))
        throw CompileError(v.pos, "variable '" + v.name + "' clashes with a global name");
    }
    {
      const EbMachine* anc = m.refines ? model.find_machine(*m.refines) : nullptr;
      while (anc) {
        int ai = model.machine_index(anc->name);
        for (auto& av : anc->variables)
          if (!own.count(av.name) && !ck.abs_vars.count(av.name))
            ck.abs_vars[av.name] = Sym{EExpr::Ref::AbsVar, av.type, ai};
        anc = anc->refines ? model.find_machine(*anc->refines) : nullptr;
      }
    }

    // variable types from the first typing invariant
    for (auto& inv : m.invariants) {
      if (inv.pred->k != EK::In && inv.pred->k != EK::Subset) continue;
      if (inv.pred->kids[0]->k != EK::Ident) continue;
      const std::string& vn = inv.pred->kids[0]->name;
      if (!own.count(vn)) continue;
      if (!ck.is_ground_pre(inv.pred->kids[1])) continue;
      for (size_t vi = 0; vi < m.variables.size(); vi++) {
        EbVariable& v = m.variables[vi];
        if (v.name != vn || v.type) continue;
        ETypePtr elem = ck.resolve_type_expr(inv.pred->kids[1]);
        v.type = inv.pred->k == EK::In ? elem : EType::mk_pow(elem);
        v.type_expr = inv.pred->kids[1];
        inv.kind = InvKind::Typing;
        inv.typed_var = (int)vi;
      }
    }
    for (auto& v : m.variables) {
      if (!v.type)
        throw CompileError(v.pos, "variable '" + v.name +
                                      "' has no typing invariant (v \xe2\x88\x88 E or v \xe2\x8a\x86 E)");
      ck.vars[v.name] = Sym{EExpr::Ref::Var, v.type, (int)mi};
    }

    // invariants: typecheck + classify
    std::vector<std::string> ilabels;
    for (auto& inv : m.invariants) {
      ilabels.push_back(inv.label);
      ck.tc_bool(inv.pred);
      if (inv.kind == InvKind::Typing) continue;
      // gluing iff it mentions an abstract (non-persisting) variable
      bool glue = false;
      std::function<void(const EExprPtr&)> scan = [&](const EExprPtr& e) {
        if (e->k == EK::Ident && e->ref == EExpr::Ref::AbsVar) glue = true;
        for (auto& k : e->kids) scan(k);
      };
      scan(inv.pred);
      inv.kind = glue ? InvKind::Gluing : InvKind::Safety;
    }
    check_dup_labels(ilabels, m.pos, "machine '" + m.name + "'");

    // events
    const EbMachine* parent = m.refines ? model.find_machine(*m.refines) : nullptr;
    std::set<std::string> evnames;
    auto check_event = [&](EbEvent& ev, bool is_init) {
      ck.params.clear();
      std::set<std::string> pnames;
      for (auto& p : ev.params) {
        if (!pnames.insert(p).second)
          throw CompileError(ev.pos, "duplicate parameter '" + p + "'");
        if (ck.vars.count(p) || ck.globals.count(p))
          throw CompileError(ev.pos, "parameter '" + p + "' shadows another name");
      }
      // resolve parameter types from typing-shaped guards first
      ev.param_types.assign(ev.params.size(), nullptr);
      for (auto& g : ev.guards) {
        for (size_t pi = 0; pi < ev.params.size(); pi++) {
          if (ev.param_types[pi]) continue;
          if (!typing_shape(g.pred, ev.params[pi])) continue;
          if (!ck.is_ground_pre(g.pred->kids[1])) continue;
          ETypePtr elem = ck.resolve_type_expr(g.pred->kids[1]);
          ev.param_types[pi] = g.pred->k == EK::In ? elem : EType::mk_pow(elem);
          g.is_typing = true;
        }
      }
      for (size_t pi = 0; pi < ev.params.size(); pi++) {
        if (!ev.param_types[pi])
          throw CompileError(ev.pos, "parameter '" + ev.params[pi] +
                                         "' of event '" + ev.name +
                                         "' has no typing guard");
        ck.params[ev.params[pi]] = Sym{EExpr::Ref::Param, ev.param_types[pi], -1};
      }
      std::vector<std::string> labels;
      for (auto& g : ev.guards) {
        labels.push_back(g.label);
        ck.tc_bool(g.pred);
      }
      // witnesses: label names an abstract parameter of the refined event
      if (!ev.witnesses.empty()) {
        if (!ev.refines || !parent)
          throw CompileError(ev.pos, "witness in an event that refines nothing");
        const EbEvent* aev = nullptr;
        for (auto& pe : parent->events)
          if (pe.name == *ev.refines) aev = &pe;
        if (!aev) throw CompileError(ev.pos, "refined event '" + *ev.refines + "' not found");
        for (auto& w : ev.witnesses) {
          labels.push_back(w.label);
          int api = -1;
          for (size_t i = 0; i < aev->params.size(); i++)
            if (aev->params[i] == w.label) api = (int)i;
          if (api < 0)
            throw CompileError(w.pos, "witness label '@" + w.label +
                                          "' is not a parameter of event '" + aev->name + "'");
          if (w.pred->k != EK::Eq || w.pred->kids[0]->k != EK::Ident ||
              w.pred->kids[0]->name != w.label)
            throw CompileError(w.pos, "witness must be an equality '" + w.label + " = <expr>'");
          ck.params[w.label] = Sym{EExpr::Ref::Param, aev->param_types[api], -1};
          ck.tc_bool(w.pred);
          ck.params.erase(w.label);
        }
      }
      if (ev.refines && parent) {
        const EbEvent* aev = nullptr;
        for (auto& pe : parent->events)
          if (pe.name == *ev.refines) aev = &pe;
        if (!aev) throw CompileError(ev.pos, "refined event '" + *ev.refines + "' not found");
        for (size_t i = 0; i < aev->params.size(); i++) {
          const std::string& ap = aev->params[i];
          bool retained = pnames.count(ap) > 0;
          bool witnessed = false;
          for (auto& w : ev.witnesses)
            if (w.label == ap) witnessed = true;
          if (!retained && !witnessed)
            throw CompileError(ev.pos, "abstract parameter '" + ap +
                                           "' needs a witness in event '" + ev.name + "'");
          if (retained) {
            // same-name parameter must keep its type
            for (size_t pi = 0; pi < ev.params.size(); pi++)
              if (ev.params[pi] == ap && !ev.param_types[pi]->same(*aev->param_types[i]))
                throw CompileError(ev.pos, "retained parameter '" + ap + "' changed type");
          }
        }
      } else if (ev.refines && !parent) {
        throw CompileError(ev.pos, "event refines '" + *ev.refines +
                                       "' but the machine refines nothing");
      }
      // actions
      std::set<std::string> assigned;
      for (auto& a : ev.actions) {
        labels.push_back(a.label);
        auto vit = ck.vars.find(a.lhs);
        if (vit == ck.vars.end())
          throw CompileError(a.pos, "assignment target '" + a.lhs +
                                        "' is not a variable of this machine");
        if (!assigned.insert(a.lhs).second)
          throw CompileError(a.pos, "variable '" + a.lhs + "' assigned twice in one event");
        ETypePtr rt = ck.tc(a.rhs);
        ETypePtr vt = vit->second.type;
        ck.unify(a.rhs, rt, vt);
      }
      if (is_init) {
        if (!ev.guards.empty() || !ev.params.empty())
          throw CompileError(ev.pos, "initialisation takes no guards or parameters");
        for (auto& v : m.variables)
          if (!assigned.count(v.name))
            throw CompileError(ev.pos, "initialisation does not assign '" + v.name + "'");
        for (auto& a : ev.actions)
          if (!ck.is_ground_pre(a.rhs))
            throw CompileError(a.pos, "initialisation must assign ground expressions");
      }
      check_dup_labels(labels, ev.pos, "event '" + ev.name + "'");
      ck.params.clear();
    };

    check_event(m.init, true);
    for (auto& ev : m.events) {
      if (!evnames.insert(ev.name).second)
        throw CompileError(ev.pos, "duplicate event '" + ev.name + "'");
      check_event(ev, false);
    }
  }

  return model;
}

}  // namespace ebv::eb
