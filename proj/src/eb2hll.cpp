#include "ebv/eb2hll.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "ebv/hll_check.hpp"
#include "ebv/hll_parse.hpp"
#include "ebv/hll_print.hpp"

namespace ebv {
namespace {

using eb::EExpr;
using eb::EExprPtr;
using eb::EK;
using eb::EType;
using eb::ETypePtr;
using hll::HExpr;
using hll::HExprPtr;
using hll::HK;
using hll::HType;
using hll::HTypePtr;

[[noreturn]] void err(SourcePos pos, const std::string& msg) {
  throw CompileError(pos, msg);
}

// ------------------------------------------------------------ IR builders

HExprPtr hx(HK k) { return HExpr::mk(k, SourcePos{}); }

HExprPtr h_int(i128 v) {
  auto e = hx(HK::IntLit);
  e->ival = v;
  return e;
}
HExprPtr h_bool(bool b) {
  auto e = hx(HK::BoolLit);
  e->bval = b;
  return e;
}
HExprPtr h_name(const std::string& n) {
  auto e = hx(HK::Name);
  e->name = n;
  return e;
}
HExprPtr h_un(HK k, HExprPtr a) {
  auto e = hx(k);
  e->kids = {std::move(a)};
  return e;
}
HExprPtr h_bin(HK k, HExprPtr a, HExprPtr b) {
  auto e = hx(k);
  e->kids = {std::move(a), std::move(b)};
  return e;
}

HExprPtr h_not(HExprPtr a) {
  // fold double negation and literals for readable output
  if (a->k == HK::BoolLit) return h_bool(!a->bval);
  if (a->k == HK::Not) return a->kids[0];
  return h_un(HK::Not, std::move(a));
}
HExprPtr h_and(HExprPtr a, HExprPtr b) {
  if (a->k == HK::BoolLit) return a->bval ? b : a;
  if (b->k == HK::BoolLit) return b->bval ? a : b;
  return h_bin(HK::And, std::move(a), std::move(b));
}
HExprPtr h_or(HExprPtr a, HExprPtr b) {
  if (a->k == HK::BoolLit) return a->bval ? a : b;
  if (b->k == HK::BoolLit) return b->bval ? b : a;
  return h_bin(HK::Or, std::move(a), std::move(b));
}
HExprPtr h_imp(HExprPtr a, HExprPtr b) {
  if (a->k == HK::BoolLit) return a->bval ? b : h_bool(true);
  if (b->k == HK::BoolLit && b->bval) return b;
  return h_bin(HK::Imp, std::move(a), std::move(b));
}
HExprPtr h_ite(HExprPtr c, HExprPtr t, HExprPtr e) {
  auto x = hx(HK::Ite);
  x->kids = {std::move(c), std::move(t), std::move(e)};
  return x;
}
HExprPtr h_idx(HExprPtr arr, HExprPtr i) { return h_bin(HK::Index, std::move(arr), std::move(i)); }

HExprPtr h_add(HExprPtr a, i128 c) {
  if (c == 0) return a;
  if (a->k == HK::IntLit) return h_int(a->ival + c);
  if (a->k == HK::Add && a->kids[1]->k == HK::IntLit) {
    i128 d = a->kids[1]->ival + c;
    return h_add(a->kids[0], d);
  }
  return h_bin(HK::Add, std::move(a), h_int(c));
}
HExprPtr h_sub(HExprPtr a, i128 c) { return h_add(std::move(a), -c); }

HExprPtr h_conj(std::vector<HExprPtr> xs) {
  HExprPtr r = h_bool(true);
  for (auto& x : xs) r = h_and(std::move(r), std::move(x));
  return r;
}
HExprPtr h_disj(std::vector<HExprPtr> xs) {
  HExprPtr r = h_bool(false);
  for (auto& x : xs) r = h_or(std::move(r), std::move(x));
  return r;
}

HExprPtr h_clone(const HExprPtr& e) {
  auto c = std::make_shared<HExpr>(*e);
  c->type = nullptr;
  c->ref = HExpr::Ref::Unres;
  c->ref_id = c->enum_val = c->instance = c->block = -1;
  for (auto& k : c->kids) k = h_clone(k);
  return c;
}

hll::HBinder h_binder(const std::string& var, i128 lo, i128 hi) {
  hll::HBinder b;
  b.var = var;
  b.lo = h_int(lo);
  b.hi = h_int(hi);
  return b;
}

HExprPtr h_quant(HK k, std::vector<hll::HBinder> bs, HExprPtr body) {
  if (body->k == HK::BoolLit && (body->bval ? k == HK::All : k == HK::Some))
    return body;  // constant regardless of the ranges
  auto e = hx(k);
  e->binders = std::move(bs);
  e->kids = {std::move(body)};
  return e;
}

// ------------------------------------------------------------ value spaces

// Closed integer interval of scalar values a dimension ranges over.
struct Space {
  i128 lo = 0, hi = 0;
  i128 size() const { return hi - lo + 1; }
  bool contains(const Space& o) const { return o.lo >= lo && o.hi <= hi; }
};

Space hull(const Space& a, const Space& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// ------------------------------------------------------------ translator

struct Translator {
  const eb::FlatMachine& fm;
  const TranslationConfig& cfg;
  Translation out;
  hll::HllModel& m = out.model;
  int ns_sys = 0, ns_con = 0, ns_ver = 0;

  // emitted global names (streams + blocks), for collision checks
  std::set<std::string> names;
  // element spaces per dimension of every set-typed stream
  std::map<std::string, std::vector<Space>> stream_spaces;
  // enumerated-carrier constants pinned to ordinals
  std::map<std::string, i128> pinned;
  // axioms consumed by carrier enumeration (index into fm.axioms)
  std::set<size_t> consumed_axioms;
  // event parameter -> input stream name
  std::map<std::string, std::map<std::string, std::string>> param_stream;  // event -> param -> stream
  // block name -> number of contract constraints
  std::map<std::string, int> block_contracts;

  // open binders: quantifiers and definition index binders, innermost last
  struct OpenBinder {
    std::string name;  // IR binder name
    Space range;       // values the binder's value expression takes
  };
  std::vector<OpenBinder> open_binders;
  // Event-B bound variable -> IR value expression
  std::vector<std::pair<std::string, HExprPtr>> qenv;

  // translation context
  const eb::EbEvent* cur_event = nullptr;  // leaf event for parameter lookup
  int witness_level = -1;                  // >= 0 inside a witness predicate
  // active external-function contract substitution: fn -> output expression
  std::map<std::string, HExprPtr> extfn_subst;

  // pending well-definedness obligations
  struct Wd {
    std::string label;
    HExprPtr cond;  // already closed over open binders
    HExprPtr sel;   // null: holds unconditionally
  };
  std::vector<Wd> wds;
  HExprPtr wd_sel;  // current guard context (SEL_<event> name or null)
  int wd_seq = 0;
  int binder_seq = 0;

  Translator(const eb::FlatMachine& f, const TranslationConfig& c) : fm(f), cfg(c) {}

  // ---------------------------------------------------------- small helpers

  i128 carrier_size(int id) const { return fm.model->carrier_sizes[id]; }
  const std::string& carrier_name(int id) const { return fm.model->carrier_names[id]; }

  static SourcePos vpos(const eb::FlatVariable& v) {
    return v.type_expr ? v.type_expr->pos : SourcePos{};
  }

  Space int_window(bool is_nat) const {
    i128 one = 1;
    if (is_nat) return {0, (one << cfg.int_width) - 1};
    return {-(one << (cfg.int_width - 1)), (one << (cfg.int_width - 1)) - 1};
  }

  Space scalar_space(const ETypePtr& t, SourcePos pos) const {
    switch (t->kind) {
      case EType::Bool: return {0, 1};
      case EType::Carrier: return {0, carrier_size(t->carrier) - 1};
      case EType::Int:
        if (!t->has_bounds) return int_window(false);
        if (t->hi < t->lo) return int_window(true);  // NAT: open upper bound
        return {t->lo, t->hi};
      default: err(pos, "expected a scalar type");
    }
  }

  // flattened per-dimension spaces of a (possibly pair) element type
  std::vector<Space> dims_of(const ETypePtr& t, SourcePos pos) const {
    if (t && t->kind == EType::Pair) {
      auto a = dims_of(t->a, pos);
      auto b = dims_of(t->b, pos);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    if (!t) err(pos, "the element type of this set is unconstrained");
    return {scalar_space(t, pos)};
  }

  HTypePtr h_scalar_type(const ETypePtr& t, SourcePos pos) const {
    if (t->kind == EType::Bool) return HType::mk_bool();
    Space s = scalar_space(t, pos);
    return HType::mk_int(s.lo, s.hi);
  }

  // full IR type: scalars map directly, sets become bool arrays
  HTypePtr h_type_of(const ETypePtr& t, SourcePos pos) const {
    if (t->kind == EType::Pow) {
      auto ds = dims_of(t->a, pos);
      HTypePtr r = HType::mk_bool();
      for (auto it = ds.rbegin(); it != ds.rend(); ++it)
        r = HType::mk_array(r, it->size());
      return r;
    }
    if (t->kind == EType::Pair) err(pos, "pair-valued variables are not supported; use a relation");
    return h_scalar_type(t, pos);
  }

  std::string fresh_binder() {
    static const char* pool[] = {"i", "j", "k", "l"};
    for (const char* c : pool) {
      std::string n = c;
      if (names.count(n) || hll::is_reserved_word(n)) continue;
      bool open = false;
      for (auto& ob : open_binders) open |= ob.name == n;
      for (auto& q : qenv) open |= q.first == n;
      if (!open) return n;
    }
    return "q" + std::to_string(binder_seq++);
  }

  // a bound-variable name from the source, uniquified against the model
  std::string binder_name(const std::string& want) {
    std::string n = want;
    if (names.count(n) || hll::is_reserved_word(n)) n = want + "_q";
    while (true) {
      bool open = false;
      for (auto& ob : open_binders) open |= ob.name == n;
      if (!open && !names.count(n) && !hll::is_reserved_word(n)) return n;
      n += "_q";
    }
  }

  // ---------------------------------------------------------- registration

  int add_stream(const std::string& name, HTypePtr type, int ns, SourcePos pos,
                 bool is_const = false, HExprPtr value = nullptr) {
    if (hll::is_reserved_word(name)) err(pos, "'" + name + "' is reserved in the IR");
    if (!names.insert(name).second) err(pos, "translated name '" + name + "' collides with an earlier stream");
    hll::HStream s;
    s.name = name;
    s.type = std::move(type);
    s.ns = ns;
    s.pos = pos;
    s.is_const = is_const;
    s.const_value = std::move(value);
    m.stream_ids[name] = (int)m.streams.size();
    m.streams.push_back(std::move(s));
    return (int)m.streams.size() - 1;
  }

  void add_block(const std::string& name, std::vector<HTypePtr> args, HTypePtr ret,
                 int ns, SourcePos pos) {
    if (hll::is_reserved_word(name)) err(pos, "'" + name + "' is reserved in the IR");
    if (!names.insert(name).second) err(pos, "translated name '" + name + "' collides with an earlier stream");
    hll::HBlockDecl b;
    b.name = name;
    b.args = std::move(args);
    b.ret = std::move(ret);
    b.ns = ns;
    b.pos = pos;
    m.block_ids[name] = (int)m.blocks.size();
    m.blocks.push_back(std::move(b));
    block_contracts[name] = 0;
  }

  void add_def(hll::HDef::Kind kind, const std::string& target,
               std::vector<std::string> binders, HExprPtr rhs, int ns,
               bool comma = false) {
    hll::HDef d;
    d.kind = kind;
    d.comma_form = comma;
    d.target = target;
    for (auto& b : binders) {
      hll::PathSeg seg;
      seg.binder = b;
      d.path.push_back(seg);
    }
    d.rhs = std::move(rhs);
    d.ns = ns;
    m.defs.push_back(std::move(d));
  }

  void add_constraint(const std::string& label, HExprPtr e, int ns) {
    if (e->k == HK::BoolLit && e->bval) return;  // vacuous, mostly typing
    hll::HProp p;
    p.label = label;
    p.expr = std::move(e);
    p.ns = ns;
    m.constraints.push_back(std::move(p));
  }

  void add_obligation(const std::string& label, HExprPtr e, int ns) {
    hll::HProp p;
    p.label = label;
    p.expr = std::move(e);
    p.ns = ns;
    m.obligations.push_back(std::move(p));
  }

  // ---------------------------------------------------------- wd collection

  // close a condition over the currently open binders so it is well formed
  // at the top level, then queue it as an obligation
  void queue_wd(const std::string& kind, HExprPtr cond, SourcePos pos) {
    (void)pos;
    for (auto it = open_binders.rbegin(); it != open_binders.rend(); ++it)
      cond = h_quant(HK::All, {h_binder(it->name, it->range.lo, it->range.hi)}, std::move(cond));
    Wd w;
    w.label = "wd_" + kind + "_" + std::to_string(wd_seq++);
    w.cond = std::move(cond);
    w.sel = wd_sel ? h_clone(wd_sel) : nullptr;
    wds.push_back(std::move(w));
  }

  // ---------------------------------------------------------- EB-side folding

  // folds literals and pinned enumeration constants; nullopt otherwise
  std::optional<i128> eb_fold(const EExprPtr& e) const {
    switch (e->k) {
      case EK::IntLit: return e->ival;
      case EK::BoolLit: return e->bval ? 1 : 0;
      case EK::Ident: {
        auto it = pinned.find(e->name);
        if (it != pinned.end()) return it->second;
        return std::nullopt;
      }
      case EK::Neg: {
        auto a = eb_fold(e->kids[0]);
        if (a) return -*a;
        return std::nullopt;
      }
      case EK::Add:
      case EK::Sub:
      case EK::Mul: {
        auto a = eb_fold(e->kids[0]), b = eb_fold(e->kids[1]);
        if (!a || !b) return std::nullopt;
        if (e->k == EK::Add) return *a + *b;
        if (e->k == EK::Sub) return *a - *b;
        return *a * *b;
      }
      default: return std::nullopt;
    }
  }

  // conservative value interval of a scalar expression (used to size
  // quantifier hulls; correctness never depends on tightness because
  // characteristic formulas carry their own range guards)
  Space iv_of(const EExprPtr& e) {
    if (auto c = eb_fold(e)) return {*c, *c};
    switch (e->k) {
      case EK::Ident:
        switch (e->ref) {
          case EExpr::Ref::Var:
          case EExpr::Ref::AbsVar: {
            const eb::FlatVariable* v = fm.find_variable(e->name);
            if (v && v->type->kind != EType::Pow) return scalar_space(v->type, e->pos);
            break;
          }
          case EExpr::Ref::Const:
            if (e->type && e->type->kind != EType::Pow) return scalar_space(e->type, e->pos);
            break;
          case EExpr::Ref::Param:
          case EExpr::Ref::QuantVar:
            if (e->type && e->type->kind != EType::Pow) return scalar_space(e->type, e->pos);
            break;
          default: break;
        }
        break;
      case EK::Add: {
        Space a = iv_of(e->kids[0]), b = iv_of(e->kids[1]);
        return {a.lo + b.lo, a.hi + b.hi};
      }
      case EK::Sub: {
        Space a = iv_of(e->kids[0]), b = iv_of(e->kids[1]);
        return {a.lo - b.hi, a.hi - b.lo};
      }
      case EK::Neg: {
        Space a = iv_of(e->kids[0]);
        return {-a.hi, -a.lo};
      }
      case EK::Mul: {
        Space a = iv_of(e->kids[0]), b = iv_of(e->kids[1]);
        i128 c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        return {std::min({c[0], c[1], c[2], c[3]}), std::max({c[0], c[1], c[2], c[3]})};
      }
      case EK::Card: {
        auto ds = space_dims(e->kids[0]);
        i128 n = 1;
        for (auto& d : ds) n *= d.size();
        return {0, n};
      }
      case EK::MinOp:
      case EK::MaxOp: {
        auto ds = space_dims(e->kids[0]);
        Space s = ds.empty() ? Space{0, 0} : ds[0];
        return hull(s, {0, 0});  // empty selection gives 0
      }
      case EK::App: {
        if (e->kids[0]->k == EK::Ident && e->kids[0]->ref == EExpr::Ref::ExternalFn) {
          const eb::EbConstant* c = find_constant(e->kids[0]->name);
          if (c && c->sig_ret) return scalar_space(c->sig_ret, e->pos);
        }
        auto ds = space_dims(e->kids[0]);
        Space s = ds.empty() ? Space{0, 0} : ds.back();
        return hull(s, {0, 0});
      }
      case EK::BoolOf: return {0, 1};
      default: break;
    }
    if (e->type && e->type->kind != EType::Pow && e->type->kind != EType::Pair)
      return scalar_space(e->type, e->pos);
    return int_window(false);
  }

  const eb::EbConstant* find_constant(const std::string& n) const {
    for (auto& c : fm.constants)
      if (c.name == n) return &c;
    return nullptr;
  }

  // ---------------------------------------------------------- element spaces

  // per-dimension element spaces of a set expression (hull over the parts)
  std::vector<Space> space_dims(const EExprPtr& e) {
    switch (e->k) {
      case EK::Ident:
        if (e->ref == EExpr::Ref::CarrierSet) {
          int id = e->type->a->carrier;
          return {{0, carrier_size(id) - 1}};
        }
        {
          auto it = stream_spaces.find(stream_of(e));
          if (it != stream_spaces.end()) return it->second;
        }
        break;
      case EK::EmptySet: return {};
      case EK::IntSet: return {int_window(false)};
      case EK::NatSet: return {int_window(true)};
      case EK::BoolSet: return {{0, 1}};
      case EK::Interval: return {hull(iv_of(e->kids[0]), iv_of(e->kids[1]))};
      case EK::SetLit: {
        std::vector<Space> r;
        for (auto& k : e->kids) {
          auto t = tuple_spaces(k);
          if (r.empty()) r = t;
          else
            for (size_t i = 0; i < r.size() && i < t.size(); i++) r[i] = hull(r[i], t[i]);
        }
        return r;
      }
      case EK::Union:
      case EK::Inter: {
        auto a = space_dims(e->kids[0]), b = space_dims(e->kids[1]);
        if (a.empty()) return b;
        if (b.empty()) return a;
        for (size_t i = 0; i < a.size() && i < b.size(); i++) a[i] = hull(a[i], b[i]);
        return a;
      }
      case EK::Diff: return space_dims(e->kids[0]);
      case EK::Cross: {
        auto a = space_dims(e->kids[0]), b = space_dims(e->kids[1]);
        a.insert(a.end(), b.begin(), b.end());
        return a;
      }
      case EK::Dom: {
        auto r = space_dims(e->kids[0]);
        size_t nl = dom_arity(e->kids[0]);
        r.resize(std::min(r.size(), nl));
        return r;
      }
      case EK::Ran: {
        auto r = space_dims(e->kids[0]);
        size_t nl = dom_arity(e->kids[0]);
        if (nl < r.size()) r.erase(r.begin(), r.begin() + nl);
        return r;
      }
      case EK::UnionGen:
      case EK::InterGen: {
        // family given literally or by comprehension; hull of the members
        const EExprPtr& fam = e->kids[0];
        if (fam->k == EK::SetLit && !fam->kids.empty()) {
          auto r = space_dims(fam->kids[0]);
          for (size_t i = 1; i < fam->kids.size(); i++) {
            auto o = space_dims(fam->kids[i]);
            if (o.size() != r.size())
              err(e->pos, "mixed element widths across the family");
            for (size_t d = 0; d < r.size(); d++) r[d] = hull(r[d], o[d]);
          }
          return r;
        }
        if (fam->k == EK::SetComp) return tuple_spaces_quant(fam, nullptr);
        err(e->pos,
            "generalized union/intersection need a set literal or a "
            "comprehension family");
      }
      case EK::SetComp: {
        // spaces of the shaped expression under the binder typing
        return tuple_spaces_quant(e, e->kids[1]);
      }
      case EK::QUnion:
      case EK::QInter: return tuple_spaces_quant(e, nullptr);
      default: break;
    }
    // fall back to the typed element shape
    if (e->type && e->type->kind == EType::Pow && e->type->a)
      return dims_of(e->type->a, e->pos);
    err(e->pos, "cannot determine the element space of this set expression");
  }

  size_t dom_arity(const EExprPtr& rel) const {
    if (rel->type && rel->type->kind == EType::Pow && rel->type->a &&
        rel->type->a->kind == EType::Pair) {
      // count scalar leaves of the left pair component
      std::vector<const EType*> st{rel->type->a->a.get()};
      size_t n = 0;
      while (!st.empty()) {
        const EType* t = st.back();
        st.pop_back();
        if (t->kind == EType::Pair) {
          st.push_back(t->a.get());
          st.push_back(t->b.get());
        } else
          n++;
      }
      return n;
    }
    err(rel->pos, "expected a relation");
  }

  std::vector<Space> tuple_spaces(const EExprPtr& e) {
    if (e->k == EK::Maplet) {
      auto a = tuple_spaces(e->kids[0]), b = tuple_spaces(e->kids[1]);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    return {iv_of(e)};
  }

  // spaces of a comprehension body: bind binders to their typing spaces,
  // then measure the shaped expression (or the inner set for QUnion/QInter)
  std::vector<Space> tuple_spaces_quant(const EExprPtr& q, const EExprPtr& shaped) {
    std::vector<std::pair<std::string, HExprPtr>> saved = qenv;
    size_t open0 = open_binders.size();
    for (size_t i = 0; i < q->binders.size(); i++) {
      Space s = scalar_space(q->binder_types[i], q->pos);
      std::string bn = "b" + std::to_string(binder_seq);
      qenv.emplace_back(q->binders[i], h_name(bn));
      open_binders.push_back({bn, s});
    }
    std::vector<Space> r = shaped ? tuple_spaces(shaped) : space_dims(q->kids[1]);
    qenv = std::move(saved);
    open_binders.resize(open0);
    return r;
  }

  std::string stream_of(const EExprPtr& ident) {
    switch (ident->ref) {
      case EExpr::Ref::Var:
      case EExpr::Ref::AbsVar:
      case EExpr::Ref::Const: return ident->name;
      case EExpr::Ref::Param: return resolve_param(ident->name, ident->pos);
      default: break;
    }
    err(ident->pos, "'" + ident->name + "' cannot be used here");
  }

  // parameter lookup: concrete parameters of the current event first, then
  // witnessed abstract parameters (nearest concrete level first)
  std::string resolve_param(const std::string& p, SourcePos pos) {
    if (cur_event) {
      auto ev = param_stream.find(cur_event->name);
      if (ev != param_stream.end()) {
        auto it = ev->second.find(p);
        if (it != ev->second.end()) return it->second;
      }
      const eb::FlatAbstractParam* best = nullptr;
      for (auto& ap : fm.abs_params) {
        if (ap.event != cur_event->name || ap.param != p) continue;
        if (witness_level >= 0 && ap.level < witness_level) continue;
        if (!best || ap.level < best->level) best = &ap;
      }
      if (best) return best->name;
    }
    err(pos, "parameter '" + p + "' has no input stream in this context");
  }

  // ---------------------------------------------------------- expressions

  HExprPtr qlookup(const std::string& n, SourcePos pos) {
    for (auto it = qenv.rbegin(); it != qenv.rend(); ++it)
      if (it->first == n) return h_clone(it->second);
    err(pos, "bound variable '" + n + "' is not in scope");
  }

  std::vector<HExprPtr> tuple_of(const EExprPtr& e) {
    if (e->k == EK::Maplet) {
      auto a = tuple_of(e->kids[0]);
      auto b = tuple_of(e->kids[1]);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    return {val(e)};
  }

  // static interval of an emitted index expression, for range-guard pruning
  std::optional<Space> iv_h(const HExprPtr& e) const {
    if (e->k == HK::IntLit) return Space{e->ival, e->ival};
    if (e->k == HK::Name) {
      for (auto it = open_binders.rbegin(); it != open_binders.rend(); ++it)
        if (it->name == e->name) return it->range;
      auto pit = pinned.find(e->name);
      if (pit != pinned.end()) return Space{pit->second, pit->second};
      return std::nullopt;
    }
    if (e->k == HK::Add || e->k == HK::Sub) {
      auto a = iv_h(e->kids[0]), b = iv_h(e->kids[1]);
      if (!a || !b) return std::nullopt;
      if (e->k == HK::Add) return Space{a->lo + b->lo, a->hi + b->hi};
      return Space{a->lo - b->hi, a->hi - b->lo};
    }
    if (e->k == HK::Ite) {
      auto a = iv_h(e->kids[1]), b = iv_h(e->kids[2]);
      if (!a || !b) return std::nullopt;
      return hull(*a, *b);
    }
    return std::nullopt;
  }

  // membership of a value tuple in a stored characteristic array
  HExprPtr stored_member(const std::string& stream, const std::vector<HExprPtr>& tup,
                         SourcePos pos) {
    auto it = stream_spaces.find(stream);
    if (it == stream_spaces.end()) err(pos, "'" + stream + "' is not set-valued");
    const std::vector<Space>& ds = it->second;
    if (tup.size() != ds.size())
      err(pos, "'" + stream + "' relates " + std::to_string(ds.size()) +
                   " component(s), got " + std::to_string(tup.size()));
    HExprPtr read = h_name(stream);
    std::vector<HExprPtr> guards;
    for (size_t d = 0; d < ds.size(); d++) {
      HExprPtr v = h_clone(tup[d]);
      auto iv = iv_h(v);
      if (!iv || !ds[d].contains(*iv)) {
        guards.push_back(h_bin(HK::Ge, h_clone(v), h_int(ds[d].lo)));
        guards.push_back(h_bin(HK::Le, h_clone(v), h_int(ds[d].hi)));
      }
      read = h_idx(std::move(read), h_sub(std::move(v), ds[d].lo));
    }
    guards.push_back(std::move(read));
    return h_conj(std::move(guards));
  }

  // characteristic formula: the value tuple `tup` is a member of set `e`
  HExprPtr chr(const EExprPtr& e, const std::vector<HExprPtr>& tup) {
    switch (e->k) {
      case EK::Ident:
        if (e->ref == EExpr::Ref::CarrierSet) {
          if (tup.size() != 1) err(e->pos, "carrier elements are scalar");
          i128 n = carrier_size(e->type->a->carrier);
          auto iv = iv_h(tup[0]);
          if (iv && Space{0, n - 1}.contains(*iv)) return h_bool(true);
          return h_and(h_bin(HK::Ge, h_clone(tup[0]), h_int(0)),
                       h_bin(HK::Le, h_clone(tup[0]), h_int(n - 1)));
        }
        return stored_member(stream_of(e), tup, e->pos);
      case EK::EmptySet: return h_bool(false);
      case EK::IntSet: return h_bool(true);
      case EK::NatSet:
        if (tup.size() != 1) err(e->pos, "integer sets are scalar");
        return h_bin(HK::Ge, h_clone(tup[0]), h_int(0));
      case EK::BoolSet: return h_bool(true);
      case EK::Interval: {
        if (tup.size() != 1) err(e->pos, "interval elements are scalar");
        return h_and(h_bin(HK::Ge, h_clone(tup[0]), val(e->kids[0])),
                     h_bin(HK::Le, h_clone(tup[0]), val(e->kids[1])));
      }
      case EK::SetLit: {
        std::vector<HExprPtr> alts;
        for (auto& member : e->kids) {
          auto mt = tuple_of(member);
          if (mt.size() != tup.size()) err(member->pos, "mixed tuple widths in a set literal");
          std::vector<HExprPtr> eqs;
          for (size_t i = 0; i < mt.size(); i++)
            eqs.push_back(h_bin(HK::Eq, h_clone(tup[i]), std::move(mt[i])));
          alts.push_back(h_conj(std::move(eqs)));
        }
        return h_disj(std::move(alts));
      }
      case EK::Union: return h_or(chr(e->kids[0], tup), chr(e->kids[1], tup));
      case EK::Inter: return h_and(chr(e->kids[0], tup), chr(e->kids[1], tup));
      case EK::Diff: return h_and(chr(e->kids[0], tup), h_not(chr(e->kids[1], tup)));
      case EK::Cross: {
        auto la = space_dims(e->kids[0]).size();
        if (tup.size() < la) err(e->pos, "tuple too narrow for this product");
        std::vector<HExprPtr> l(tup.begin(), tup.begin() + la);
        std::vector<HExprPtr> r(tup.begin() + la, tup.end());
        return h_and(chr(e->kids[0], l), chr(e->kids[1], r));
      }
      case EK::Dom: {
        auto ds = space_dims(e->kids[0]);
        size_t nl = dom_arity(e->kids[0]);
        return quant_member(e->kids[0], tup, ds, nl, ds.size(), HK::Some);
      }
      case EK::Ran: {
        auto ds = space_dims(e->kids[0]);
        size_t nl = dom_arity(e->kids[0]);
        return quant_member_front(e->kids[0], tup, ds, nl, HK::Some);
      }
      case EK::UnionGen:
      case EK::InterGen: {
        bool some = e->k == EK::UnionGen;
        const EExprPtr& fam = e->kids[0];
        if (fam->k == EK::SetLit) {
          std::vector<HExprPtr> alts;
          for (auto& s : fam->kids) alts.push_back(chr(s, tup));
          return some ? h_disj(std::move(alts)) : h_conj(std::move(alts));
        }
        if (fam->k == EK::SetComp)  // union {z · P | S}  ==  UNION z · P | S
          return quant_set_member(fam, tup, some ? HK::Some : HK::All);
        err(e->pos,
            "generalized union/intersection need a set literal or a "
            "comprehension family");
      }
      case EK::SetComp: {
        // {z .. · P | F}: tup is a member iff some binder valuation
        // satisfies P and shapes F onto tup
        return comp_member(e, tup, HK::Some, true);
      }
      case EK::QUnion: return quant_set_member(e, tup, HK::Some);
      case EK::QInter: return quant_set_member(e, tup, HK::All);
      case EK::PowOp:
      case EK::Pow1Op:
        err(e->pos, "a powerset is only supported on the right of a membership");
      default: break;
    }
    err(e->pos, "expected a set expression");
  }

  // SOME/ALL tail binders for dom/ran/generalized union: quantifies
  // dimensions [from, to) of the relation and uses tup for the others
  HExprPtr quant_member(const EExprPtr& rel, const std::vector<HExprPtr>& tup,
                        const std::vector<Space>& ds, size_t from, size_t to, HK k) {
    std::vector<hll::HBinder> bs;
    std::vector<HExprPtr> full;
    size_t open0 = open_binders.size();
    for (size_t d = 0; d < ds.size(); d++) {
      if (d >= from && d < to) {
        std::string bn = fresh_binder();
        bs.push_back(h_binder(bn, ds[d].lo, ds[d].hi));
        open_binders.push_back({bn, ds[d]});
        full.push_back(h_name(bn));
      } else {
        full.push_back(h_clone(tup[d]));
      }
    }
    HExprPtr body = chr(rel, full);
    open_binders.resize(open0);
    return h_quant(k, std::move(bs), std::move(body));
  }

  HExprPtr quant_member_front(const EExprPtr& rel, const std::vector<HExprPtr>& tup,
                              const std::vector<Space>& ds, size_t nl, HK k) {
    std::vector<hll::HBinder> bs;
    std::vector<HExprPtr> full;
    size_t open0 = open_binders.size();
    for (size_t d = 0; d < ds.size(); d++) {
      if (d < nl) {
        std::string bn = fresh_binder();
        bs.push_back(h_binder(bn, ds[d].lo, ds[d].hi));
        open_binders.push_back({bn, ds[d]});
        full.push_back(h_name(bn));
      } else {
        full.push_back(h_clone(tup[d - nl]));
      }
    }
    HExprPtr body = chr(rel, full);
    open_binders.resize(open0);
    return h_quant(k, std::move(bs), std::move(body));
  }

  // open the binders of a comprehension-like node; returns IR binders
  std::vector<hll::HBinder> open_comp(const EExprPtr& q) {
    std::vector<hll::HBinder> bs;
    for (size_t i = 0; i < q->binders.size(); i++) {
      const ETypePtr& bt = q->binder_types[i];
      if (bt->kind == EType::Pow)
        err(q->pos, "quantification over set-valued variables is not supported");
      Space s = scalar_space(bt, q->pos);
      std::string bn = binder_name(q->binders[i]);
      bs.push_back(h_binder(bn, s.lo, s.hi));
      open_binders.push_back({bn, s});
      if (bt->kind == EType::Bool)
        qenv.emplace_back(q->binders[i], h_bin(HK::Eq, h_name(bn), h_int(1)));
      else
        qenv.emplace_back(q->binders[i], h_name(bn));
    }
    return bs;
  }

  void close_comp(const EExprPtr& q) {
    qenv.resize(qenv.size() - q->binders.size());
    open_binders.resize(open_binders.size() - q->binders.size());
  }

  // {z · P | F} membership: Some z (P & tup == F)
  HExprPtr comp_member(const EExprPtr& e, const std::vector<HExprPtr>& tup, HK k,
                       bool with_shape) {
    auto bs = open_comp(e);
    HExprPtr p = pred(e->kids[0]);
    if (with_shape) {
      auto shaped = tuple_of(e->kids[1]);
      if (shaped.size() != tup.size())
        err(e->pos, "comprehension shape and element widths differ");
      std::vector<HExprPtr> eqs;
      for (size_t i = 0; i < shaped.size(); i++)
        eqs.push_back(h_bin(HK::Eq, h_clone(tup[i]), std::move(shaped[i])));
      p = h_and(std::move(p), h_conj(std::move(eqs)));
    }
    close_comp(e);
    return h_quant(k, std::move(bs), std::move(p));
  }

  // UNION/INTER z · P | S membership
  HExprPtr quant_set_member(const EExprPtr& e, const std::vector<HExprPtr>& tup, HK k) {
    auto bs = open_comp(e);
    HExprPtr p = pred(e->kids[0]);
    HExprPtr member = chr(e->kids[1], tup);
    HExprPtr body = (k == HK::Some) ? h_and(std::move(p), std::move(member))
                                    : h_imp(std::move(p), std::move(member));
    close_comp(e);
    return h_quant(k, std::move(bs), std::move(body));
  }

  // ---------------------------------------------------------- scalar values

  HExprPtr val(const EExprPtr& e) {
    switch (e->k) {
      case EK::IntLit: return h_int(e->ival);
      case EK::BoolLit: return h_bool(e->bval);
      case EK::Ident:
        switch (e->ref) {
          case EExpr::Ref::QuantVar: return qlookup(e->name, e->pos);
          case EExpr::Ref::Var:
          case EExpr::Ref::AbsVar:
          case EExpr::Ref::Const: return h_name(e->name);
          case EExpr::Ref::Param: return h_name(resolve_param(e->name, e->pos));
          case EExpr::Ref::CarrierSet:
            err(e->pos, "a carrier set cannot be used as a value");
          case EExpr::Ref::ExternalFn:
            err(e->pos, "'" + e->name + "' must be applied to arguments");
          default: err(e->pos, "unresolved name '" + e->name + "'");
        }
      case EK::Add: return h_bin(HK::Add, val(e->kids[0]), val(e->kids[1]));
      case EK::Sub: return h_bin(HK::Sub, val(e->kids[0]), val(e->kids[1]));
      case EK::Mul: return h_bin(HK::Mul, val(e->kids[0]), val(e->kids[1]));
      case EK::Neg: return h_un(HK::Neg, val(e->kids[0]));
      case EK::Div:
      case EK::Mod: {
        HExprPtr a = val(e->kids[0]), b = val(e->kids[1]);
        if (b->k != HK::IntLit || b->ival == 0)
          queue_wd(e->k == EK::Div ? "div" : "mod",
                   h_bin(HK::Ne, h_clone(b), h_int(0)), e->pos);
        return h_bin(e->k == EK::Div ? HK::Div : HK::Mod, std::move(a), std::move(b));
      }
      case EK::Exp: {
        auto k = eb_fold(e->kids[1]);
        if (!k || *k < 0) err(e->kids[1]->pos, "exponents must be non-negative constants");
        if (*k > 16) err(e->kids[1]->pos, "exponent too large to expand");
        if (*k == 0) return h_int(1);
        HExprPtr base = val(e->kids[0]);
        HExprPtr r = h_clone(base);
        for (i128 i = 1; i < *k; i++) r = h_bin(HK::Mul, std::move(r), h_clone(base));
        return r;
      }
      case EK::Card: {
        if (e->kids[0]->k != EK::Ident ||
            (e->kids[0]->ref != EExpr::Ref::Var && e->kids[0]->ref != EExpr::Ref::AbsVar &&
             e->kids[0]->ref != EExpr::Ref::Const && e->kids[0]->ref != EExpr::Ref::Param))
          err(e->pos, "card() applies to a stored set; assign the set to a variable first");
        return h_un(HK::Population, h_name(stream_of(e->kids[0])));
      }
      case EK::MinOp:
      case EK::MaxOp: {
        auto ds = space_dims(e->kids[0]);
        if (ds.size() != 1) err(e->pos, "min/max need a set of integers");
        std::string bn = fresh_binder();
        open_binders.push_back({bn, ds[0]});
        HExprPtr member = chr(e->kids[0], {h_name(bn)});
        open_binders.pop_back();
        queue_wd("reduce",
                 h_quant(HK::Some, {h_binder(bn, ds[0].lo, ds[0].hi)}, h_clone(member)),
                 e->pos);
        auto r = hx(e->k == EK::MinOp ? HK::MinR : HK::MaxR);
        r->binders = {h_binder(bn, ds[0].lo, ds[0].hi)};
        r->kids = {std::move(member), h_name(bn)};
        return r;
      }
      case EK::App: return app_val(e);
      case EK::BoolOf: return pred(e->kids[0]);
      default: break;
    }
    if (e->type && e->type->kind == EType::Pow)
      err(e->pos, "a set-valued expression cannot be used as a value here");
    // remaining boolean forms (comparisons used as values)
    if (e->type && e->type->kind == EType::Bool) return pred(e);
    err(e->pos, "unsupported expression");
  }

  HExprPtr app_val(const EExprPtr& e) {
    const EExprPtr& f = e->kids[0];
    if (f->k == EK::Ident && f->ref == EExpr::Ref::ExternalFn) {
      auto sub = extfn_subst.find(f->name);
      if (sub != extfn_subst.end()) return h_clone(sub->second);
      auto call = hx(HK::Call);
      call->name = f->name;
      for (size_t i = 1; i < e->kids.size(); i++) {
        const EExprPtr& a = e->kids[i];
        if (a->type && a->type->kind == EType::Pow) {
          if (a->k != EK::Ident) err(a->pos, "set arguments must be stored sets");
          call->kids.push_back(h_name(stream_of(a)));
        } else {
          call->kids.push_back(val(a));
        }
      }
      return call;
    }
    // data function: unique image via a minimal selection, guarded by a
    // domain-membership obligation
    const EExprPtr& rel = f;
    auto ds = space_dims(rel);
    auto args = tuple_of(e->kids[1]);
    if (args.size() + 1 != ds.size())
      err(e->pos, "application arity does not match the relation");
    Space ran = ds.back();
    std::string bn = fresh_binder();
    std::vector<HExprPtr> tup;
    for (auto& a : args) tup.push_back(h_clone(a));
    tup.push_back(h_name(bn));
    open_binders.push_back({bn, ran});
    HExprPtr member = chr(rel, tup);
    open_binders.pop_back();
    queue_wd("app", h_quant(HK::Some, {h_binder(bn, ran.lo, ran.hi)}, h_clone(member)),
             e->pos);
    auto r = hx(HK::MinR);
    r->binders = {h_binder(bn, ran.lo, ran.hi)};
    r->kids = {std::move(member), h_name(bn)};
    return r;
  }

  // ---------------------------------------------------------- predicates

  bool is_set_typed(const EExprPtr& e) const {
    return e->type && e->type->kind == EType::Pow;
  }

  HExprPtr pred(const EExprPtr& e) {
    switch (e->k) {
      case EK::BoolLit: return h_bool(e->bval);
      case EK::Not: return h_not(pred(e->kids[0]));
      case EK::And: return h_and(pred(e->kids[0]), pred(e->kids[1]));
      case EK::Or: return h_or(pred(e->kids[0]), pred(e->kids[1]));
      case EK::Imp: return h_imp(pred(e->kids[0]), pred(e->kids[1]));
      case EK::Eqv: return h_bin(HK::Eqv, pred(e->kids[0]), pred(e->kids[1]));
      case EK::Eq:
      case EK::Ne: {
        HExprPtr r;
        if (is_set_typed(e->kids[0]) || is_set_typed(e->kids[1]))
          r = set_equal(e->kids[0], e->kids[1]);
        else if (e->kids[0]->k == EK::Maplet || e->kids[1]->k == EK::Maplet) {
          auto a = tuple_of(e->kids[0]), b = tuple_of(e->kids[1]);
          if (a.size() != b.size()) err(e->pos, "pair widths differ");
          std::vector<HExprPtr> eqs;
          for (size_t i = 0; i < a.size(); i++)
            eqs.push_back(h_bin(HK::Eq, std::move(a[i]), std::move(b[i])));
          r = h_conj(std::move(eqs));
        } else
          r = h_bin(HK::Eq, val(e->kids[0]), val(e->kids[1]));
        return e->k == EK::Ne ? h_not(std::move(r)) : r;
      }
      case EK::Lt: return h_bin(HK::Lt, val(e->kids[0]), val(e->kids[1]));
      case EK::Le: return h_bin(HK::Le, val(e->kids[0]), val(e->kids[1]));
      case EK::Gt: return h_bin(HK::Gt, val(e->kids[0]), val(e->kids[1]));
      case EK::Ge: return h_bin(HK::Ge, val(e->kids[0]), val(e->kids[1]));
      case EK::In: return member(e->kids[0], e->kids[1]);
      case EK::NotIn: return h_not(member(e->kids[0], e->kids[1]));
      case EK::Subset: return subset(e->kids[0], e->kids[1], false);
      case EK::SSubset: return subset(e->kids[0], e->kids[1], true);
      case EK::Forall:
      case EK::Exists: {
        auto bs = open_comp(e);
        HExprPtr body = pred(e->kids[0]);
        close_comp(e);
        return h_quant(e->k == EK::Forall ? HK::All : HK::Some, std::move(bs),
                       std::move(body));
      }
      case EK::Partition: return partition_pred(e);
      case EK::Finite: return h_bool(true);
      default: break;
    }
    if (e->type && e->type->kind == EType::Bool) return val(e);
    err(e->pos, "expected a predicate");
  }

  // extensional equality over the hull of both element spaces
  HExprPtr set_equal(const EExprPtr& a, const EExprPtr& b) {
    auto da = space_dims(a), db = space_dims(b);
    if (da.empty()) da = db;
    if (db.empty()) db = da;
    if (da.empty()) return h_bool(true);  // {} = {}
    if (da.size() != db.size()) err(a->pos, "set arities differ");
    for (size_t i = 0; i < da.size(); i++) da[i] = hull(da[i], db[i]);
    std::vector<hll::HBinder> bs;
    std::vector<HExprPtr> tup;
    size_t open0 = open_binders.size();
    for (auto& d : da) {
      std::string bn = fresh_binder();
      bs.push_back(h_binder(bn, d.lo, d.hi));
      open_binders.push_back({bn, d});
      tup.push_back(h_name(bn));
    }
    HExprPtr body = h_bin(HK::Eqv, chr(a, tup), chr(b, tup));
    open_binders.resize(open0);
    return h_quant(HK::All, std::move(bs), std::move(body));
  }

  HExprPtr subset(const EExprPtr& a, const EExprPtr& b, bool strict) {
    auto da = space_dims(a);
    if (da.empty()) {  // {} ⊆ anything
      if (!strict) return h_bool(true);
      da = space_dims(b);
      if (da.empty()) return h_bool(false);
    }
    HExprPtr incl;
    {
      std::vector<hll::HBinder> bs;
      std::vector<HExprPtr> tup;
      size_t open0 = open_binders.size();
      for (auto& d : da) {
        std::string bn = fresh_binder();
        bs.push_back(h_binder(bn, d.lo, d.hi));
        open_binders.push_back({bn, d});
        tup.push_back(h_name(bn));
      }
      HExprPtr body = h_imp(chr(a, tup), chr(b, tup));
      open_binders.resize(open0);
      incl = h_quant(HK::All, std::move(bs), std::move(body));
    }
    if (!strict) return incl;
    auto db = space_dims(b);
    std::vector<hll::HBinder> bs;
    std::vector<HExprPtr> tup;
    size_t open0 = open_binders.size();
    for (auto& d : db) {
      std::string bn = fresh_binder();
      bs.push_back(h_binder(bn, d.lo, d.hi));
      open_binders.push_back({bn, d});
      tup.push_back(h_name(bn));
    }
    HExprPtr witness = h_and(chr(b, tup), h_not(chr(a, tup)));
    open_binders.resize(open0);
    return h_and(std::move(incl), h_quant(HK::Some, std::move(bs), std::move(witness)));
  }

  // x ∈ E, with relation/function classes and powersets on the right
  HExprPtr member(const EExprPtr& x, const EExprPtr& s) {
    switch (s->k) {
      case EK::PowOp: return subset(x, s->kids[0], false);
      case EK::Pow1Op: {
        HExprPtr incl = subset(x, s->kids[0], false);
        auto da = space_dims(x);
        if (da.empty()) return h_bool(false);  // {} has no member
        std::vector<hll::HBinder> bs;
        std::vector<HExprPtr> tup;
        size_t open0 = open_binders.size();
        for (auto& d : da) {
          std::string bn = fresh_binder();
          bs.push_back(h_binder(bn, d.lo, d.hi));
          open_binders.push_back({bn, d});
          tup.push_back(h_name(bn));
        }
        HExprPtr nonempty = chr(x, tup);
        open_binders.resize(open0);
        return h_and(std::move(incl),
                     h_quant(HK::Some, std::move(bs), std::move(nonempty)));
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
      case EK::Bij: return relation_class(x, s);
      default: break;
    }
    return chr(s, tuple_of(x));
  }

  // a relation/function membership as the conjunction of its class laws
  HExprPtr relation_class(const EExprPtr& r, const EExprPtr& cls) {
    const EExprPtr& S = cls->kids[0];
    const EExprPtr& T = cls->kids[1];
    auto dsS = space_dims(S), dsT = space_dims(T);
    EK k = cls->k;

    auto open_tup = [&](const std::vector<Space>& ds, std::vector<hll::HBinder>& bs,
                        std::vector<HExprPtr>& tup) {
      for (auto& d : ds) {
        std::string bn = fresh_binder();
        bs.push_back(h_binder(bn, d.lo, d.hi));
        open_binders.push_back({bn, d});
        tup.push_back(h_name(bn));
      }
    };
    auto cat = [](std::vector<HExprPtr> a, const std::vector<HExprPtr>& b) {
      for (auto& x : b) a.push_back(h_clone(x));
      return a;
    };

    std::vector<HExprPtr> laws;

    {  // containment: r only relates members of S to members of T.  This
       // must range over r's own element space, which may be wider than SxT.
      auto dsR = space_dims(r);
      if (dsR.size() != dsS.size() + dsT.size())
        err(r->pos, "relation and arrow tuple widths differ");
      std::vector<hll::HBinder> bs;
      std::vector<HExprPtr> tr;
      size_t open0 = open_binders.size();
      open_tup(dsR, bs, tr);
      std::vector<HExprPtr> ts(tr.begin(), tr.begin() + dsS.size());
      std::vector<HExprPtr> tt(tr.begin() + dsS.size(), tr.end());
      HExprPtr body = h_imp(chr(r, tr), h_and(chr(S, ts), chr(T, tt)));
      open_binders.resize(open0);
      laws.push_back(h_quant(HK::All, std::move(bs), std::move(body)));
    }

    bool functional = k == EK::Pfun || k == EK::Tfun || k == EK::Pinj || k == EK::Tinj ||
                      k == EK::Psur || k == EK::Tsur || k == EK::Bij;
    bool total = k == EK::RelTotal || k == EK::RelTotalSurj || k == EK::Tfun ||
                 k == EK::Tinj || k == EK::Tsur || k == EK::Bij;
    bool surjective = k == EK::RelSurj || k == EK::RelTotalSurj || k == EK::Psur ||
                      k == EK::Tsur || k == EK::Bij;
    bool injective = k == EK::Pinj || k == EK::Tinj || k == EK::Bij;

    if (functional) {  // at most one image per argument
      std::vector<hll::HBinder> bs;
      std::vector<HExprPtr> ts, t1, t2;
      size_t open0 = open_binders.size();
      open_tup(dsS, bs, ts);
      open_tup(dsT, bs, t1);
      open_tup(dsT, bs, t2);
      std::vector<HExprPtr> eqs;
      for (size_t i = 0; i < t1.size(); i++)
        eqs.push_back(h_bin(HK::Eq, h_clone(t1[i]), h_clone(t2[i])));
      HExprPtr body = h_imp(h_and(chr(r, cat(ts, t1)), chr(r, cat(ts, t2))),
                            h_conj(std::move(eqs)));
      open_binders.resize(open0);
      laws.push_back(h_quant(HK::All, std::move(bs), std::move(body)));
    }
    if (total) {  // every member of S has an image
      std::vector<hll::HBinder> obs;
      std::vector<HExprPtr> ts;
      size_t open0 = open_binders.size();
      open_tup(dsS, obs, ts);
      std::vector<hll::HBinder> ibs;
      std::vector<HExprPtr> tt;
      open_tup(dsT, ibs, tt);
      HExprPtr inner = h_quant(HK::Some, std::move(ibs),
                               h_and(chr(T, tt), chr(r, cat(ts, tt))));
      HExprPtr body = h_imp(chr(S, ts), std::move(inner));
      open_binders.resize(open0);
      laws.push_back(h_quant(HK::All, std::move(obs), std::move(body)));
    }
    if (injective) {  // distinct arguments have distinct images
      std::vector<hll::HBinder> bs;
      std::vector<HExprPtr> s1, s2, tt;
      size_t open0 = open_binders.size();
      open_tup(dsS, bs, s1);
      open_tup(dsS, bs, s2);
      open_tup(dsT, bs, tt);
      std::vector<HExprPtr> eqs;
      for (size_t i = 0; i < s1.size(); i++)
        eqs.push_back(h_bin(HK::Eq, h_clone(s1[i]), h_clone(s2[i])));
      HExprPtr body = h_imp(h_and(chr(r, cat(s1, tt)), chr(r, cat(s2, tt))),
                            h_conj(std::move(eqs)));
      open_binders.resize(open0);
      laws.push_back(h_quant(HK::All, std::move(bs), std::move(body)));
    }
    if (surjective) {  // every member of T is an image
      std::vector<hll::HBinder> obs;
      std::vector<HExprPtr> tt;
      size_t open0 = open_binders.size();
      open_tup(dsT, obs, tt);
      std::vector<hll::HBinder> ibs;
      std::vector<HExprPtr> ts;
      open_tup(dsS, ibs, ts);
      HExprPtr inner = h_quant(HK::Some, std::move(ibs),
                               h_and(chr(S, ts), chr(r, cat(ts, tt))));
      HExprPtr body = h_imp(chr(T, tt), std::move(inner));
      open_binders.resize(open0);
      laws.push_back(h_quant(HK::All, std::move(obs), std::move(body)));
    }
    return h_conj(std::move(laws));
  }

  // partition(S, p1..pn): S is the union and the parts are pairwise disjoint
  HExprPtr partition_pred(const EExprPtr& e) {
    const EExprPtr& S = e->kids[0];
    auto ds = space_dims(S);
    for (size_t i = 1; i < e->kids.size(); i++) {
      auto di = space_dims(e->kids[i]);
      for (size_t d = 0; d < ds.size() && d < di.size(); d++) ds[d] = hull(ds[d], di[d]);
    }
    std::vector<HExprPtr> laws;
    {
      std::vector<hll::HBinder> bs;
      std::vector<HExprPtr> tup;
      size_t open0 = open_binders.size();
      for (auto& d : ds) {
        std::string bn = fresh_binder();
        bs.push_back(h_binder(bn, d.lo, d.hi));
        open_binders.push_back({bn, d});
        tup.push_back(h_name(bn));
      }
      std::vector<HExprPtr> parts;
      for (size_t i = 1; i < e->kids.size(); i++) parts.push_back(chr(e->kids[i], tup));
      HExprPtr body = h_bin(HK::Eqv, chr(S, tup), h_disj(std::move(parts)));
      open_binders.resize(open0);
      laws.push_back(h_quant(HK::All, std::move(bs), std::move(body)));
    }
    for (size_t i = 1; i < e->kids.size(); i++) {
      for (size_t j = i + 1; j < e->kids.size(); j++) {
        std::vector<hll::HBinder> bs;
        std::vector<HExprPtr> tup;
        size_t open0 = open_binders.size();
        for (auto& d : ds) {
          std::string bn = fresh_binder();
          bs.push_back(h_binder(bn, d.lo, d.hi));
          open_binders.push_back({bn, d});
          tup.push_back(h_name(bn));
        }
        HExprPtr both = h_and(chr(e->kids[i], tup), chr(e->kids[j], tup));
        open_binders.resize(open0);
        laws.push_back(h_not(h_quant(HK::Some, std::move(bs), std::move(both))));
      }
    }
    return h_conj(std::move(laws));
  }

  // ---------------------------------------------------------- passes

  // enumerated carriers: partition(S, {c1}, .., {cn}) pins ci to ordinal i
  void pin_enumerations() {
    for (size_t ai = 0; ai < fm.axioms.size(); ai++) {
      const EExprPtr& p = fm.axioms[ai].pred;
      if (p->k != EK::Partition) continue;
      if (p->kids[0]->k != EK::Ident || p->kids[0]->ref != EExpr::Ref::CarrierSet) continue;
      int id = p->kids[0]->type->a->carrier;
      if ((i128)(p->kids.size() - 1) != carrier_size(id)) continue;
      std::vector<std::string> items;
      bool ok = true;
      for (size_t i = 1; i < p->kids.size(); i++) {
        const EExprPtr& part = p->kids[i];
        ok = ok && part->k == EK::SetLit && part->kids.size() == 1 &&
             part->kids[0]->k == EK::Ident && part->kids[0]->ref == EExpr::Ref::Const;
        if (!ok) break;
        items.push_back(part->kids[0]->name);
      }
      std::set<std::string> uniq(items.begin(), items.end());
      if (!ok || uniq.size() != items.size()) continue;
      for (size_t i = 0; i < items.size(); i++) pinned[items[i]] = (i128)i;
      consumed_axioms.insert(ai);
    }
  }

  void do_context() {
    // constants
    for (auto& c : fm.constants) {
      if (c.external) {
        std::vector<HTypePtr> args;
        for (auto& a : c.sig_args) args.push_back(h_type_of(a, c.pos));
        add_block(c.name, std::move(args), h_type_of(c.sig_ret, c.pos), ns_con, c.pos);
        continue;
      }
      auto it = pinned.find(c.name);
      if (it != pinned.end()) {
        add_stream(c.name, h_type_of(c.type, c.pos), ns_con, c.pos, true, h_int(it->second));
        continue;
      }
      HTypePtr t = h_type_of(c.type, c.pos);
      add_stream(c.name, t, ns_con, c.pos, true, nullptr);
      if (c.type->kind == EType::Pow)
        stream_spaces[c.name] = dims_of(c.type->a, c.pos);
      else if (c.type->kind != EType::Bool) {
        // symbolic scalar: assume the declared range (the storage window is wider)
        Space s = scalar_space(c.type, c.pos);
        add_constraint("ctyp_" + c.name,
                       h_and(h_bin(HK::Ge, h_name(c.name), h_int(s.lo)),
                             h_bin(HK::Le, h_name(c.name), h_int(s.hi))),
                       ns_con);
      }
    }
    // axioms
    std::map<std::string, int> label_seen;
    for (size_t ai = 0; ai < fm.axioms.size(); ai++) {
      if (consumed_axioms.count(ai)) continue;
      const eb::EbAxiom& ax = fm.axioms[ai];
      std::string label = "axiom_" + (ax.label.empty() ? std::to_string(ai) : ax.label);
      if (int n = label_seen[label]++) label += "_" + std::to_string(n + 1);
      std::set<std::string> fns;
      collect_extfns(ax.pred, fns);
      if (fns.empty()) {
        add_constraint(label, pred(ax.pred), ns_con);
        continue;
      }
      if (fns.size() > 1)
        err(ax.pos, "an axiom may constrain at most one external function");
      emit_extfn_contract(ax, *fns.begin(), label);
    }
  }

  void collect_extfns(const EExprPtr& e, std::set<std::string>& out) const {
    if (e->k == EK::Ident && e->ref == EExpr::Ref::ExternalFn) out.insert(e->name);
    for (auto& k : e->kids) collect_extfns(k, out);
  }

  // ∀x.. · x ∈ E .. ⇒ P(f(x..))  becomes a contract quantified over the
  // block's call instances, substituting inputs for the bound variables
  void emit_extfn_contract(const eb::EbAxiom& ax, const std::string& fn,
                           const std::string& label) {
    const EExprPtr& p = ax.pred;
    if (p->k != EK::Forall)
      err(ax.pos, "axioms over the external function '" + fn +
                      "' must be universally quantified over its arguments");
    // every application of fn must be fn(b1, .., bk) in binder order
    std::vector<const EExpr*> apps;
    collect_apps(p->kids[0], fn, apps);
    for (const EExpr* a : apps) {
      bool ok = a->kids.size() == p->binders.size() + 1;
      for (size_t i = 1; ok && i < a->kids.size(); i++)
        ok = a->kids[i]->k == EK::Ident && a->kids[i]->name == p->binders[i - 1];
      if (!ok)
        err(a->pos, "'" + fn + "' must be applied exactly to the quantified variables");
    }
    std::string inst = "inst";
    auto minput = [&](size_t i) {
      auto mem = hx(HK::Member);
      mem->name = "input_" + std::to_string(i);
      mem->kids = {h_name(inst)};
      return mem;
    };
    // bind the quantified variables to the instance inputs
    size_t q0 = qenv.size();
    for (size_t i = 0; i < p->binders.size(); i++) {
      if (p->binder_types[i]->kind == EType::Bool)
        qenv.emplace_back(p->binders[i], h_bin(HK::Eq, minput(i), h_int(1)));
      else
        qenv.emplace_back(p->binders[i], minput(i));
    }
    auto mout = hx(HK::Member);
    mout->name = "output";
    mout->kids = {h_name(inst)};
    extfn_subst[fn] = mout;
    HExprPtr body = pred(p->kids[0]);
    extfn_subst.erase(fn);
    qenv.resize(q0);
    auto all = hx(HK::AllBlock);
    all->name = fn;
    hll::HBinder b;
    b.var = inst;
    all->binders = {b};
    all->kids = {std::move(body)};
    add_constraint(label, std::move(all), ns_con);
    block_contracts[fn]++;
  }

  void collect_apps(const EExprPtr& e, const std::string& fn,
                    std::vector<const EExpr*>& out) const {
    if (e->k == EK::App && e->kids[0]->k == EK::Ident && e->kids[0]->name == fn)
      out.push_back(e.get());
    for (auto& k : e->kids) collect_apps(k, fn, out);
  }

  void do_params() {
    // name each parameter: plain when globally unique, else event-qualified
    std::map<std::string, int> count;
    for (auto& ev : fm.events)
      for (auto& p : ev.params) count[p]++;
    for (auto& ev : fm.events) {
      for (size_t i = 0; i < ev.params.size(); i++) {
        const std::string& p = ev.params[i];
        std::string stream = p;
        if (count[p] > 1 || names.count(p) || hll::is_reserved_word(p))
          stream = ev.name + "_" + p;
        add_stream(stream, h_type_of(ev.param_types[i], ev.pos), ns_con, ev.pos);
        param_stream[ev.name][p] = stream;
        if (ev.param_types[i]->kind == EType::Pow)
          stream_spaces[stream] = dims_of(ev.param_types[i]->a, ev.pos);
        out.params.push_back({stream, ev.name, p});
      }
      // typing guards are assumed on the free inputs
      cur_event = &ev;
      for (auto& g : ev.guards) {
        if (!g.is_typing) continue;
        add_constraint("ptyp_" + param_stream[ev.name][g.pred->kids[0]->name],
                       pred(g.pred), ns_con);
      }
      cur_event = nullptr;
    }
  }

  void do_guards() {
    for (auto& ev : fm.events) {
      cur_event = &ev;
      wd_sel = nullptr;  // guards are evaluated every cycle
      std::vector<HExprPtr> gs;
      for (auto& g : ev.guards) gs.push_back(pred(g.pred));
      cur_event = nullptr;
      add_stream("GRD_" + ev.name, HType::mk_bool(), ns_sys, ev.pos);
      add_def(hll::HDef::Plain, "GRD_" + ev.name, {}, h_conj(std::move(gs)), ns_sys);
    }
    // priority selection: first enabled event wins
    for (size_t i = 0; i < fm.events.size(); i++) {
      const auto& ev = fm.events[i];
      HExprPtr sel = h_name("GRD_" + ev.name);
      for (size_t j = 0; j < i; j++)
        sel = h_and(std::move(sel), h_not(h_name("GRD_" + fm.events[j].name)));
      add_stream("SEL_" + ev.name, HType::mk_bool(), ns_sys, ev.pos);
      add_def(hll::HDef::Plain, "SEL_" + ev.name, {}, std::move(sel), ns_sys);
    }
  }

  const eb::EbAction* action_for(const eb::EbEvent& ev, const std::string& var) {
    const eb::EbAction* found = nullptr;
    for (auto& a : ev.actions) {
      if (a.lhs != var) continue;
      if (found) err(a.pos, "variable '" + var + "' is assigned twice in event '" + ev.name + "'");
      found = &a;
    }
    return found;
  }

  void declare_variables() {
    // declared before guards and definitions: both read the state streams
    for (auto& v : fm.variables) {
      if (!v.concrete) continue;
      add_stream(v.name, h_type_of(v.type, vpos(v)), ns_sys, vpos(v));
      if (v.type->kind == EType::Pow)
        stream_spaces[v.name] = dims_of(v.type->a, vpos(v));
    }
  }

  void do_variables() {
    for (auto& v : fm.variables) {
      if (!v.concrete) continue;
      if (v.type->kind == EType::Pow)
        define_set_variable(v);
      else
        define_scalar_variable(v);
    }
  }

  void define_scalar_variable(const eb::FlatVariable& v) {
    const eb::EbAction* init = action_for(fm.init, v.name);
    if (!init) err(fm.init.pos, "INITIALISATION does not assign '" + v.name + "'");
    bool int_kind = v.type->kind != EType::Bool;
    Space rng = int_kind ? scalar_space(v.type, vpos(v)) : Space{0, 1};

    cur_event = nullptr;
    wd_sel = nullptr;
    HExprPtr i_rhs = v.type->kind == EType::Bool ? pred(init->rhs) : val(init->rhs);
    if (int_kind) {
      if (auto c = eb_fold(init->rhs)) {
        if (*c < rng.lo || *c > rng.hi)
          err(init->pos, "initial value " + i128_str(*c) + " is outside the range of '" +
                             v.name + "'");
      } else if (cfg.overflow == TranslationConfig::Overflow::Obligation) {
        queue_wd("fit_" + v.name,
                 h_and(h_bin(HK::Ge, h_clone(i_rhs), h_int(rng.lo)),
                       h_bin(HK::Le, h_clone(i_rhs), h_int(rng.hi))),
                 init->pos);
      }
    }
    add_def(hll::HDef::Init, v.name, {}, std::move(i_rhs), ns_sys);

    // next value: first enabled assigning event wins, stutter otherwise
    HExprPtr x_rhs = h_name(v.name);
    for (size_t i = fm.events.size(); i-- > 0;) {
      const eb::EbEvent& ev = fm.events[i];
      const eb::EbAction* a = action_for(ev, v.name);
      if (!a) continue;
      cur_event = &ev;
      wd_sel = h_name("SEL_" + ev.name);
      HExprPtr rhs = v.type->kind == EType::Bool ? pred(a->rhs) : val(a->rhs);
      if (int_kind && cfg.overflow == TranslationConfig::Overflow::Obligation) {
        bool trivially_fits = false;
        if (auto c = eb_fold(a->rhs)) trivially_fits = *c >= rng.lo && *c <= rng.hi;
        if (!trivially_fits)
          queue_wd("fit_" + v.name + "_" + ev.name,
                   h_and(h_bin(HK::Ge, h_clone(rhs), h_int(rng.lo)),
                         h_bin(HK::Le, h_clone(rhs), h_int(rng.hi))),
                   a->pos);
      }
      x_rhs = h_ite(h_name("SEL_" + ev.name), std::move(rhs), std::move(x_rhs));
      cur_event = nullptr;
      wd_sel = nullptr;
    }
    add_def(hll::HDef::Next, v.name, {}, std::move(x_rhs), ns_sys);
  }

  void define_set_variable(const eb::FlatVariable& v) {
    const eb::EbAction* init = action_for(fm.init, v.name);
    if (!init) err(fm.init.pos, "INITIALISATION does not assign '" + v.name + "'");
    const std::vector<Space>& ds = stream_spaces.at(v.name);

    // one index binder per dimension; the member value is base + index
    auto open_dims = [&](std::vector<std::string>& binders, std::vector<HExprPtr>& tup) {
      for (auto& d : ds) {
        std::string bn = fresh_binder();
        binders.push_back(bn);
        open_binders.push_back({bn, Space{0, d.size() - 1}});
        tup.push_back(h_add(h_name(bn), d.lo));
      }
    };

    {
      cur_event = nullptr;
      wd_sel = nullptr;
      std::vector<std::string> binders;
      std::vector<HExprPtr> tup;
      size_t open0 = open_binders.size();
      open_dims(binders, tup);
      HExprPtr rhs = chr(init->rhs, tup);
      open_binders.resize(open0);
      add_def(hll::HDef::Init, v.name, std::move(binders), std::move(rhs), ns_sys);
    }
    {
      std::vector<std::string> binders;
      std::vector<HExprPtr> tup;
      size_t open0 = open_binders.size();
      open_dims(binders, tup);
      HExprPtr x_rhs = h_name(v.name);
      for (auto& b : binders) x_rhs = h_idx(std::move(x_rhs), h_name(b));
      for (size_t i = fm.events.size(); i-- > 0;) {
        const eb::EbEvent& ev = fm.events[i];
        const eb::EbAction* a = action_for(ev, v.name);
        if (!a) continue;
        cur_event = &ev;
        wd_sel = h_name("SEL_" + ev.name);
        HExprPtr rhs = chr(a->rhs, tup);
        x_rhs = h_ite(h_name("SEL_" + ev.name), std::move(rhs), std::move(x_rhs));
        cur_event = nullptr;
        wd_sel = nullptr;
      }
      open_binders.resize(open0);
      add_def(hll::HDef::Next, v.name, std::move(binders), std::move(x_rhs), ns_sys);
    }
  }

  void do_shadows() {
    // abstract-level variables stay as free streams pinned by the gluing
    for (auto& v : fm.variables) {
      if (v.concrete) continue;
      add_stream(v.name, h_type_of(v.type, vpos(v)), ns_ver, vpos(v));
      if (v.type->kind == EType::Pow)
        stream_spaces[v.name] = dims_of(v.type->a, vpos(v));
    }
    // witnessed abstract parameters: free streams equated when the
    // refining event is selected
    for (auto& ap : fm.abs_params) {
      add_stream(ap.name, h_type_of(ap.type, SourcePos{}), ns_ver, SourcePos{});
      if (ap.type->kind == EType::Pow)
        stream_spaces[ap.name] = dims_of(ap.type->a, SourcePos{});
      else if (ap.type->kind != EType::Bool) {
        Space s = scalar_space(ap.type, SourcePos{});
        add_constraint("wtyp_" + ap.name,
                       h_and(h_bin(HK::Ge, h_name(ap.name), h_int(s.lo)),
                             h_bin(HK::Le, h_name(ap.name), h_int(s.hi))),
                       ns_ver);
      }
    }
    for (auto& ap : fm.abs_params) {
      const eb::FlatEventChain* chain = fm.find_chain(ap.event);
      cur_event = chain ? chain->levels.back().second : nullptr;
      witness_level = ap.level;
      wd_sel = h_name("SEL_" + ap.event);
      HExprPtr w = pred(ap.witness);
      witness_level = -1;
      cur_event = nullptr;
      wd_sel = nullptr;
      add_constraint("wit_" + ap.name,
                     h_imp(h_name("SEL_" + ap.event), std::move(w)), ns_ver);
    }
  }

  void do_invariants() {
    // shadow typing and gluing are assumptions; concrete typing and all
    // safety invariants are obligations
    for (auto& inv : fm.invariants) {
      wd_sel = nullptr;
      cur_event = nullptr;
      switch (inv.kind) {
        case eb::InvKind::Typing: {
          const std::string& var = typed_variable(inv);
          const eb::FlatVariable* v = fm.find_variable(var);
          if (v && !v->concrete)
            add_constraint("styp_" + inv.label, pred(inv.pred), ns_ver);
          else
            add_obligation("typing_" + inv.label, pred(inv.pred), ns_ver);
          break;
        }
        case eb::InvKind::Gluing:
          add_constraint("glue_" + inv.label, pred(inv.pred), ns_ver);
          break;
        case eb::InvKind::Safety:
          add_obligation("safety_" + inv.label, pred(inv.pred), ns_ver);
          break;
      }
    }
  }

  const std::string& typed_variable(const eb::FlatInvariant& inv) const {
    const EExprPtr& p = inv.pred;
    if ((p->k == EK::In || p->k == EK::Subset) && p->kids[0]->k == EK::Ident)
      return p->kids[0]->name;
    err(p->pos, "typing invariant '" + inv.label + "' is not of the form v ∈ E");
  }

  void do_obligations() {
    for (auto& w : wds) {
      HExprPtr e = w.sel ? h_imp(std::move(w.sel), std::move(w.cond)) : std::move(w.cond);
      add_obligation(w.label, std::move(e), ns_ver);
    }
    // deadlock-freeness: some guard held in the previous cycle
    if (!fm.events.empty()) {
      std::vector<HExprPtr> gs;
      for (auto& ev : fm.events) gs.push_back(h_name("GRD_" + ev.name));
      add_stream("PROP_DLF", HType::mk_bool(), ns_ver, SourcePos{});
      add_def(hll::HDef::Init, "PROP_DLF", {}, h_bool(true), ns_ver, true);
      add_def(hll::HDef::Next, "PROP_DLF", {}, h_disj(std::move(gs)), ns_ver, true);
      add_obligation("dlf", h_name("PROP_DLF"), ns_ver);
    }
  }

  void do_manifest() {
    std::ostringstream os;
    os << "machine: " << fm.name << "\n";
    if (!cfg.source.empty()) os << "source: " << cfg.source << "\n";
    os << "int_width: " << cfg.int_width << "\n";
    os << "overflow: "
       << (cfg.overflow == TranslationConfig::Overflow::Obligation ? "obligation" : "wrap")
       << "\n";
    os << "namespaces:\n";
    os << "  system: " << out.ns_system << "\n";
    os << "  contracts: " << out.ns_contracts << "\n";
    os << "  verification: " << out.ns_verification << "\n";
    os << "events:\n";
    for (auto& ev : fm.events) {
      os << "  - name: " << ev.name << "\n";
      os << "    guard: GRD_" << ev.name << "\n";
      os << "    select: SEL_" << ev.name << "\n";
      os << "    external: " << (ev.external ? "true" : "false") << "\n";
      if (ev.external) out.external_events.push_back(ev.name);
    }
    os << "params:\n";
    for (auto& p : out.params) {
      os << "  - stream: " << p.stream << "\n";
      os << "    event: " << p.event << "\n";
      os << "    param: " << p.param << "\n";
      os << "    type: " << hll::print_type(m, m.streams[m.stream_id(p.stream)].type) << "\n";
    }
    os << "blocks:\n";
    for (auto& b : m.blocks) {
      os << "  - name: " << b.name << "\n";
      os << "    signature: (";
      for (size_t i = 0; i < b.args.size(); i++)
        os << (i ? ", " : "") << hll::print_type(m, b.args[i]);
      os << ") -> " << hll::print_type(m, b.ret) << "\n";
      os << "    contracts:\n";
      for (auto& c : m.constraints)
        if (c.expr->k == HK::AllBlock && c.expr->name == b.name)
          os << "      - " << hll::print_expr(m, c.expr) << "\n";
      if (block_contracts[b.name] == 0) {
        os << "    status: unconstrained\n";
        out.warnings.push_back("block '" + b.name + "' has no contract constraints");
      } else {
        os << "    status: constrained\n";
      }
    }
    os << "constants:\n";
    for (auto& c : fm.constants) {
      if (c.external) continue;
      os << "  - name: " << c.name << "\n";
      auto it = pinned.find(c.name);
      if (it != pinned.end())
        os << "    value: " << i128_str(it->second) << "\n";
      else
        os << "    value: symbolic\n";
    }
    os << "variables:\n";
    for (auto& v : fm.variables) {
      os << "  - name: " << v.name << "\n";
      os << "    shadow: " << (v.concrete ? "false" : "true") << "\n";
    }
    os << "obligations:\n";
    for (auto& o : m.obligations) {
      std::string kind = "safety";
      if (o.label.rfind("typing_", 0) == 0) kind = "typing";
      else if (o.label.rfind("wd_", 0) == 0) kind = "wd";
      else if (o.label == "dlf") kind = "dlf";
      os << "  - name: " << o.label << "\n";
      os << "    kind: " << kind << "\n";
    }
    if (!out.warnings.empty()) {
      os << "warnings:\n";
      for (auto& w : out.warnings) os << "  - " << w << "\n";
    }
    out.manifest = os.str();
  }

  Translation run() {
    out.machine = fm.name;
    out.ns_system = fm.name;
    out.ns_contracts = fm.name + "_contracts";
    out.ns_verification = fm.name + "_verif";
    m.namespaces = {""};
    ns_sys = m.ns_id(out.ns_system);
    ns_con = m.ns_id(out.ns_contracts);
    ns_ver = m.ns_id(out.ns_verification);
    out.id_system = ns_sys;
    out.id_contracts = ns_con;
    out.id_verification = ns_ver;

    pin_enumerations();
    do_context();
    do_params();
    declare_variables();
    do_guards();
    do_variables();
    do_shadows();
    do_invariants();
    do_obligations();

    hll::elaborate(m);
    do_manifest();
    return std::move(out);
  }
};

}  // namespace

Translation translate(const eb::FlatMachine& fm, const TranslationConfig& cfg) {
  Translator t(fm, cfg);
  return t.run();
}

std::vector<std::pair<std::string, std::string>> Translation::files() const {
  std::vector<std::pair<std::string, std::string>> r;
  r.emplace_back(machine + ".hll", hll::print_namespace(model, id_system));
  r.emplace_back(machine + "_contracts.hll", hll::print_namespace(model, id_contracts));
  r.emplace_back(machine + "_verif.hll", hll::print_namespace(model, id_verification));
  r.emplace_back(machine + "_manifest.txt", manifest);
  return r;
}

}  // namespace ebv
