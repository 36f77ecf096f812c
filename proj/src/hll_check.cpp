#include "ebv/hll_check.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace ebv::hll {

namespace {

[[noreturn]] void err(const SourcePos& p, const std::string& m) {
  throw CompileError(p, m);
}

i128 add_ck(const SourcePos& p, i128 a, i128 b) {
  i128 r;
  if (!i128_add_ok(a, b, r))
    err(p, "width overflow of internal product terms");
  return r;
}
i128 mul_ck(const SourcePos& p, i128 a, i128 b) {
  i128 r;
  if (!i128_mul_ok(a, b, r))
    err(p, "width overflow of internal product terms");
  return r;
}

struct Scope {
  // quantifier binders: name -> folded range (or block id for contract vars)
  struct Entry {
    std::string name;
    bool is_block = false;
    int block = -1;
    i128 lo = 0, hi = 0;
  };
  std::vector<Entry> entries;

  const Entry* find(const std::string& n) const {
    for (auto it = entries.rbegin(); it != entries.rend(); ++it)
      if (it->name == n) return &*it;
    return nullptr;
  }
};

struct Checker {
  HllModel& m;
  Scope scope;
  explicit Checker(HllModel& mm) : m(mm) {}

  // ---- constant folding (uses valued constants only)

  i128 fold(const HExprPtr& e) {
    switch (e->k) {
      case HK::IntLit: return e->ival;
      case HK::BoolLit: return e->bval ? 1 : 0;
      case HK::Name: {
        int id = m.stream_id(e->name);
        if (id >= 0 && m.streams[id].is_const && m.streams[id].const_value)
          return fold(m.streams[id].const_value);
        auto it = m.enum_item_ids.find(e->name);
        if (it != m.enum_item_ids.end()) return it->second.second;
        err(e->pos, "'" + e->name + "' is not a compile-time constant");
      }
      case HK::Neg: return add_ck(e->pos, 0, -fold(e->kids[0]));
      case HK::Add: return add_ck(e->pos, fold(e->kids[0]), fold(e->kids[1]));
      case HK::Sub: return add_ck(e->pos, fold(e->kids[0]), -fold(e->kids[1]));
      case HK::Mul: return mul_ck(e->pos, fold(e->kids[0]), fold(e->kids[1]));
      case HK::Div: {
        i128 b = fold(e->kids[1]);
        if (b == 0) err(e->pos, "constant division by zero");
        return fold(e->kids[0]) / b;
      }
      case HK::Mod: {
        i128 b = fold(e->kids[1]);
        if (b == 0) err(e->pos, "constant modulo by zero");
        return fold(e->kids[0]) % b;
      }
      default:
        err(e->pos, "expression is not compile-time constant");
    }
  }

  // ---- types

  HTypePtr tc(const HExprPtr& e) {
    HTypePtr t = tc_inner(e);
    e->type = t;
    return t;
  }

  HTypePtr tc_bool(const HExprPtr& e) {
    HTypePtr t = tc(e);
    if (t->k != HType::Bool) err(e->pos, "expected a boolean expression");
    return t;
  }
  HTypePtr tc_int(const HExprPtr& e) {
    HTypePtr t = tc(e);
    if (t->k != HType::Int) err(e->pos, "expected an integer expression");
    return t;
  }

  static bool compat(const HType& a, const HType& b) {
    if (a.k != b.k) return false;
    switch (a.k) {
      case HType::Bool: return true;
      case HType::Int: return true;  // ranges may differ; storage wraps
      case HType::Enum: return a.enum_id == b.enum_id;
      case HType::Array: return a.size == b.size && compat(*a.elem, *b.elem);
      case HType::Struct: {
        if (a.fields.size() != b.fields.size()) return false;
        for (size_t i = 0; i < a.fields.size(); i++)
          if (a.fields[i].first != b.fields[i].first ||
              !compat(*a.fields[i].second, *b.fields[i].second))
            return false;
        return true;
      }
    }
    return false;
  }

  // runtime value interval of an integer-typed expression
  Bounds bounds(const HExprPtr& e) {
    switch (e->k) {
      case HK::IntLit: return {e->ival, e->ival};
      case HK::Name: {
        if (e->ref == HExpr::Ref::Binder) {
          const Scope::Entry* en = scope.find(e->name);
          if (en) return {en->lo, en->hi};
          // binder ranges were folded during tc; recompute from the node type
          return {e->type->lo, e->type->hi};
        }
        if (e->ref == HExpr::Ref::Stream) {
          const HStream& s = m.streams[e->ref_id];
          if (s.is_const && s.const_value) {
            i128 v = fold(s.const_value);
            return {v, v};
          }
          return stor(s.type);
        }
        return {e->type->lo, e->type->hi};
      }
      case HK::Index: return stor(e->type);
      case HK::Member: return stor(e->type);
      case HK::Call: return stor(e->type);
      case HK::Ite: {
        Bounds a = bounds(e->kids[1]), b = bounds(e->kids[2]);
        return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
      }
      case HK::Neg: {
        Bounds a = bounds(e->kids[0]);
        return {add_ck(e->pos, 0, -a.hi), add_ck(e->pos, 0, -a.lo)};
      }
      case HK::Add: {
        Bounds a = bounds(e->kids[0]), b = bounds(e->kids[1]);
        return {add_ck(e->pos, a.lo, b.lo), add_ck(e->pos, a.hi, b.hi)};
      }
      case HK::Sub: {
        Bounds a = bounds(e->kids[0]), b = bounds(e->kids[1]);
        return {add_ck(e->pos, a.lo, -b.hi), add_ck(e->pos, a.hi, -b.lo)};
      }
      case HK::Mul: {
        Bounds a = bounds(e->kids[0]), b = bounds(e->kids[1]);
        i128 c[4] = {mul_ck(e->pos, a.lo, b.lo), mul_ck(e->pos, a.lo, b.hi),
                     mul_ck(e->pos, a.hi, b.lo), mul_ck(e->pos, a.hi, b.hi)};
        return {std::min({c[0], c[1], c[2], c[3]}), std::max({c[0], c[1], c[2], c[3]})};
      }
      case HK::Div: {
        Bounds a = bounds(e->kids[0]), b = bounds(e->kids[1]);
        // candidates at interval endpoints and at divisors ±1; division by
        // zero yields 0 at runtime, so 0 joins the hull
        std::vector<i128> bs;
        for (i128 d : {b.lo, b.hi, (i128)-1, (i128)1})
          if (d != 0 && d >= b.lo && d <= b.hi) bs.push_back(d);
        i128 lo = 0, hi = 0;
        for (i128 d : bs)
          for (i128 n : {a.lo, a.hi}) {
            i128 q = n / d;
            lo = std::min(lo, q);
            hi = std::max(hi, q);
          }
        return {lo, hi};
      }
      case HK::Mod: {
        Bounds b = bounds(e->kids[1]);
        i128 mb = std::max(b.hi < 0 ? -b.hi : b.hi, b.lo < 0 ? -b.lo : b.lo);
        if (mb == 0) return {0, 0};
        Bounds a = bounds(e->kids[0]);
        // truncated semantics: result sign follows the dividend
        i128 lo = a.lo < 0 ? -(mb - 1) : 0;
        i128 hi = a.hi > 0 ? mb - 1 : 0;
        // tighten with the dividend's own magnitude
        lo = std::max(lo, a.lo < 0 ? a.lo : 0);
        hi = std::min(hi, a.hi > 0 ? a.hi : 0);
        return {lo, hi};
      }
      case HK::MinR:
      case HK::MaxR: {
        scope.entries.push_back({e->binders[0].var, false, -1, e->binders[0].clo,
                                 e->binders[0].chi});
        Bounds v = bounds(e->kids[1]);
        scope.entries.pop_back();
        // an empty selection yields 0
        return {std::min<i128>(v.lo, 0), std::max<i128>(v.hi, 0)};
      }
      case HK::Population: return {0, leaf_count(e->kids[0]->type)};
      default: return stor(e->type);
    }
  }

  Bounds stor(const HTypePtr& t) {
    switch (t->k) {
      case HType::Bool: return {0, 1};
      case HType::Int: return {t->lo, t->lo + t->storage_span() - 1};
      case HType::Enum: return {0, (i128)m.enums[t->enum_id].items.size() - 1};
      default: throw Error("storage range of a non-scalar type");
    }
  }

  HTypePtr tc_inner(const HExprPtr& e) {
    switch (e->k) {
      case HK::BoolLit: return HType::mk_bool();
      case HK::IntLit: return HType::mk_int(e->ival, e->ival);

      case HK::Name: {
        const Scope::Entry* b = scope.find(e->name);
        if (b) {
          if (b->is_block) {
            e->ref = HExpr::Ref::BlockVar;
            e->block = b->block;
            return HType::mk_struct({});  // placeholder; Member reads through it
          }
          e->ref = HExpr::Ref::Binder;
          return HType::mk_int(b->lo, b->hi);
        }
        auto it = m.enum_item_ids.find(e->name);
        if (it != m.enum_item_ids.end()) {
          e->ref = HExpr::Ref::EnumConst;
          e->ref_id = it->second.first;
          e->enum_val = it->second.second;
          return HType::mk_enum(it->second.first);
        }
        int id = m.stream_id(e->name);
        if (id < 0) err(e->pos, "unknown name '" + e->name + "'");
        e->ref = HExpr::Ref::Stream;
        e->ref_id = id;
        return m.streams[id].type;
      }

      case HK::Index: {
        HTypePtr a = tc(e->kids[0]);
        if (a->k != HType::Array) err(e->pos, "indexing a non-array");
        tc_int(e->kids[1]);
        return a->elem;
      }

      case HK::Member: {
        // block contract member: f.output / f.input_<k>
        if (e->kids[0]->k == HK::Name) {
          const Scope::Entry* b = scope.find(e->kids[0]->name);
          if (b && b->is_block) {
            tc(e->kids[0]);
            const HBlockDecl& bd = m.blocks[b->block];
            if (e->name == "output") return bd.ret;
            if (e->name.rfind("input_", 0) == 0) {
              int k = -1;
              try { k = std::stoi(e->name.substr(6)); } catch (...) {}
              if (k < 0 || k >= (int)bd.args.size())
                err(e->pos, "block '" + bd.name + "' has inputs input_0..input_" +
                                std::to_string(bd.args.size() - 1));
              return bd.args[k];
            }
            err(e->pos, "block members are 'output' and 'input_<k>'");
          }
        }
        HTypePtr a = tc(e->kids[0]);
        if (a->k != HType::Struct) err(e->pos, "member access on a non-struct");
        for (auto& f : a->fields)
          if (f.first == e->name) return f.second;
        err(e->pos, "no field '" + e->name + "'");
      }

      case HK::Not: tc_bool(e->kids[0]); return HType::mk_bool();
      case HK::And:
      case HK::Or:
      case HK::Imp:
      case HK::Eqv:
        tc_bool(e->kids[0]);
        tc_bool(e->kids[1]);
        return HType::mk_bool();

      case HK::Ite: {
        tc_bool(e->kids[0]);
        HTypePtr a = tc(e->kids[1]);
        HTypePtr b = tc(e->kids[2]);
        if (!compat(*a, *b)) err(e->pos, "branch types differ");
        if (a->k == HType::Int)
          return HType::mk_int(std::min(a->lo, b->lo), std::max(a->hi, b->hi));
        return a;
      }

      case HK::Eq:
      case HK::Ne: {
        HTypePtr a = tc(e->kids[0]);
        HTypePtr b = tc(e->kids[1]);
        if (!compat(*a, *b)) err(e->pos, "comparing incompatible types");
        return HType::mk_bool();
      }
      case HK::Lt:
      case HK::Le:
      case HK::Gt:
      case HK::Ge:
        tc_int(e->kids[0]);
        tc_int(e->kids[1]);
        return HType::mk_bool();

      case HK::Add:
      case HK::Sub:
      case HK::Mul:
      case HK::Div:
      case HK::Mod:
      case HK::Neg: {
        for (auto& k : e->kids) tc_int(k);
        Bounds bd = bounds(e);  // kids typed; safe to compute
        return HType::mk_int(bd.lo, bd.hi);
      }

      case HK::All:
      case HK::Some: {
        size_t pushed = 0;
        for (auto& b : e->binders) {
          b.clo = fold(b.lo);
          b.chi = fold(b.hi);
          if (b.clo > b.chi) err(e->pos, "empty quantifier range");
          scope.entries.push_back({b.var, false, -1, b.clo, b.chi});
          pushed++;
        }
        tc_bool(e->kids[0]);
        while (pushed--) scope.entries.pop_back();
        return HType::mk_bool();
      }

      case HK::MinR:
      case HK::MaxR: {
        HBinder& b = e->binders[0];
        b.clo = fold(b.lo);
        b.chi = fold(b.hi);
        if (b.clo > b.chi) err(e->pos, "empty quantifier range");
        scope.entries.push_back({b.var, false, -1, b.clo, b.chi});
        tc_bool(e->kids[0]);
        tc_int(e->kids[1]);
        scope.entries.pop_back();
        Bounds bd = bounds(e);
        return HType::mk_int(bd.lo, bd.hi);
      }

      case HK::Population: {
        HTypePtr a = tc(e->kids[0]);
        if (a->k != HType::Array) err(e->pos, "population() needs an array");
        for (auto& lp : leaf_paths(a))
          if (lp.type->k != HType::Bool)
            err(e->pos, "population() needs a boolean array");
        return HType::mk_int(0, leaf_count(a));
      }

      case HK::Call: {
        int bid = m.block_id(e->name);
        if (bid < 0) err(e->pos, "unknown block '" + e->name + "'");
        const HBlockDecl& bd = m.blocks[bid];
        if (e->kids.size() != bd.args.size())
          err(e->pos, "block '" + bd.name + "' takes " +
                          std::to_string(bd.args.size()) + " argument(s)");
        for (size_t i = 0; i < e->kids.size(); i++) {
          HTypePtr at = tc(e->kids[i]);
          if (!compat(*at, *bd.args[i]))
            err(e->kids[i]->pos, "argument type mismatch in call of '" + bd.name + "'");
          // an instance's inputs are per-cycle streams; an argument that
          // varies with a quantifier binder has no single per-cycle value
          std::function<void(const HExprPtr&)> scan = [&](const HExprPtr& a) {
            if (a->k == HK::Name && (a->ref == HExpr::Ref::Binder ||
                                     a->ref == HExpr::Ref::BlockVar))
              err(a->pos, "block call arguments cannot depend on quantifier "
                          "binders");
            for (auto& k : a->kids) scan(k);
          };
          scan(e->kids[i]);
        }
        e->block = bid;
        e->instance = (int)m.instances.size();
        HBlockInstance inst;
        inst.block = bid;
        int ordinal = 0;
        for (auto& other : m.instances)
          if (other.block == bid) ordinal++;
        inst.name = bd.name + "#" + std::to_string(ordinal);
        inst.args = e->kids;
        inst.pos = e->pos;
        m.instances.push_back(std::move(inst));
        return bd.ret;
      }

      case HK::AllBlock: {
        int bid = m.block_id(e->name);
        if (bid < 0) err(e->pos, "unknown block '" + e->name + "'");
        e->block = bid;
        scope.entries.push_back({e->binders[0].var, true, bid, 0, 0});
        tc_bool(e->kids[0]);
        scope.entries.pop_back();
        return HType::mk_bool();
      }
    }
    err(e->pos, "internal: unhandled expression kind");
  }

  // streams read by an expression at the current cycle
  void reads(const HExprPtr& e, std::set<int>& out) {
    if (e->k == HK::Name && e->ref == HExpr::Ref::Stream) out.insert(e->ref_id);
    for (auto& k : e->kids) reads(k, out);
  }
};

}  // namespace

Bounds storage_range(const HllModel& m, const HTypePtr& t) {
  Checker ck{const_cast<HllModel&>(m)};
  return ck.stor(t);
}

Bounds expr_bounds(const HllModel& m, const HExprPtr& e) {
  Checker ck{const_cast<HllModel&>(m)};
  return ck.bounds(e);
}

i128 fold_const(const HllModel& m, const HExprPtr& e) {
  Checker ck{const_cast<HllModel&>(m)};
  return ck.fold(e);
}

void elaborate(HllModel& m) {
  // reset elaboration artifacts so elaborate() is idempotent
  m.instances.clear();
  m.order0.clear();
  m.orderS.clear();
  for (auto& s : m.streams) {
    s.is_input = false;
    s.is_state = false;
    s.def_plain = s.def_init = s.def_next = -1;
  }

  Checker ck{m};

  // constants: values must fold and fit the declared type family
  for (auto& s : m.streams) {
    if (!s.is_const || !s.const_value) continue;
    if (!s.type->scalar())
      err(s.pos, "valued constants must be scalar (leave arrays symbolic)");
    HTypePtr vt = ck.tc(s.const_value);
    if (!Checker::compat(*vt, *s.type))
      err(s.pos, "constant value type mismatch");
    i128 v = ck.fold(s.const_value);
    Bounds r = ck.stor(s.type);
    if (v < r.lo || v > r.hi)
      err(s.pos, "constant value " + i128_str(v) + " is outside the declared range");
  }

  // definitions: resolve targets, check binder paths, type the right sides
  for (size_t di = 0; di < m.defs.size(); di++) {
    HDef& d = m.defs[di];
    int sid = m.stream_id(d.target);
    if (sid < 0) err(d.pos, "definition of unknown stream '" + d.target + "'");
    HStream& s = m.streams[sid];
    if (s.is_const) err(d.pos, "constants cannot be defined");
    d.stream = sid;

    // the target carries one index binder per array dimension, outermost
    // first; the residual scalar or struct is assigned as a unit
    HTypePtr t = s.type;
    size_t pi = 0;
    std::vector<Scope::Entry> binders;
    std::set<std::string> names;
    while (t->k == HType::Array) {
      if (pi >= d.path.size() || d.path[pi].is_field)
        err(d.pos, "array streams are defined element-wise: one index binder "
                   "per dimension");
      if (!names.insert(d.path[pi].binder).second)
        err(d.pos, "duplicate index binder '" + d.path[pi].binder + "'");
      binders.push_back({d.path[pi].binder, false, -1, 0, t->size - 1});
      t = t->elem;
      pi++;
    }
    if (pi < d.path.size()) {
      if (d.path[pi].is_field)
        err(d.pos, "field paths cannot be definition targets; assign the "
                   "whole struct");
      err(d.pos, "too many index binders for '" + d.target + "'");
    }

    for (auto& b : binders) ck.scope.entries.push_back(b);
    HTypePtr rt = ck.tc(d.rhs);
    ck.scope.entries.clear();
    if (!Checker::compat(*rt, *t))
      err(d.pos, "definition type mismatch for '" + d.target + "'");

    auto reg = [&](int& slot) {
      if (slot >= 0) err(d.pos, "stream '" + d.target + "' is defined twice");
      slot = (int)di;
    };
    if (d.kind == HDef::Plain) reg(s.def_plain);
    else if (d.kind == HDef::Init) reg(s.def_init);
    else reg(s.def_next);
  }

  for (auto& s : m.streams) {
    if (s.is_const) continue;
    bool p = s.def_plain >= 0, i = s.def_init >= 0, x = s.def_next >= 0;
    if (p && (i || x))
      err(s.pos, "stream '" + s.name + "' mixes a combinational definition "
                 "with I()/X()");
    if (i != x)
      err(s.pos, "stream '" + s.name + "' needs both I() and X() definitions");
    s.is_state = i && x;
    s.is_input = !p && !i && !x;
  }

  // constraints and obligations are boolean
  for (auto& c : m.constraints) ck.tc_bool(c.expr);
  for (auto& o : m.obligations) ck.tc_bool(o.expr);

  // evaluation orders.  cycle 0 evaluates I() and combinational definitions
  // against each other; steady state orders combinational definitions only
  // (state streams hold latched values, X() runs after everything settles).
  auto build_order = [&](bool with_init, std::vector<int>& out) {
    // def index -> prerequisite def indices
    std::map<int, std::set<int>> pre;
    std::vector<int> nodes;
    auto providing = [&](int sid) -> int {
      const HStream& s = m.streams[sid];
      if (s.def_plain >= 0) return s.def_plain;
      if (with_init && s.def_init >= 0) return s.def_init;
      return -1;
    };
    for (size_t di = 0; di < m.defs.size(); di++) {
      const HDef& d = m.defs[di];
      bool in_phase = d.kind == HDef::Plain || (with_init && d.kind == HDef::Init);
      if (!in_phase) continue;
      nodes.push_back((int)di);
      std::set<int> rd;
      ck.reads(d.rhs, rd);
      for (int sid : rd) {
        int pd = providing(sid);
        if (pd >= 0 && pd != (int)di) pre[(int)di].insert(pd);
      }
    }
    // multiple defs of one stream (struct fields): same-stream defs group;
    // order by Kahn with stable (declaration-order) tie-break
    std::map<int, int> missing;
    std::map<int, std::vector<int>> rdeps;
    for (int n : nodes) missing[n] = (int)pre[n].size();
    for (int n : nodes)
      for (int p : pre[n]) rdeps[p].push_back(n);
    std::vector<int> ready;
    for (int n : nodes)
      if (missing[n] == 0) ready.push_back(n);
    size_t head = 0;
    std::vector<int> order;
    while (head < ready.size()) {
      // pick the smallest ready node for determinism
      std::sort(ready.begin() + head, ready.end());
      int n = ready[head++];
      order.push_back(n);
      for (int r : rdeps[n])
        if (--missing[r] == 0) ready.push_back(r);
    }
    if (order.size() != nodes.size()) {
      for (int n : nodes)
        if (missing[n] > 0)
          err(m.defs[n].pos, "combinational cycle through '" + m.defs[n].target + "'");
    }
    out = order;
  };
  build_order(true, m.order0);
  build_order(false, m.orderS);

  m.elaborated = true;
}

}  // namespace ebv::hll
