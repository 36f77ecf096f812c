#include "ebv/hll_interp.hpp"

#include "ebv/hll_check.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace ebv::hll {

namespace {

uint64_t fnv(uint64_t h, uint64_t x) {
  for (int i = 0; i < 8; i++) {
    h ^= (x >> (8 * i)) & 0xff;
    h *= 1099511628211ull;
  }
  return h;
}
uint64_t fnv_i128(uint64_t h, i128 v) {
  h = fnv(h, (uint64_t)(unsigned __int128)v);
  h = fnv(h, (uint64_t)((unsigned __int128)v >> 64));
  return h;
}

// leaf offset/width helpers over flat values
i128 field_offset(const HTypePtr& st, const std::string& field) {
  i128 off = 0;
  for (auto& f : st->fields) {
    if (f.first == field) return off;
    off += leaf_count(f.second);
  }
  throw Error("internal: field lookup after typecheck");
}

Value slice(const Value& v, i128 off, i128 n) {
  return Value(v.begin() + (size_t)off, v.begin() + (size_t)(off + n));
}

}  // namespace

bool StepResult::all_constraints() const {
  return std::all_of(constraints_ok.begin(), constraints_ok.end(),
                     [](char c) { return c != 0; });
}
bool StepResult::all_obligations() const {
  return std::all_of(obligations_ok.begin(), obligations_ok.end(),
                     [](char c) { return c != 0; });
}

BlockResolver sampler_resolver(uint64_t seed) {
  return [seed](const HllModel& m, int instance, const std::vector<Value>& args,
                int) -> Value {
    const HBlockInstance& inst = m.instances[instance];
    uint64_t h = fnv(14695981039346656037ull, seed);
    h = fnv(h, (uint64_t)inst.block);
    for (auto& a : args)
      for (i128 leaf : a) h = fnv_i128(h, leaf);
    const HTypePtr& rt = m.blocks[inst.block].ret;
    Value out;
    int li = 0;
    for (auto& lp : leaf_paths(rt)) {
      uint64_t hl = fnv(h, (uint64_t)li++);
      switch (lp.type->k) {
        case HType::Bool: out.push_back((i128)(hl & 1)); break;
        case HType::Enum:
          out.push_back((i128)(hl % m.enums[lp.type->enum_id].items.size()));
          break;
        case HType::Int: {
          i128 span = lp.type->storage_span();
          out.push_back(lp.type->lo + (i128)(hl % (uint64_t)span));
          break;
        }
        default: throw Error("internal: non-scalar leaf");
      }
    }
    return out;
  };
}

Interp::Interp(const HllModel& m, std::map<int, Value> const_values,
               BlockResolver resolver)
    : m_(m), resolve_(std::move(resolver)) {
  if (!m.elaborated) throw Error("model is not elaborated");
  cur_.resize(m.streams.size());
  next_.resize(m.streams.size());
  has_cur_.assign(m.streams.size(), 0);
  for (size_t i = 0; i < m.streams.size(); i++) {
    const HStream& s = m.streams[i];
    if (!s.is_const) continue;
    if (s.const_value) {
      consts_[(int)i] = Value{fold_const(m, s.const_value)};
    } else {
      auto it = const_values.find((int)i);
      if (it == const_values.end())
        throw Error("no value given for symbolic constant '" + s.name + "'");
      validate_external(s.type, it->second, "constant '" + s.name + "'", s.pos);
      consts_[(int)i] = it->second;
    }
  }
}

const Value& Interp::value(int stream) const {
  if (!has_cur_[stream])
    throw Error("stream '" + m_.streams[stream].name + "' has no value yet");
  return cur_[stream];
}

const Value& Interp::constant(int stream) const {
  auto it = consts_.find(stream);
  if (it == consts_.end())
    throw Error("'" + m_.streams[stream].name + "' is not a constant");
  return it->second;
}

void Interp::hazard(Hazard::Kind k, const SourcePos& p, const std::string& d) {
  if (hz_) hz_->push_back({k, p, d});
}

void Interp::validate_external(const HTypePtr& t, const Value& v,
                               const std::string& what, const SourcePos& p) const {
  auto lps = leaf_paths(t);
  if ((i128)v.size() != (i128)lps.size())
    throw CompileError(p, what + ": expected " + std::to_string(lps.size()) +
                              " leaf value(s), got " + std::to_string(v.size()));
  for (size_t i = 0; i < lps.size(); i++) {
    const HTypePtr& lt = lps[i].type;
    i128 x = v[i];
    bool ok = true;
    switch (lt->k) {
      case HType::Bool: ok = x == 0 || x == 1; break;
      case HType::Enum:
        ok = x >= 0 && x < (i128)m_.enums[lt->enum_id].items.size();
        break;
      case HType::Int:
        ok = x >= lt->lo && x <= lt->lo + lt->storage_span() - 1;
        break;
      default: ok = false;
    }
    if (!ok)
      throw CompileError(p, what + lps[i].suffix + ": value " + i128_str(x) +
                                " is outside the representable range");
  }
}

Value Interp::wrap_into(const HTypePtr& t, Value v, const SourcePos& p,
                        const std::string& what) {
  auto lps = leaf_paths(t);
  assert(v.size() == lps.size());
  for (size_t i = 0; i < lps.size(); i++) {
    const HTypePtr& lt = lps[i].type;
    if (lt->k != HType::Int) continue;
    i128 span = lt->storage_span();
    i128 off = ((v[i] - lt->lo) % span + span) % span;
    i128 wrapped = lt->lo + off;
    if (wrapped != v[i]) {
      hazard(Hazard::StorageWrap, p,
             what + lps[i].suffix + ": " + i128_str(v[i]) + " wraps to " +
                 i128_str(wrapped));
      v[i] = wrapped;
    }
  }
  return v;
}

i128 Interp::eval1(const HExprPtr& e, Env& env) {
  Value v = eval(e, env);
  assert(v.size() == 1);
  return v[0];
}

Value Interp::eval(const HExprPtr& e, Env& env) {
  switch (e->k) {
    case HK::BoolLit: return {e->bval ? (i128)1 : 0};
    case HK::IntLit: return {e->ival};

    case HK::Name:
      switch (e->ref) {
        case HExpr::Ref::Binder: {
          for (auto it = env.binders.rbegin(); it != env.binders.rend(); ++it)
            if (it->first == e->name) return {it->second};
          throw Error("internal: unbound binder '" + e->name + "'");
        }
        case HExpr::Ref::EnumConst: return {(i128)e->enum_val};
        case HExpr::Ref::Stream: {
          const HStream& s = m_.streams[e->ref_id];
          if (s.is_const) return consts_.at(e->ref_id);
          if (!has_cur_[e->ref_id])
            throw Error("internal: read of undefined stream '" + s.name + "'");
          return cur_[e->ref_id];
        }
        case HExpr::Ref::BlockVar:
          throw Error("internal: bare contract variable");
        default: throw Error("internal: unresolved name");
      }

    case HK::Index: {
      Value a = eval(e->kids[0], env);
      i128 idx = eval1(e->kids[1], env);
      const HTypePtr& at = e->kids[0]->type;
      i128 n = at->size;
      i128 stride = leaf_count(at->elem);
      if (idx < 0 || idx >= n) {
        hazard(Hazard::IndexClamp, e->pos,
               "index " + i128_str(idx) + " outside [0, " + i128_str(n - 1) +
                   "] reads the last element");
        idx = n - 1;
      }
      return slice(a, idx * stride, stride);
    }

    case HK::Member: {
      if (e->kids[0]->k == HK::Name && e->kids[0]->ref == HExpr::Ref::BlockVar) {
        if (env.block_var != e->kids[0]->name || env.block_inst < 0)
          throw Error("internal: contract variable outside its quantifier");
        const BlockCall& bc = calls_[env.block_inst];
        if (e->name == "output") return bc.out;
        int k = std::stoi(e->name.substr(6));
        return bc.args[k];
      }
      Value a = eval(e->kids[0], env);
      const HTypePtr& st = e->kids[0]->type;
      i128 off = field_offset(st, e->name);
      return slice(a, off, leaf_count(e->type));
    }

    case HK::Not: return {eval1(e->kids[0], env) ? (i128)0 : 1};
    case HK::And: {
      // both sides evaluate (calls and hazards are not short-circuited)
      i128 a = eval1(e->kids[0], env), b = eval1(e->kids[1], env);
      return {a && b ? (i128)1 : 0};
    }
    case HK::Or: {
      i128 a = eval1(e->kids[0], env), b = eval1(e->kids[1], env);
      return {a || b ? (i128)1 : 0};
    }
    case HK::Imp: {
      i128 a = eval1(e->kids[0], env), b = eval1(e->kids[1], env);
      return {!a || b ? (i128)1 : 0};
    }
    case HK::Eqv: {
      i128 a = eval1(e->kids[0], env), b = eval1(e->kids[1], env);
      return {(!a == !b) ? (i128)1 : 0};
    }

    case HK::Ite: {
      i128 c = eval1(e->kids[0], env);
      Value a = eval(e->kids[1], env);
      Value b = eval(e->kids[2], env);
      return c ? a : b;
    }

    case HK::Eq:
    case HK::Ne: {
      Value a = eval(e->kids[0], env);
      Value b = eval(e->kids[1], env);
      bool eq = a == b;
      return {(e->k == HK::Eq ? eq : !eq) ? (i128)1 : 0};
    }

    case HK::Lt: return {eval1(e->kids[0], env) < eval1(e->kids[1], env) ? (i128)1 : 0};
    case HK::Le: return {eval1(e->kids[0], env) <= eval1(e->kids[1], env) ? (i128)1 : 0};
    case HK::Gt: return {eval1(e->kids[0], env) > eval1(e->kids[1], env) ? (i128)1 : 0};
    case HK::Ge: return {eval1(e->kids[0], env) >= eval1(e->kids[1], env) ? (i128)1 : 0};

    case HK::Add: return {eval1(e->kids[0], env) + eval1(e->kids[1], env)};
    case HK::Sub: return {eval1(e->kids[0], env) - eval1(e->kids[1], env)};
    case HK::Mul: return {eval1(e->kids[0], env) * eval1(e->kids[1], env)};
    case HK::Neg: return {-eval1(e->kids[0], env)};
    case HK::Div: {
      i128 a = eval1(e->kids[0], env), b = eval1(e->kids[1], env);
      if (b == 0) {
        hazard(Hazard::DivZero, e->pos, "division by zero gives 0");
        return {0};
      }
      return {a / b};
    }
    case HK::Mod: {
      i128 a = eval1(e->kids[0], env), b = eval1(e->kids[1], env);
      if (b == 0) {
        hazard(Hazard::ModZero, e->pos, "modulo by zero gives 0");
        return {0};
      }
      return {a % b};
    }

    case HK::All:
    case HK::Some: {
      bool all = e->k == HK::All;
      // iterate the binder cube in row-major order
      size_t nb = e->binders.size();
      std::vector<i128> iv(nb);
      for (size_t i = 0; i < nb; i++) iv[i] = e->binders[i].clo;
      bool acc = all;
      for (;;) {
        for (size_t i = 0; i < nb; i++)
          env.binders.emplace_back(e->binders[i].var, iv[i]);
        i128 b = eval1(e->kids[0], env);
        env.binders.resize(env.binders.size() - nb);
        if (all) acc = acc && b;
        else acc = acc || b;
        size_t i = nb;
        while (i-- > 0) {
          if (iv[i] < e->binders[i].chi) { iv[i]++; break; }
          iv[i] = e->binders[i].clo;
          if (i == 0) { i = SIZE_MAX; break; }
        }
        if (i == SIZE_MAX) break;
      }
      return {acc ? (i128)1 : 0};
    }

    case HK::MinR:
    case HK::MaxR: {
      const HBinder& b = e->binders[0];
      bool any = false;
      i128 best = 0;
      for (i128 i = b.clo; i <= b.chi; i++) {
        env.binders.emplace_back(b.var, i);
        i128 sel = eval1(e->kids[0], env);
        i128 v = eval1(e->kids[1], env);
        env.binders.pop_back();
        if (!sel) continue;
        if (!any) { best = v; any = true; }
        else best = e->k == HK::MinR ? std::min(best, v) : std::max(best, v);
      }
      if (!any) {
        hazard(Hazard::EmptyReduce, e->pos, "empty selection gives 0");
        return {0};
      }
      return {best};
    }

    case HK::Population: {
      Value a = eval(e->kids[0], env);
      i128 n = 0;
      for (i128 x : a) n += x != 0;
      return {n};
    }

    case HK::Call: {
      std::vector<Value> args;
      for (auto& k : e->kids) args.push_back(eval(k, env));
      Value out = resolve_(m_, e->instance, args, cycle_);
      const HBlockDecl& bd = m_.blocks[e->block];
      validate_external(bd.ret, out, "output of '" + bd.name + "'", e->pos);
      calls_[e->instance] = {e->instance, std::move(args), out};
      called_[e->instance] = 1;
      return out;
    }

    case HK::AllBlock: {
      bool acc = true;
      for (size_t i = 0; i < m_.instances.size(); i++) {
        if (m_.instances[i].block != e->block || !called_[i]) continue;
        Env inner = env;
        inner.block_var = e->binders[0].var;
        inner.block_inst = (int)i;
        acc = acc && eval1(e->kids[0], inner) != 0;
      }
      return {acc ? (i128)1 : 0};
    }
  }
  throw Error("internal: unhandled expression kind");
}

void Interp::run_def(const HDef& d, bool into_next) {
  const HStream& s = m_.streams[d.stream];
  Value& dst = into_next ? next_[d.stream] : cur_[d.stream];
  if (dst.size() != (size_t)leaf_count(s.type))
    dst.assign((size_t)leaf_count(s.type), 0);

  // iterate the element cube named by the target binders
  std::vector<std::pair<std::string, i128>> dims;  // binder -> extent
  HTypePtr t = s.type;
  for (auto& seg : d.path) {
    dims.emplace_back(seg.binder, t->size);
    t = t->elem;
  }
  i128 stride = leaf_count(t);

  std::vector<i128> iv(dims.size(), 0);
  Env env;
  for (;;) {
    i128 off = 0;
    HTypePtr tt = s.type;
    for (size_t i = 0; i < dims.size(); i++) {
      off = off * tt->size + iv[i];
      tt = tt->elem;
    }
    off *= stride;
    env.binders.clear();
    for (size_t i = 0; i < dims.size(); i++)
      env.binders.emplace_back(dims[i].first, iv[i]);
    Value v = eval(d.rhs, env);
    v = wrap_into(t, std::move(v), d.pos, s.name);
    std::copy(v.begin(), v.end(), dst.begin() + (size_t)off);

    size_t i = dims.size();
    if (i == 0) break;
    while (i-- > 0) {
      if (iv[i] + 1 < dims[i].second) { iv[i]++; break; }
      iv[i] = 0;
      if (i == 0) { i = SIZE_MAX; break; }
    }
    if (i == SIZE_MAX) break;
  }
  if (!into_next) has_cur_[d.stream] = 1;
}

StepResult Interp::step(const std::map<int, Value>& inputs) {
  cycle_++;
  StepResult r;
  r.cycle = cycle_;
  hz_ = &r.hazards;

  // latch state streams from the previous X phase
  if (cycle_ > 0) {
    for (size_t i = 0; i < m_.streams.size(); i++)
      if (m_.streams[i].is_state) {
        cur_[i] = next_[i];
        has_cur_[i] = 1;
      }
  }
  // constants are always readable
  for (auto& [id, v] : consts_) {
    cur_[id] = v;
    has_cur_[id] = 1;
  }
  // free inputs
  for (size_t i = 0; i < m_.streams.size(); i++) {
    const HStream& s = m_.streams[i];
    if (s.is_const || !s.is_input) continue;
    auto it = inputs.find((int)i);
    if (it == inputs.end())
      throw Error("no value for input '" + s.name + "' at cycle " +
                  std::to_string(cycle_));
    validate_external(s.type, it->second, "input '" + s.name + "'", s.pos);
    cur_[i] = it->second;
    has_cur_[i] = 1;
  }

  calls_.assign(m_.instances.size(), {});
  called_.assign(m_.instances.size(), 0);

  const std::vector<int>& order = cycle_ == 0 ? m_.order0 : m_.orderS;
  for (int di : order) run_def(m_.defs[di], false);

  // next-state phase: every X() reads the settled current cycle
  for (auto& d : m_.defs)
    if (d.kind == HDef::Next) run_def(d, true);

  Env env;
  for (auto& c : m_.constraints)
    r.constraints_ok.push_back(eval1(c.expr, env) != 0);
  for (auto& o : m_.obligations)
    r.obligations_ok.push_back(eval1(o.expr, env) != 0);

  r.calls = calls_;
  hz_ = nullptr;
  return r;
}

std::string Interp::leaf_str(const HTypePtr& scalar, i128 v) const {
  switch (scalar->k) {
    case HType::Bool: return v ? "true" : "false";
    case HType::Enum: {
      const auto& items = m_.enums[scalar->enum_id].items;
      if (v >= 0 && v < (i128)items.size()) return items[(size_t)v];
      return i128_str(v);
    }
    default: return i128_str(v);
  }
}

std::string Interp::trace_csv_header() const { return "cycle,stream,value\n"; }

std::string Interp::trace_csv_rows() const {
  std::ostringstream out;
  for (size_t i = 0; i < m_.streams.size(); i++) {
    const HStream& s = m_.streams[i];
    if (s.is_const || !has_cur_[i]) continue;
    auto lps = leaf_paths(s.type);
    for (size_t li = 0; li < lps.size(); li++)
      out << cycle_ << "," << s.name << lps[li].suffix << ","
          << leaf_str(lps[li].type, cur_[i][li]) << "\n";
  }
  return out.str();
}

}  // namespace ebv::hll
