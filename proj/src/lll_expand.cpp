#include "ebv/lll_expand.hpp"

#include "ebv/hll_check.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace ebv::lll {

namespace {

using hll::HDef;
using hll::HExpr;
using hll::HExprPtr;
using hll::HK;
using hll::HllModel;
using hll::HStream;
using hll::HType;
using hll::HTypePtr;

// internal circuit widths are capped well inside i128 so interval arithmetic
// cannot itself overflow
constexpr int kWidthCap = 120;

int width_bits(i128 span) {  // smallest w with span <= 2^w - 1
  int w = 0;
  while (span > 0) {
    span >>= 1;
    w++;
  }
  return w;
}

i128 field_offset(const HTypePtr& st, const std::string& field) {
  i128 off = 0;
  for (auto& f : st->fields) {
    if (f.first == field) return off;
    off += hll::leaf_count(f.second);
  }
  throw Error("internal: field lookup after typecheck");
}

// ------------------------------------------------------------ gate builder

// Folding + structural sharing over the three-operator alphabet.
struct Builder {
  Netlist& n;
  std::map<std::tuple<int, uint32_t, uint32_t>, uint32_t> cse;
  std::map<uint32_t, uint32_t> comp;  // known complement pairs

  explicit Builder(Netlist& nl) : n(nl) {}

  bool complements(uint32_t a, uint32_t b) const {
    auto it = comp.find(a);
    return it != comp.end() && it->second == b;
  }

  uint32_t mk(Op op, uint32_t a, uint32_t b) {
    auto key = std::make_tuple((int)op, a, b);
    auto it = cse.find(key);
    if (it != cse.end()) return it->second;
    uint32_t v = n.add_gate(op, a, b);
    cse.emplace(key, v);
    if (op == Op::Neg) {
      comp.emplace(a, v);
      comp.emplace(v, a);
    }
    return v;
  }

  uint32_t neg(uint32_t a) {
    if (a <= 1) return a ^ 1u;
    auto it = comp.find(a);
    if (it != comp.end()) return it->second;
    return mk(Op::Neg, a, 0);
  }

  uint32_t impl(uint32_t a, uint32_t b) {
    if (a == 0 || b == 1 || a == b) return 1;
    if (a == 1) return b;
    if (b == 0) return neg(a);
    if (complements(a, b)) return b;  // a->~a is ~a; ~b->b is b
    return mk(Op::Impl, a, b);
  }

  uint32_t equiv(uint32_t a, uint32_t b) {
    if (a == b) return 1;
    if (complements(a, b)) return 0;
    if (a == 1) return b;
    if (b == 1) return a;
    if (a == 0) return neg(b);
    if (b == 0) return neg(a);
    if (a > b) std::swap(a, b);
    return mk(Op::Equiv, a, b);
  }

  uint32_t and_(uint32_t a, uint32_t b) { return neg(impl(a, neg(b))); }
  uint32_t or_(uint32_t a, uint32_t b) { return impl(neg(a), b); }
  uint32_t xor_(uint32_t a, uint32_t b) { return neg(equiv(a, b)); }
  uint32_t mux(uint32_t c, uint32_t t, uint32_t e) {
    if (c == 1) return t;
    if (c == 0) return e;
    if (t == e) return t;
    return or_(and_(c, t), and_(neg(c), e));
  }
};

// ------------------------------------------------------------ scalar values

// Circuit value of one scalar leaf.  Integers are a constant offset plus
// unsigned bits (LSB first) with an exact value interval [lo, hi]; bools are
// a single bit; enums are one-hot or binary per the active variant.
struct BV {
  HType::K kind = HType::Bool;
  std::vector<uint32_t> bits;
  i128 off = 0, lo = 0, hi = 0;  // Int only; off <= lo <= hi
  int enum_id = -1;
};

using Flat = std::vector<BV>;  // leaves in canonical DFS order

// ------------------------------------------------------------ expander

struct Expander {
  const HllModel& m;
  Variant variant;
  Netlist nl;
  Builder b{nl};
  BitMap map;

  struct Env {
    std::vector<std::pair<std::string, i128>> binders;
    std::string block_var;
    int block_inst = -1;
  };

  std::vector<char> have_val, in_progress;
  std::vector<Flat> val;  // per stream, its per-cycle value point

  struct StateBits {
    std::vector<uint32_t> latch;  // one latch per bit
    std::vector<uint32_t> init;   // constant var, or 0 for first-cycle mux
  };
  std::map<int, StateBits> state_bits;

  struct Inst {
    bool expanded = false;
    bool init_only = false;  // call site lives in an I() definition
    Flat out;
    std::vector<Flat> args;
  };
  std::vector<Inst> insts;

  uint32_t init_var = 0;  // "$init" first-cycle latch, made on demand
  bool in_init_def = false;

  Expander(const HllModel& model, Variant v) : m(model), variant(v) {
    if (!m.elaborated) throw Error("model is not elaborated");
    have_val.assign(m.streams.size(), 0);
    in_progress.assign(m.streams.size(), 0);
    val.resize(m.streams.size());
    insts.resize(m.instances.size());
  }

  [[noreturn]] void err(const SourcePos& p, const std::string& msg) {
    throw CompileError(p, msg);
  }

  // ---------------------------------------------------------- bit vectors

  static uint32_t bit_at(const std::vector<uint32_t>& v, size_t i) {
    return i < v.size() ? v[i] : 0;
  }

  static std::vector<uint32_t> const_bits(i128 v, int w) {
    std::vector<uint32_t> out((size_t)w);
    for (int i = 0; i < w; i++) out[i] = (v >> i) & 1 ? 1 : 0;
    return out;
  }

  void full_add(uint32_t x, uint32_t y, uint32_t c, uint32_t& s, uint32_t& co) {
    if (variant == Variant::A) {
      uint32_t t = b.xor_(x, y);
      s = b.xor_(t, c);
      co = b.or_(b.and_(x, y), b.and_(c, t));
    } else {
      uint32_t e = b.equiv(x, y);
      s = b.equiv(e, c);           // three-way parity
      co = b.mux(b.neg(e), c, x);  // differing bits pass the carry through
    }
  }

  // unsigned add modulo 2^w (operands zero-extended, carry-out dropped)
  std::vector<uint32_t> uadd(const std::vector<uint32_t>& x,
                             const std::vector<uint32_t>& y, int w,
                             uint32_t cin = 0) {
    std::vector<uint32_t> out((size_t)w);
    if (variant == Variant::A) {
      uint32_t c = cin;
      for (int i = 0; i < w; i++) full_add(bit_at(x, i), bit_at(y, i), c, out[i], c);
    } else {
      // carry-select in blocks of four: both carry cases, then pick
      uint32_t c = cin;
      for (int blk = 0; blk < w; blk += 4) {
        int end = std::min(w, blk + 4);
        if (c <= 1) {
          for (int i = blk; i < end; i++)
            full_add(bit_at(x, i), bit_at(y, i), c, out[i], c);
          continue;
        }
        std::vector<uint32_t> s0(end - blk), s1(end - blk);
        uint32_t c0 = 0, c1 = 1;
        for (int i = blk; i < end; i++) {
          full_add(bit_at(x, i), bit_at(y, i), c0, s0[i - blk], c0);
          full_add(bit_at(x, i), bit_at(y, i), c1, s1[i - blk], c1);
        }
        for (int i = blk; i < end; i++) out[i] = b.mux(c, s1[i - blk], s0[i - blk]);
        c = b.mux(c, c1, c0);
      }
    }
    return out;
  }

  // x - y modulo 2^w (exact when x >= y)
  std::vector<uint32_t> usub(const std::vector<uint32_t>& x,
                             const std::vector<uint32_t>& y, int w) {
    std::vector<uint32_t> ny((size_t)w);
    for (int i = 0; i < w; i++) ny[i] = b.neg(bit_at(y, i));
    return uadd(x, ny, w, 1);
  }

  // unsigned x < y
  uint32_t ult(const std::vector<uint32_t>& x, const std::vector<uint32_t>& y) {
    size_t w = std::max(x.size(), y.size());
    if (w == 0) return 0;
    if (variant == Variant::A) {
      uint32_t lt = 0;
      for (size_t i = 0; i < w; i++) {
        uint32_t xi = bit_at(x, i), yi = bit_at(y, i);
        lt = b.mux(b.equiv(xi, yi), lt, yi);
      }
      return lt;
    }
    // balanced most-significant-first tree of (lt, eq) pairs
    std::function<std::pair<uint32_t, uint32_t>(size_t, size_t)> rec =
        [&](size_t lo, size_t hi) -> std::pair<uint32_t, uint32_t> {
      if (hi - lo == 1) {
        uint32_t xi = bit_at(x, lo), yi = bit_at(y, lo);
        return {b.and_(b.neg(xi), yi), b.equiv(xi, yi)};
      }
      size_t mid = (lo + hi) / 2;
      auto l = rec(lo, mid), h = rec(mid, hi);
      return {b.or_(h.first, b.and_(h.second, l.first)), b.and_(h.second, l.second)};
    };
    return rec(0, w).first;
  }

  uint32_t fold_and(std::vector<uint32_t> xs) {
    if (xs.empty()) return 1;
    if (variant == Variant::A) {
      uint32_t acc = xs[0];
      for (size_t i = 1; i < xs.size(); i++) acc = b.and_(acc, xs[i]);
      return acc;
    }
    while (xs.size() > 1) {
      std::vector<uint32_t> next;
      for (size_t i = 0; i + 1 < xs.size(); i += 2) next.push_back(b.and_(xs[i], xs[i + 1]));
      if (xs.size() & 1) next.push_back(xs.back());
      xs = std::move(next);
    }
    return xs[0];
  }

  uint32_t fold_or(std::vector<uint32_t> xs) {
    if (xs.empty()) return 0;
    if (variant == Variant::A) {
      uint32_t acc = xs[0];
      for (size_t i = 1; i < xs.size(); i++) acc = b.or_(acc, xs[i]);
      return acc;
    }
    while (xs.size() > 1) {
      std::vector<uint32_t> next;
      for (size_t i = 0; i + 1 < xs.size(); i += 2) next.push_back(b.or_(xs[i], xs[i + 1]));
      if (xs.size() & 1) next.push_back(xs.back());
      xs = std::move(next);
    }
    return xs[0];
  }

  // ---------------------------------------------------------- int values

  int want_width(i128 span, const SourcePos& p) {
    int w = width_bits(span);
    if (w > kWidthCap)
      err(p, "internal term needs " + std::to_string(w) +
                 " bits, more than the " + std::to_string(kWidthCap) +
                 "-bit expansion limit");
    return w;
  }

  static BV iconst(i128 v) { return BV{HType::Int, {}, v, v, v, -1}; }

  static BV norm(BV x) {
    if (x.kind == HType::Int && x.lo == x.hi) return iconst(x.lo);
    return x;
  }

  // re-express x as new_off + bits without changing its value
  BV rebase(const BV& x, i128 new_off, const SourcePos& p) {
    if (new_off > x.lo) throw Error("internal: rebase above the interval");
    int w = want_width(x.hi - new_off, p);
    i128 mask = w >= 127 ? -1 : (((i128)1 << w) - 1);
    i128 c = (x.off - new_off) & mask;  // two's-complement low bits
    std::vector<uint32_t> bits = uadd(x.bits, const_bits(c, w), w);
    return BV{HType::Int, std::move(bits), new_off, x.lo, x.hi, -1};
  }

  BV iadd(const BV& x, const BV& y, const SourcePos& p) {
    if (x.lo == x.hi && y.lo == y.hi) return iconst(x.lo + y.lo);
    i128 span = (x.hi - x.off) + (y.hi - y.off);
    int w = std::max<int>(want_width(span, p),
                          (int)std::max(x.bits.size(), y.bits.size()));
    return norm(BV{HType::Int, uadd(x.bits, y.bits, w), x.off + y.off,
                   x.lo + y.lo, x.hi + y.hi, -1});
  }

  BV ineg(const BV& x, const SourcePos&) {
    if (x.bits.empty()) return iconst(-x.off);
    std::vector<uint32_t> bits(x.bits.size());
    for (size_t i = 0; i < bits.size(); i++) bits[i] = b.neg(x.bits[i]);
    i128 top = ((i128)1 << x.bits.size()) - 1;
    return norm(BV{HType::Int, std::move(bits), -x.off - top, -x.hi, -x.lo, -1});
  }

  BV isub(const BV& x, const BV& y, const SourcePos& p) {
    return iadd(x, ineg(y, p), p);
  }

  BV shifted(const BV& x, int k) {  // value * 2^k, k >= 0
    BV out = x;
    out.bits.insert(out.bits.begin(), (size_t)k, 0u);
    out.off <<= k;
    out.lo <<= k;
    out.hi <<= k;
    return out;
  }

  BV cmul(const BV& x, i128 c, const SourcePos& p) {
    if (c == 0 || (x.lo == 0 && x.hi == 0)) return iconst(0);
    if (c < 0) return ineg(cmul(x, -c, p), p);
    BV acc = iconst(0);
    for (int k = 0; ((i128)1 << k) <= c; k++)
      if ((c >> k) & 1) acc = iadd(acc, shifted(x, k), p);
    return acc;
  }

  BV imul(const BV& x, const BV& y, const SourcePos& p) {
    i128 c0, c1, c2, c3;
    if (!i128_mul_ok(x.lo, y.lo, c0) || !i128_mul_ok(x.lo, y.hi, c1) ||
        !i128_mul_ok(x.hi, y.lo, c2) || !i128_mul_ok(x.hi, y.hi, c3))
      err(p, "product interval overflows the expansion arithmetic");
    i128 lo = std::min({c0, c1, c2, c3}), hi = std::max({c0, c1, c2, c3});
    if (x.lo == x.hi) return cmul(y, x.lo, p);
    if (y.lo == y.hi) return cmul(x, y.lo, p);

    // (off_x + u_x)(off_y + u_y) expanded into four addends
    BV ux{HType::Int, x.bits, 0, 0, x.hi - x.off, -1};
    BV uy{HType::Int, y.bits, 0, 0, y.hi - y.off, -1};
    std::vector<BV> rows;  // u_x * u_y by partial products of u_y's bits
    for (size_t k = 0; k < uy.bits.size(); k++) {
      BV row = ux;
      for (auto& bit : row.bits) bit = b.and_(bit, uy.bits[k]);
      rows.push_back(shifted(row, (int)k));
    }
    BV uxy = iconst(0);
    if (variant == Variant::A) {
      for (auto& r : rows) uxy = iadd(uxy, r, p);
    } else {
      while (rows.size() > 1) {
        std::vector<BV> next;
        for (size_t i = 0; i + 1 < rows.size(); i += 2)
          next.push_back(iadd(rows[i], rows[i + 1], p));
        if (rows.size() & 1) next.push_back(rows.back());
        rows = std::move(next);
      }
      if (!rows.empty()) uxy = rows[0];
    }
    BV sum = iadd(iadd(iconst(x.off * y.off), cmul(uy, x.off, p), p),
                  iadd(cmul(ux, y.off, p), uxy, p), p);
    // the four-addend form can be wider than the true corner interval
    sum.lo = lo;
    sum.hi = hi;
    return norm(sum);
  }

  uint32_t ilt(const BV& x, const BV& y, const SourcePos& p) {
    if (x.hi < y.lo) return 1;
    if (x.lo >= y.hi) return 0;
    i128 base = std::min(x.lo, y.lo);
    BV rx = rebase(x, base, p), ry = rebase(y, base, p);
    return ult(rx.bits, ry.bits);
  }

  uint32_t ieq(const BV& x, const BV& y, const SourcePos& p) {
    if (x.hi < y.lo || y.hi < x.lo) return 0;
    if (x.lo == x.hi && y.lo == y.hi) return x.lo == y.lo ? 1 : 0;
    i128 base = std::min(x.lo, y.lo);
    BV rx = rebase(x, base, p), ry = rebase(y, base, p);
    size_t w = std::max(rx.bits.size(), ry.bits.size());
    std::vector<uint32_t> eqs;
    for (size_t i = 0; i < w; i++)
      eqs.push_back(b.equiv(bit_at(rx.bits, i), bit_at(ry.bits, i)));
    return fold_and(std::move(eqs));
  }

  BV ite_int(uint32_t c, const BV& x, const BV& y, const SourcePos& p) {
    if (c == 1) return x;
    if (c == 0) return y;
    i128 base = std::min(x.lo, y.lo);
    BV rx = rebase(x, base, p), ry = rebase(y, base, p);
    size_t w = std::max(rx.bits.size(), ry.bits.size());
    std::vector<uint32_t> bits(w);
    for (size_t i = 0; i < w; i++)
      bits[i] = b.mux(c, bit_at(rx.bits, i), bit_at(ry.bits, i));
    return norm(BV{HType::Int, std::move(bits), base, std::min(x.lo, y.lo),
                   std::max(x.hi, y.hi), -1});
  }

  // division with the runtime's defined continuations: truncation toward
  // zero, remainder signed like the dividend, both zero when y is zero
  std::pair<BV, BV> idivmod(const BV& x, const BV& y, const SourcePos& p) {
    if (y.lo == 0 && y.hi == 0) return {iconst(0), iconst(0)};
    uint32_t sx = x.hi < 0 ? 1 : x.lo >= 0 ? 0 : ilt(x, iconst(0), p);
    uint32_t sy = y.hi < 0 ? 1 : y.lo >= 0 ? 0 : ilt(y, iconst(0), p);
    BV ax = ite_int(sx, ineg(x, p), x, p);
    BV ay = ite_int(sy, ineg(y, p), y, p);
    BV n = rebase(ax, 0, p), d = rebase(ay, 0, p);

    int wn = (int)n.bits.size(), wd = (int)d.bits.size();
    std::vector<uint32_t> q((size_t)std::max(wn, 1), 0u);
    std::vector<uint32_t> r;  // current remainder, wd bits
    if (wd == 0) {
      // |y| is identically zero was handled above; zero-width means |y| == 0
      // is impossible here only when lo==hi, so wd==0 implies span 1
      r.assign(1, 0u);
      wd = 1;
      d.bits.assign(1, 0u);
    } else {
      r.assign((size_t)wd, 0u);
    }
    for (int i = wn - 1; i >= 0; i--) {
      std::vector<uint32_t> r2 = r;  // (r << 1) | n_i at wd+1 bits
      r2.insert(r2.begin(), n.bits[(size_t)i]);
      uint32_t ge = b.neg(ult(r2, d.bits));
      std::vector<uint32_t> sub = usub(r2, d.bits, wd + 1);
      for (int k = 0; k < wd; k++) r[(size_t)k] = b.mux(ge, sub[(size_t)k], bit_at(r2, (size_t)k));
      q[(size_t)i] = ge;
    }
    i128 qmax = n.hi, rmax = std::max<i128>(d.hi - 1, 0);
    BV q0{HType::Int, std::move(q), 0, 0, qmax, -1};
    BV r0{HType::Int, std::move(r), 0, 0, rmax, -1};

    uint32_t yzero = y.lo > 0 || y.hi < 0 ? 0 : ieq(y, iconst(0), p);
    uint32_t qs = b.xor_(sx, sy);
    BV qv = ite_int(yzero, iconst(0), ite_int(qs, ineg(q0, p), q0, p), p);
    BV rv = ite_int(yzero, iconst(0), ite_int(sx, ineg(r0, p), r0, p), p);
    return {norm(qv), norm(rv)};
  }

  // wrap a value into an integer leaf's storage window (write semantics)
  BV wrap_int(const BV& v, const HTypePtr& t, const SourcePos& p) {
    int w = t->bit_width();
    i128 lo = t->lo;
    if (v.lo >= lo && v.hi <= lo + t->storage_span() - 1 && v.lo != v.hi) {
      BV r = rebase(v, lo, p);
      r.bits.resize((size_t)w, 0u);
      return r;
    }
    i128 mask = w == 0 ? 0 : (((i128)1 << w) - 1);
    i128 c = (v.off - lo) & mask;
    std::vector<uint32_t> bits = uadd(v.bits, const_bits(c, w), w);
    i128 vlo = lo, vhi = lo + t->storage_span() - 1;
    if (v.lo >= lo && v.hi <= vhi) {
      vlo = v.lo;
      vhi = v.hi;
    }
    return BV{HType::Int, std::move(bits), lo, vlo, vhi, -1};
  }

  // ---------------------------------------------------------- enums

  int enum_size(int id) const { return (int)m.enums[(size_t)id].items.size(); }

  int enum_width(int id) const { return std::max(1, width_bits(enum_size(id) - 1)); }

  BV enum_const(int id, int ordinal) {
    BV v;
    v.kind = HType::Enum;
    v.enum_id = id;
    if (variant == Variant::A) {
      v.bits.assign((size_t)enum_size(id), 0u);
      v.bits[(size_t)ordinal] = 1;
    } else {
      v.bits = const_bits(ordinal, enum_width(id));
    }
    return v;
  }

  // canonical (binary) bits -> the variant's working form
  BV enum_from_binary(int id, const std::vector<uint32_t>& bits) {
    BV v;
    v.kind = HType::Enum;
    v.enum_id = id;
    if (variant == Variant::B) {
      v.bits = bits;
      return v;
    }
    int n = enum_size(id), w = enum_width(id);
    for (int ord = 0; ord < n; ord++) {
      std::vector<uint32_t> eqs;
      for (int i = 0; i < w; i++)
        eqs.push_back(b.equiv(bit_at(bits, (size_t)i), (ordinal_bit(ord, i))));
      v.bits.push_back(fold_and(std::move(eqs)));
    }
    return v;
  }

  static uint32_t ordinal_bit(int ord, int i) { return (ord >> i) & 1 ? 1 : 0; }

  uint32_t eq_enum(const BV& x, const BV& y) {
    if (variant == Variant::A) {
      std::vector<uint32_t> hits;
      for (size_t i = 0; i < x.bits.size(); i++)
        hits.push_back(b.and_(x.bits[i], y.bits[i]));
      return fold_or(std::move(hits));
    }
    std::vector<uint32_t> eqs;
    for (size_t i = 0; i < x.bits.size(); i++)
      eqs.push_back(b.equiv(x.bits[i], y.bits[i]));
    return fold_and(std::move(eqs));
  }

  // ---------------------------------------------------------- scalars

  uint32_t scalar_eq(const BV& x, const BV& y, const SourcePos& p) {
    switch (x.kind) {
      case HType::Bool: return b.equiv(x.bits[0], y.bits[0]);
      case HType::Int: return ieq(x, y, p);
      case HType::Enum: return eq_enum(x, y);
      default: throw Error("internal: non-scalar leaf comparison");
    }
  }

  BV ite_scalar(uint32_t c, const BV& x, const BV& y, const SourcePos& p) {
    switch (x.kind) {
      case HType::Bool: {
        BV v;
        v.kind = HType::Bool;
        v.bits = {b.mux(c, x.bits[0], y.bits[0])};
        return v;
      }
      case HType::Int: return ite_int(c, x, y, p);
      case HType::Enum: {
        BV v;
        v.kind = HType::Enum;
        v.enum_id = x.enum_id;
        for (size_t i = 0; i < x.bits.size(); i++)
          v.bits.push_back(b.mux(c, x.bits[i], y.bits[i]));
        return v;
      }
      default: throw Error("internal: non-scalar leaf in if-then-else");
    }
  }

  static BV bool_bv(uint32_t bit) {
    BV v;
    v.kind = HType::Bool;
    v.bits = {bit};
    return v;
  }

  // ---------------------------------------------------------- naming

  static std::string bit_name(const std::string& base, int nbits, int k) {
    return nbits == 1 ? base : base + "." + std::to_string(k);
  }

  // ---------------------------------------------------------- leaf encodings

  // how many netlist bits one scalar leaf takes, and its map encoding
  int leaf_bits(const HTypePtr& t, bool canonical) const {
    switch (t->k) {
      case HType::Bool: return 1;
      case HType::Int: return t->bit_width();
      case HType::Enum:
        return !canonical && variant == Variant::A ? enum_size(t->enum_id)
                                                   : enum_width(t->enum_id);
      default: throw Error("internal: non-scalar leaf");
    }
  }

  MapEntry::Enc leaf_enc(const HTypePtr& t, bool canonical) const {
    switch (t->k) {
      case HType::Bool: return MapEntry::Enc::Bool;
      case HType::Int: return MapEntry::Enc::Int;
      case HType::Enum:
        return !canonical && variant == Variant::A ? MapEntry::Enc::EnumOneHot
                                                   : MapEntry::Enc::EnumBinary;
      default: throw Error("internal: non-scalar leaf");
    }
  }

  // free bits for one leaf (inputs, block outputs, symbolic constants all
  // use the canonical binary form); adds a validity constraint where the
  // encoding has spare codes
  BV fresh_leaf(const HTypePtr& t, const std::string& base,
                const std::string& valid_name, bool as_latch,
                std::vector<uint32_t>* latch_inits) {
    int w = leaf_bits(t, true);
    std::vector<uint32_t> bits;
    for (int k = 0; k < w; k++) {
      std::string nm = bit_name(base, w, k);
      if (as_latch) {
        uint32_t iv = nl.add_input(nm + ".iv");
        uint32_t lv = nl.add_latch(nm);
        nl.set_latch(lv, iv, lv);  // holds its first-cycle value forever
        if (latch_inits) latch_inits->push_back(iv);
        bits.push_back(lv);
      } else {
        bits.push_back(nl.add_input(nm));
      }
    }
    switch (t->k) {
      case HType::Bool: return bool_bv(bits[0]);
      case HType::Int: {
        BV v{HType::Int, bits, t->lo, t->lo, t->lo + t->storage_span() - 1, -1};
        return v;
      }
      case HType::Enum: {
        int n = enum_size(t->enum_id);
        if (((i128)1 << w) != n)  // spare codes: pin below the item count
          nl.constraints.push_back(
              {valid_name, ult(bits, const_bits(n, w + 1))});
        return enum_from_binary(t->enum_id, bits);
      }
      default: throw Error("internal: non-scalar leaf");
    }
  }

  uint32_t get_init_var() {
    if (!init_var) {
      init_var = nl.add_latch("$init");
      nl.set_latch(init_var, 1, 0);
    }
    return init_var;
  }

  // ---------------------------------------------------------- streams

  const Flat& get_value(int sid) {
    if (have_val[(size_t)sid]) return val[(size_t)sid];
    const HStream& s = m.streams[(size_t)sid];
    if (in_progress[(size_t)sid])
      err(s.pos, "definition of '" + s.name + "' reads itself at cycle 0");
    in_progress[(size_t)sid] = 1;

    auto lps = hll::leaf_paths(s.type);
    Flat out;

    if (s.is_const && s.const_value) {
      if (lps.size() != 1)
        err(s.pos, "constant '" + s.name + "' must be scalar");
      i128 v = hll::fold_const(m, s.const_value);
      switch (s.type->k) {
        case HType::Bool: out.push_back(bool_bv(v ? 1 : 0)); break;
        case HType::Int: out.push_back(iconst(v)); break;
        case HType::Enum: out.push_back(enum_const(s.type->enum_id, (int)v)); break;
        default: err(s.pos, "constant '" + s.name + "' must be scalar");
      }
      MapEntry e;
      e.role = MapEntry::Role::Const;
      e.name = s.name;
      e.enc = leaf_enc(s.type, true);
      e.offset = s.type->k == HType::Int ? s.type->lo : 0;
      e.enum_id = s.type->k == HType::Enum ? s.type->enum_id : -1;
      e.const_value = v;
      e.stream = sid;
      e.leaf = 0;
      map.entries.push_back(std::move(e));
    } else if (s.is_const) {
      // symbolic constant: a latch that holds its free first-cycle value
      for (size_t li = 0; li < lps.size(); li++) {
        std::string base = s.name + lps[li].suffix;
        out.push_back(fresh_leaf(lps[li].type, base, "valid_" + base, true, nullptr));
        add_entry(MapEntry::Role::SymConst, s.name, lps[li], out.back(), sid,
                  (int)li, true);
      }
    } else if (s.is_input) {
      for (size_t li = 0; li < lps.size(); li++) {
        std::string base = s.name + lps[li].suffix;
        out.push_back(fresh_leaf(lps[li].type, base, "valid_" + base, false, nullptr));
        add_entry(MapEntry::Role::Input, s.name, lps[li], out.back(), sid,
                  (int)li, true);
      }
    } else if (s.is_state) {
      Flat ivals = def_flat(m.defs[(size_t)s.def_init], true);
      StateBits sb;
      for (size_t li = 0; li < lps.size(); li++) {
        const BV& iv = ivals[li];
        int w = (int)iv.bits.size();
        std::string base = s.name + lps[li].suffix;
        BV v = iv;  // shape carries over; bits replaced below
        for (int k = 0; k < w; k++) {
          uint32_t lv = nl.add_latch(bit_name(base, w, k) + ".r");
          uint32_t ib = iv.bits[(size_t)k];
          if (ib <= 1) {
            sb.init.push_back(ib);
            v.bits[(size_t)k] = lv;
          } else {
            sb.init.push_back(0);
            v.bits[(size_t)k] = b.mux(get_init_var(), ib, lv);
          }
          sb.latch.push_back(lv);
        }
        if (v.kind == HType::Int) {
          v.lo = lps[li].type->lo;
          v.hi = v.lo + lps[li].type->storage_span() - 1;
        }
        // off-window latch codes are pruned for induction: enums with spare
        // codes get their value pinned valid (holds at every cycle)
        if (v.kind == HType::Enum) {
          int n = enum_size(v.enum_id);
          if (variant == Variant::A) {
            std::vector<uint32_t> any, twice;
            uint32_t seen = 0;
            for (uint32_t bit : v.bits) {
              twice.push_back(b.and_(seen, bit));
              seen = b.or_(seen, bit);
              any.push_back(bit);
            }
            nl.constraints.push_back(
                {"valid_" + base,
                 b.and_(fold_or(std::move(any)), b.neg(fold_or(std::move(twice))))});
          } else if (((i128)1 << v.bits.size()) != n) {
            nl.constraints.push_back(
                {"valid_" + base, ult(v.bits, const_bits(n, (int)v.bits.size() + 1))});
          }
        }
        out.push_back(v);
        add_entry(MapEntry::Role::State, s.name, lps[li], out.back(), sid,
                  (int)li, false);
      }
      state_bits[sid] = std::move(sb);
    } else {
      out = def_flat(m.defs[(size_t)s.def_plain], false);
      for (size_t li = 0; li < lps.size(); li++)
        add_entry(MapEntry::Role::Wire, s.name, lps[li], out[li], sid, (int)li,
                  false);
    }

    val[(size_t)sid] = std::move(out);
    have_val[(size_t)sid] = 1;
    in_progress[(size_t)sid] = 0;
    return val[(size_t)sid];
  }

  void add_entry(MapEntry::Role role, const std::string& name,
                 const hll::LeafPath& lp, const BV& v, int sid, int leaf,
                 bool canonical) {
    MapEntry e;
    e.role = role;
    e.name = name;
    e.suffix = lp.suffix;
    e.enc = leaf_enc(lp.type, canonical);
    e.offset = lp.type->k == HType::Int ? lp.type->lo : 0;
    e.enum_id = lp.type->k == HType::Enum ? lp.type->enum_id : -1;
    e.bits = v.bits;
    e.stream = sid;
    e.leaf = leaf;
    map.entries.push_back(std::move(e));
  }

  // a definition's full flat value, element cube iterated like the runtime
  Flat def_flat(const HDef& d, bool init_ctx) {
    const HStream& s = m.streams[(size_t)d.stream];
    bool saved = in_init_def;
    in_init_def = init_ctx;

    std::vector<std::pair<std::string, i128>> dims;
    HTypePtr t = s.type;
    for (auto& seg : d.path) {
      if (seg.is_field)
        err(d.pos, "field-targeted definitions cannot be bit-blasted");
      dims.emplace_back(seg.binder, t->size);
      t = t->elem;
    }
    auto elem_lps = hll::leaf_paths(t);
    i128 stride = (i128)elem_lps.size();

    Flat out((size_t)hll::leaf_count(s.type));
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
      Flat v = ex(d.rhs, env);
      for (size_t k = 0; k < v.size(); k++)
        out[(size_t)off + k] = elem_lps[k].type->k == HType::Int
                                   ? wrap_int(v[k], elem_lps[k].type, d.pos)
                                   : v[k];

      size_t i = dims.size();
      if (i == 0) break;
      while (i-- > 0) {
        if (iv[i] + 1 < dims[i].second) {
          iv[i]++;
          break;
        }
        iv[i] = 0;
        if (i == 0) {
          i = SIZE_MAX;
          break;
        }
      }
      if (i == SIZE_MAX) break;
    }
    in_init_def = saved;
    return out;
  }

  // ---------------------------------------------------------- instances

  const Inst& expand_instance(int iid, const SourcePos& p, const Env& env) {
    Inst& in = insts[(size_t)iid];
    if (in.expanded) return in;
    if (!env.binders.empty())
      err(p, "a block call under a quantifier or element binder cannot be "
             "bit-blasted");
    const hll::HBlockInstance& bi = m.instances[(size_t)iid];
    in.expanded = true;
    in.init_only = in_init_def;
    Env top;
    for (auto& a : bi.args) in.args.push_back(ex(a, top));
    const hll::HBlockDecl& bd = m.blocks[(size_t)bi.block];
    auto lps = hll::leaf_paths(bd.ret);
    for (size_t li = 0; li < lps.size(); li++) {
      std::string base = bi.name + lps[li].suffix;
      in.out.push_back(
          fresh_leaf(lps[li].type, base, "valid_" + base, false, nullptr));
      MapEntry e;
      e.role = MapEntry::Role::BlockOut;
      e.name = bi.name;
      e.suffix = lps[li].suffix;
      e.enc = leaf_enc(lps[li].type, true);
      e.offset = lps[li].type->k == HType::Int ? lps[li].type->lo : 0;
      e.enum_id = lps[li].type->k == HType::Enum ? lps[li].type->enum_id : -1;
      e.bits = in.out.back().bits;
      e.stream = iid;
      e.leaf = (int)li;
      map.entries.push_back(std::move(e));
    }
    return in;
  }

  // ---------------------------------------------------------- expressions

  uint32_t exb(const HExprPtr& e, Env& env) {
    Flat f = ex(e, env);
    return f[0].bits[0];
  }

  BV exi(const HExprPtr& e, Env& env) {
    Flat f = ex(e, env);
    return f[0];
  }

  Flat ex(const HExprPtr& e, Env& env) {
    switch (e->k) {
      case HK::BoolLit: return {bool_bv(e->bval ? 1 : 0)};
      case HK::IntLit: return {iconst(e->ival)};

      case HK::Name:
        switch (e->ref) {
          case HExpr::Ref::Binder: {
            for (auto it = env.binders.rbegin(); it != env.binders.rend(); ++it)
              if (it->first == e->name) return {iconst(it->second)};
            throw Error("internal: binder '" + e->name + "' out of scope");
          }
          case HExpr::Ref::EnumConst:
            return {enum_const(e->ref_id, e->enum_val)};
          case HExpr::Ref::Stream: {
            Flat f = get_value(e->ref_id);
            for (auto& v : f) v = norm(v);
            return f;
          }
          default: throw Error("internal: unresolved name '" + e->name + "'");
        }

      case HK::Index: {
        Flat a = ex(e->kids[0], env);
        BV idx = exi(e->kids[1], env);
        const HTypePtr& at = e->kids[0]->type;
        i128 n = at->size;
        i128 stride = hll::leaf_count(at->elem);
        auto group = [&](i128 i) {
          return Flat(a.begin() + (size_t)(i * stride),
                      a.begin() + (size_t)((i + 1) * stride));
        };
        if (idx.lo == idx.hi) {
          i128 i = idx.lo;
          if (i < 0 || i >= n) i = n - 1;  // reads clamp to the last element
          return group(i);
        }
        Flat acc = group(n - 1);
        for (i128 i = n - 2; i >= 0; i--) {
          uint32_t hit = ieq(idx, iconst(i), e->pos);
          Flat gi = group(i);
          for (size_t k = 0; k < acc.size(); k++)
            acc[k] = ite_scalar(hit, gi[k], acc[k], e->pos);
        }
        return acc;
      }

      case HK::Member: {
        if (e->kids[0]->k == HK::Name &&
            e->kids[0]->ref == HExpr::Ref::BlockVar) {
          if (env.block_var != e->kids[0]->name || env.block_inst < 0)
            throw Error("internal: contract variable outside its quantifier");
          const Inst& in = insts[(size_t)env.block_inst];
          if (e->name == "output") return in.out;
          return in.args[(size_t)std::stoi(e->name.substr(6))];
        }
        Flat a = ex(e->kids[0], env);
        i128 off = field_offset(e->kids[0]->type, e->name);
        i128 cnt = hll::leaf_count(e->type);
        return Flat(a.begin() + (size_t)off, a.begin() + (size_t)(off + cnt));
      }

      case HK::Not: return {bool_bv(b.neg(exb(e->kids[0], env)))};
      case HK::And:
        return {bool_bv(b.and_(exb(e->kids[0], env), exb(e->kids[1], env)))};
      case HK::Or:
        return {bool_bv(b.or_(exb(e->kids[0], env), exb(e->kids[1], env)))};
      case HK::Imp:
        return {bool_bv(b.impl(exb(e->kids[0], env), exb(e->kids[1], env)))};
      case HK::Eqv:
        return {bool_bv(b.equiv(exb(e->kids[0], env), exb(e->kids[1], env)))};

      case HK::Ite: {
        uint32_t c = exb(e->kids[0], env);
        Flat x = ex(e->kids[1], env);
        Flat y = ex(e->kids[2], env);
        for (size_t k = 0; k < x.size(); k++)
          x[k] = ite_scalar(c, x[k], y[k], e->pos);
        return x;
      }

      case HK::Eq:
      case HK::Ne: {
        Flat x = ex(e->kids[0], env);
        Flat y = ex(e->kids[1], env);
        std::vector<uint32_t> eqs;
        for (size_t k = 0; k < x.size(); k++)
          eqs.push_back(scalar_eq(x[k], y[k], e->pos));
        uint32_t r = fold_and(std::move(eqs));
        return {bool_bv(e->k == HK::Eq ? r : b.neg(r))};
      }

      case HK::Lt:
        return {bool_bv(ilt(exi(e->kids[0], env), exi(e->kids[1], env), e->pos))};
      case HK::Gt:
        return {bool_bv(ilt(exi(e->kids[1], env), exi(e->kids[0], env), e->pos))};
      case HK::Le:
        return {bool_bv(
            b.neg(ilt(exi(e->kids[1], env), exi(e->kids[0], env), e->pos)))};
      case HK::Ge:
        return {bool_bv(
            b.neg(ilt(exi(e->kids[0], env), exi(e->kids[1], env), e->pos)))};

      case HK::Add:
        return {iadd(exi(e->kids[0], env), exi(e->kids[1], env), e->pos)};
      case HK::Sub:
        return {isub(exi(e->kids[0], env), exi(e->kids[1], env), e->pos)};
      case HK::Mul:
        return {imul(exi(e->kids[0], env), exi(e->kids[1], env), e->pos)};
      case HK::Neg: return {ineg(exi(e->kids[0], env), e->pos)};
      case HK::Div:
        return {idivmod(exi(e->kids[0], env), exi(e->kids[1], env), e->pos).first};
      case HK::Mod:
        return {idivmod(exi(e->kids[0], env), exi(e->kids[1], env), e->pos).second};

      case HK::All:
      case HK::Some: {
        size_t nb = e->binders.size();
        std::vector<i128> iv(nb);
        for (size_t i = 0; i < nb; i++) iv[i] = e->binders[i].clo;
        std::vector<uint32_t> parts;
        for (;;) {
          for (size_t i = 0; i < nb; i++)
            env.binders.emplace_back(e->binders[i].var, iv[i]);
          parts.push_back(exb(e->kids[0], env));
          env.binders.resize(env.binders.size() - nb);
          size_t i = nb;
          while (i-- > 0) {
            if (iv[i] < e->binders[i].chi) {
              iv[i]++;
              break;
            }
            iv[i] = e->binders[i].clo;
            if (i == 0) {
              i = SIZE_MAX;
              break;
            }
          }
          if (i == SIZE_MAX) break;
        }
        return {bool_bv(e->k == HK::All ? fold_and(std::move(parts))
                                        : fold_or(std::move(parts)))};
      }

      case HK::MinR:
      case HK::MaxR: {
        const hll::HBinder& bd = e->binders[0];
        uint32_t any = 0;
        BV best = iconst(0);
        bool first = true;
        for (i128 i = bd.clo; i <= bd.chi; i++) {
          env.binders.emplace_back(bd.var, i);
          uint32_t sel = exb(e->kids[0], env);
          BV v = exi(e->kids[1], env);
          env.binders.pop_back();
          if (first) {
            best = v;
            any = sel;
            first = false;
            continue;
          }
          uint32_t better = e->k == HK::MinR ? ilt(v, best, e->pos)
                                             : ilt(best, v, e->pos);
          uint32_t take = b.and_(sel, b.or_(b.neg(any), better));
          best = ite_int(take, v, best, e->pos);
          any = b.or_(any, sel);
        }
        return {ite_int(any, best, iconst(0), e->pos)};
      }

      case HK::Population: {
        Flat a = ex(e->kids[0], env);
        std::vector<BV> ones;
        for (auto& leaf : a)
          ones.push_back(BV{HType::Int, {leaf.bits[0]}, 0, 0, 1, -1});
        if (ones.empty()) return {iconst(0)};
        if (variant == Variant::A) {
          BV acc = iconst(0);
          for (auto& o : ones) acc = iadd(acc, o, e->pos);
          return {acc};
        }
        while (ones.size() > 1) {
          std::vector<BV> next;
          for (size_t i = 0; i + 1 < ones.size(); i += 2)
            next.push_back(iadd(ones[i], ones[i + 1], e->pos));
          if (ones.size() & 1) next.push_back(ones.back());
          ones = std::move(next);
        }
        return {ones[0]};
      }

      case HK::Call: return expand_instance(e->instance, e->pos, env).out;

      case HK::AllBlock: {
        std::vector<uint32_t> parts;
        for (size_t i = 0; i < m.instances.size(); i++) {
          if (m.instances[i].block != e->block) continue;
          const Inst& in = insts[i];
          if (!in.expanded)
            throw Error("internal: contract quantifier saw an unexpanded call");
          Env inner = env;
          inner.block_var = e->binders[0].var;
          inner.block_inst = (int)i;
          uint32_t body = exb(e->kids[0], inner);
          // instances inside I() definitions only run on the first cycle
          parts.push_back(in.init_only ? b.impl(get_init_var(), body) : body);
        }
        return {bool_bv(fold_and(std::move(parts)))};
      }
    }
    throw Error("internal: unhandled expression kind");
  }

  // ---------------------------------------------------------- model walk

  std::string unique_out(std::map<std::string, int>& used, std::string name) {
    auto [it, fresh] = used.emplace(name, 0);
    if (fresh) return name;
    it->second++;
    return name + "_" + std::to_string(it->second);
  }

  Expansion run() {
    // all stream value points first (instances inside definitions are
    // discovered here, with their first-cycle-only flag)
    for (size_t sid = 0; sid < m.streams.size(); sid++) get_value((int)sid);

    // next-state circuits read the settled value points
    for (size_t sid = 0; sid < m.streams.size(); sid++) {
      const HStream& s = m.streams[sid];
      if (!s.is_state) continue;
      Flat nx = def_flat(m.defs[(size_t)s.def_next], false);
      const StateBits& sb = state_bits.at((int)sid);
      size_t bit = 0;
      for (auto& leaf : nx)
        for (uint32_t nb : leaf.bits) {
          nl.set_latch(sb.latch[bit], sb.init[bit], nb);
          bit++;
        }
      if (bit != sb.latch.size())
        throw Error("internal: next-state width mismatch for '" + s.name + "'");
    }

    // call sites that only occur inside contracts or obligations
    Env top;
    for (size_t i = 0; i < m.instances.size(); i++)
      expand_instance((int)i, m.instances[i].pos, top);

    std::map<std::string, int> used_c, used_o;
    for (size_t i = 0; i < m.constraints.size(); i++) {
      const hll::HProp& c = m.constraints[i];
      std::string name =
          c.label.empty() ? "c" + std::to_string(i) : c.label;
      nl.constraints.push_back({unique_out(used_c, name), exb(c.expr, top)});
    }
    for (size_t i = 0; i < m.obligations.size(); i++) {
      const hll::HProp& o = m.obligations[i];
      std::string name =
          o.label.empty() ? "o" + std::to_string(i) : o.label;
      nl.obligations.push_back({unique_out(used_o, name), exb(o.expr, top)});
    }

    // named probe points: the value of every defined or latched stream
    for (auto& e : map.entries) {
      if (e.role != MapEntry::Role::State && e.role != MapEntry::Role::Wire)
        continue;
      int w = (int)e.bits.size();
      for (int k = 0; k < w; k++)
        nl.outputs.push_back({bit_name(e.name + e.suffix, w, k), e.bits[k]});
    }

    validate(nl);
    Expansion out;
    out.netlist = std::move(nl);
    out.map = std::move(map);
    out.variant = variant;
    return out;
  }
};

}  // namespace

Expansion expand(const hll::HllModel& m, Variant v) {
  Expander ex(m, v);
  return ex.run();
}

// ---------------------------------------------------------------- bit map

i128 decode_entry(const MapEntry& e, const std::function<bool(uint32_t)>& bit) {
  if (e.role == MapEntry::Role::Const) return e.const_value;
  switch (e.enc) {
    case MapEntry::Enc::Bool: return bit(e.bits[0]) ? 1 : 0;
    case MapEntry::Enc::Int: {
      i128 u = 0;
      for (size_t i = 0; i < e.bits.size(); i++)
        if (bit(e.bits[i])) u |= (i128)1 << i;
      return e.offset + u;
    }
    case MapEntry::Enc::EnumBinary: {
      i128 u = 0;
      for (size_t i = 0; i < e.bits.size(); i++)
        if (bit(e.bits[i])) u |= (i128)1 << i;
      return u;
    }
    case MapEntry::Enc::EnumOneHot: {
      for (size_t i = 0; i < e.bits.size(); i++)
        if (bit(e.bits[i])) return (i128)i;
      return -1;  // invalid encoding; callers treat as corrupt
    }
  }
  throw Error("internal: unknown bit-map encoding");
}

static const char* role_name(MapEntry::Role r) {
  switch (r) {
    case MapEntry::Role::Input: return "input";
    case MapEntry::Role::State: return "state";
    case MapEntry::Role::Wire: return "wire";
    case MapEntry::Role::SymConst: return "symconst";
    case MapEntry::Role::BlockOut: return "blockout";
    case MapEntry::Role::Const: return "const";
  }
  return "?";
}

std::string print_bitmap(const BitMap& m, const Netlist& n) {
  std::ostringstream out;
  out << "bitmap\n";
  for (auto& e : m.entries) {
    out << role_name(e.role) << " " << e.name << " "
        << (e.suffix.empty() ? "-" : e.suffix);
    switch (e.enc) {
      case MapEntry::Enc::Bool: out << " bool"; break;
      case MapEntry::Enc::Int: out << " int " << i128_str(e.offset); break;
      case MapEntry::Enc::EnumOneHot: out << " enum1 " << e.enum_id; break;
      case MapEntry::Enc::EnumBinary: out << " enum2 " << e.enum_id; break;
    }
    if (e.role == MapEntry::Role::Const)
      out << " val " << i128_str(e.const_value);
    else
      for (uint32_t v : e.bits) out << " " << n.names[v];
    out << "\n";
  }
  return out.str();
}

BitMap parse_bitmap(const std::string& text, const std::string& filename,
                    const Netlist& n) {
  BitMap m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  auto fail = [&](const std::string& msg) -> void {
    throw Error(filename + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    lineno++;
    std::istringstream ls(line);
    std::vector<std::string> t;
    std::string w;
    while (ls >> w) {
      if (w[0] == '#') break;
      t.push_back(w);
    }
    if (t.empty()) continue;
    if (!header) {
      if (t[0] != "bitmap") fail("expected the 'bitmap' header");
      header = true;
      continue;
    }
    if (t.size() < 4) fail("truncated entry");
    MapEntry e;
    if (t[0] == "input") e.role = MapEntry::Role::Input;
    else if (t[0] == "state") e.role = MapEntry::Role::State;
    else if (t[0] == "wire") e.role = MapEntry::Role::Wire;
    else if (t[0] == "symconst") e.role = MapEntry::Role::SymConst;
    else if (t[0] == "blockout") e.role = MapEntry::Role::BlockOut;
    else if (t[0] == "const") e.role = MapEntry::Role::Const;
    else fail("unknown role '" + t[0] + "'");
    e.name = t[1];
    e.suffix = t[2] == "-" ? "" : t[2];
    size_t k = 3;
    if (t[k] == "bool") {
      e.enc = MapEntry::Enc::Bool;
      k++;
    } else if (t[k] == "int") {
      e.enc = MapEntry::Enc::Int;
      if (k + 1 >= t.size()) fail("missing integer offset");
      e.offset = i128_parse(t[k + 1]);
      k += 2;
    } else if (t[k] == "enum1" || t[k] == "enum2") {
      e.enc = t[k] == "enum1" ? MapEntry::Enc::EnumOneHot : MapEntry::Enc::EnumBinary;
      if (k + 1 >= t.size()) fail("missing enum id");
      e.enum_id = (int)i128_parse(t[k + 1]);
      k += 2;
    } else {
      fail("unknown encoding '" + t[k] + "'");
    }
    if (e.role == MapEntry::Role::Const) {
      if (k + 1 >= t.size() || t[k] != "val") fail("constant entry needs a value");
      e.const_value = i128_parse(t[k + 1]);
      k += 2;
      if (k != t.size()) fail("trailing tokens");
    } else {
      for (; k < t.size(); k++) {
        try {
          e.bits.push_back(n.var(t[k]));
        } catch (const Error& err) {
          fail(err.what());
        }
      }
    }
    m.entries.push_back(std::move(e));
  }
  if (!header) throw Error(filename + ": empty bit-map file");
  return m;
}

}  // namespace ebv::lll
