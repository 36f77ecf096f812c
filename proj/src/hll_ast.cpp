#include "ebv/hll_ast.hpp"

namespace ebv::hll {

HTypePtr HType::mk_bool() {
  auto t = std::make_shared<HType>();
  t->k = Bool;
  return t;
}
HTypePtr HType::mk_int(i128 lo, i128 hi) {
  auto t = std::make_shared<HType>();
  t->k = Int;
  t->lo = lo;
  t->hi = hi;
  return t;
}
HTypePtr HType::mk_enum(int id) {
  auto t = std::make_shared<HType>();
  t->k = Enum;
  t->enum_id = id;
  return t;
}
HTypePtr HType::mk_array(HTypePtr elem, i128 size) {
  auto t = std::make_shared<HType>();
  t->k = Array;
  t->elem = std::move(elem);
  t->size = size;
  return t;
}
HTypePtr HType::mk_struct(std::vector<std::pair<std::string, HTypePtr>> fields) {
  auto t = std::make_shared<HType>();
  t->k = Struct;
  t->fields = std::move(fields);
  return t;
}

bool HType::same(const HType& o) const {
  if (k != o.k) return false;
  switch (k) {
    case Bool: return true;
    case Int: return lo == o.lo && hi == o.hi;
    case Enum: return enum_id == o.enum_id;
    case Array: return size == o.size && elem->same(*o.elem);
    case Struct: {
      if (fields.size() != o.fields.size()) return false;
      for (size_t i = 0; i < fields.size(); i++)
        if (fields[i].first != o.fields[i].first ||
            !fields[i].second->same(*o.fields[i].second))
          return false;
      return true;
    }
  }
  return false;
}

std::string HType::str(const std::vector<HEnum>& enums) const {
  switch (k) {
    case Bool: return "bool";
    case Int: return "int [" + i128_str(lo) + ", " + i128_str(hi) + "]";
    case Enum:
      return enum_id >= 0 && enum_id < (int)enums.size() ? enums[enum_id].name
                                                         : "<enum>";
    case Array: return elem->str(enums) + "[" + i128_str(size) + "]";
    case Struct: {
      std::string s = "struct { ";
      for (size_t i = 0; i < fields.size(); i++) {
        if (i) s += ", ";
        s += fields[i].first + ": " + fields[i].second->str(enums);
      }
      return s + " }";
    }
  }
  return "?";
}

static int bits_for_count(i128 n) {  // smallest b with 2^b >= n, at least 1
  int b = 1;
  i128 span = 2;
  while (span < n) { span *= 2; b++; }
  return b;
}

int HType::bit_width() const {
  switch (k) {
    case Bool: return 1;
    case Int: return bits_for_count(hi - lo + 1);
    case Enum: return -1;  // depends on the enum's item count; expander decides
    default: throw Error("bit_width on a non-scalar type");
  }
}

i128 HType::storage_span() const {
  if (k != Int) throw Error("storage_span on a non-int type");
  return (i128)1 << bit_width();
}

static void walk_leaves(const HTypePtr& t, const std::string& prefix,
                        std::vector<LeafPath>& out) {
  switch (t->k) {
    case HType::Bool:
    case HType::Int:
    case HType::Enum:
      out.push_back({prefix, t});
      return;
    case HType::Array:
      for (i128 i = 0; i < t->size; i++)
        walk_leaves(t->elem, prefix + "[" + i128_str(i) + "]", out);
      return;
    case HType::Struct:
      for (auto& f : t->fields) walk_leaves(f.second, prefix + "." + f.first, out);
      return;
  }
}

std::vector<LeafPath> leaf_paths(const HTypePtr& t) {
  std::vector<LeafPath> out;
  walk_leaves(t, "", out);
  return out;
}

i128 leaf_count(const HTypePtr& t) {
  switch (t->k) {
    case HType::Bool:
    case HType::Int:
    case HType::Enum: return 1;
    case HType::Array: return t->size * leaf_count(t->elem);
    case HType::Struct: {
      i128 n = 0;
      for (auto& f : t->fields) n += leaf_count(f.second);
      return n;
    }
  }
  return 0;
}

HExprPtr HExpr::mk(HK k, SourcePos pos) {
  auto e = std::make_shared<HExpr>();
  e->k = k;
  e->pos = std::move(pos);
  return e;
}

int HllModel::stream_id(const std::string& n) const {
  auto it = stream_ids.find(n);
  return it == stream_ids.end() ? -1 : it->second;
}
const HStream& HllModel::stream(const std::string& n) const {
  int id = stream_id(n);
  if (id < 0) throw Error("no stream named '" + n + "'");
  return streams[id];
}
int HllModel::block_id(const std::string& n) const {
  auto it = block_ids.find(n);
  return it == block_ids.end() ? -1 : it->second;
}
int HllModel::ns_id(const std::string& n) {
  for (size_t i = 0; i < namespaces.size(); i++)
    if (namespaces[i] == n) return (int)i;
  namespaces.push_back(n);
  return (int)namespaces.size() - 1;
}

}  // namespace ebv::hll
