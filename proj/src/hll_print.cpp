#include "ebv/hll_print.hpp"

#include <sstream>

namespace ebv::hll {

namespace {

// binding strength, loosest first; mirrors the parser's precedence table
int prec(HK k) {
  switch (k) {
    case HK::Ite: return 0;
    case HK::Eqv: return 1;
    case HK::Imp: return 2;
    case HK::Or: return 3;
    case HK::And: return 4;
    case HK::Eq: case HK::Ne: case HK::Lt: case HK::Le: case HK::Gt: case HK::Ge:
      return 5;
    case HK::Add: case HK::Sub: return 6;
    case HK::Mul: case HK::Div: case HK::Mod: return 7;
    case HK::Not: case HK::Neg: return 8;
    default: return 9;  // atoms, postfix, quantifiers (self-delimiting)
  }
}

const char* op_str(HK k) {
  switch (k) {
    case HK::Eqv: return "<->";
    case HK::Imp: return "->";
    case HK::Or: return "#";
    case HK::And: return "&";
    case HK::Eq: return "==";
    case HK::Ne: return "!=";
    case HK::Lt: return "<";
    case HK::Le: return "<=";
    case HK::Gt: return ">";
    case HK::Ge: return ">=";
    case HK::Add: return "+";
    case HK::Sub: return "-";
    case HK::Mul: return "*";
    case HK::Div: return "/";
    case HK::Mod: return "mod";
    default: return "?";
  }
}

struct Printer {
  const HllModel& m;
  // while printing alias i's right side, only aliases < i may be used
  int alias_limit = -1;

  bool alias_ok(size_t i) const {
    return alias_limit < 0 || (int)i < alias_limit;
  }

  std::string type(const HTypePtr& t, std::string* dims = nullptr) {
    switch (t->k) {
      case HType::Bool: return "bool";
      case HType::Int:
        return "int [" + i128_str(t->lo) + ", " + i128_str(t->hi) + "]";
      case HType::Enum: {
        // prefer the alias name the enum was introduced under
        for (size_t i = 0; i < m.aliases.size(); i++)
          if (alias_ok(i) && m.aliases[i].second->k == HType::Enum &&
              m.aliases[i].second->enum_id == t->enum_id)
            return m.aliases[i].first;
        std::string s = "enum { ";
        const HEnum& en = m.enums[t->enum_id];
        for (size_t i = 0; i < en.items.size(); i++)
          s += (i ? ", " : "") + en.items[i];
        return s + " }";
      }
      case HType::Array: {
        if (dims) {
          *dims += "[" + i128_str(t->size) + "]";
          return type(t->elem, dims);
        }
        // no declarator position: suffix form on the type itself
        for (size_t i = 0; i < m.aliases.size(); i++)
          if (alias_ok(i) && m.aliases[i].second->same(*t))
            return m.aliases[i].first;
        std::string d;
        std::string base = type(t->elem, &d);
        return base + "[" + i128_str(t->size) + "]" + d;
      }
      case HType::Struct: {
        for (size_t i = 0; i < m.aliases.size(); i++)
          if (alias_ok(i) && m.aliases[i].second->same(*t))
            return m.aliases[i].first;
        std::string s = "struct { ";
        for (size_t i = 0; i < t->fields.size(); i++) {
          if (i) s += ", ";
          s += t->fields[i].first + " : " + type(t->fields[i].second);
        }
        return s + " }";
      }
    }
    return "?";
  }

  // declarator form: "<base> <name><dims>"
  std::string declarator(const HTypePtr& t, const std::string& name) {
    std::string d;
    std::string base = type(t, &d);
    return base + " " + name + d;
  }

  std::string binders(const std::vector<HBinder>& bs) {
    std::string s;
    for (size_t i = 0; i < bs.size(); i++) {
      if (i) s += ", ";
      s += bs[i].var + ":[" + expr(bs[i].lo, 0) + ", " + expr(bs[i].hi, 0) + "]";
    }
    return s;
  }

  std::string expr(const HExprPtr& e, int ctx) {
    std::string s;
    int p = prec(e->k);
    switch (e->k) {
      case HK::BoolLit: s = e->bval ? "true" : "false"; break;
      case HK::IntLit: s = i128_str(e->ival); break;
      case HK::Name: s = e->name; break;
      case HK::Index:
        s = expr(e->kids[0], 9) + "[" + expr(e->kids[1], 0) + "]";
        break;
      case HK::Member: s = expr(e->kids[0], 9) + "." + e->name; break;
      case HK::Not: s = "~" + expr(e->kids[0], 8); break;
      case HK::Neg: s = "-" + expr(e->kids[0], 8); break;
      case HK::Ite:
        s = "if " + expr(e->kids[0], 0) + " then " + expr(e->kids[1], 0) +
            " else " + expr(e->kids[2], 1);
        break;
      case HK::Imp:
        // right-associative: left child needs strictly tighter context
        s = expr(e->kids[0], p + 1) + " " + op_str(e->k) + " " + expr(e->kids[1], p);
        break;
      case HK::Eq: case HK::Ne: case HK::Lt: case HK::Le: case HK::Gt: case HK::Ge:
        // non-associative: both children strictly tighter
        s = expr(e->kids[0], p + 1) + " " + op_str(e->k) + " " +
            expr(e->kids[1], p + 1);
        break;
      case HK::Eqv: case HK::Or: case HK::And:
      case HK::Add: case HK::Mul:
        s = expr(e->kids[0], p) + " " + op_str(e->k) + " " + expr(e->kids[1], p + 1);
        break;
      case HK::Sub: case HK::Div: case HK::Mod:
        // left-assoc, non-commutative: right child strictly tighter
        s = expr(e->kids[0], p) + " " + op_str(e->k) + " " + expr(e->kids[1], p + 1);
        break;
      case HK::All:
        s = "ALL " + binders(e->binders) + " (" + expr(e->kids[0], 0) + ")";
        break;
      case HK::Some:
        s = "SOME " + binders(e->binders) + " (" + expr(e->kids[0], 0) + ")";
        break;
      case HK::MinR:
        s = "$min " + binders(e->binders) + " (" + expr(e->kids[0], 0) + " | " +
            expr(e->kids[1], 0) + ")";
        break;
      case HK::MaxR:
        s = "$max " + binders(e->binders) + " (" + expr(e->kids[0], 0) + " | " +
            expr(e->kids[1], 0) + ")";
        break;
      case HK::Population:
        s = "population(" + expr(e->kids[0], 0) + ")";
        break;
      case HK::Call: {
        s = e->name + "(";
        for (size_t i = 0; i < e->kids.size(); i++)
          s += (i ? ", " : "") + expr(e->kids[i], 0);
        s += ")";
        break;
      }
      case HK::AllBlock:
        s = "ALL " + e->binders[0].var + " : " + e->name + " (" +
            expr(e->kids[0], 0) + ")";
        break;
    }
    if (p < ctx) return "(" + s + ")";
    return s;
  }
};

std::string target_str(const HDef& d) {
  std::string s = d.target;
  for (auto& seg : d.path)
    s += seg.is_field ? "." + seg.field : "[" + seg.binder + "]";
  return s;
}

}  // namespace

std::string print_type(const HllModel& m, const HTypePtr& t) {
  Printer pr{m};
  return pr.type(t);
}

std::string print_expr(const HllModel& m, const HExprPtr& e) {
  Printer pr{m};
  return pr.expr(e, 0);
}

std::string print_namespace(const HllModel& m, int ns) {
  Printer pr{m};
  std::ostringstream out;
  std::string ind;
  bool named = ns != 0 && !m.namespaces[ns].empty();
  if (named) {
    out << "namespace " << m.namespaces[ns] << " {\n";
    ind = "  ";
  }

  auto section = [&](const char* hdr, const std::string& body) {
    if (body.empty()) return;
    out << ind << hdr << "\n" << body;
  };

  std::string s;
  for (auto& st : m.streams)
    if (st.ns == ns && st.is_const) {
      s += ind + "  " + pr.declarator(st.type, st.name);
      if (st.const_value) s += " := " + pr.expr(st.const_value, 0);
      s += ";\n";
    }
  section("Constants:", s);

  s.clear();
  for (size_t ai = 0; ai < m.aliases.size(); ai++) {
    auto& a = m.aliases[ai];
    // aliases carry no namespace of their own; print them in the root
    if (ns != 0) break;
    pr.alias_limit = (int)ai;
    std::string rhs;
    if (a.second->k == HType::Enum &&
        m.enums[a.second->enum_id].name == a.first) {
      const HEnum& en = m.enums[a.second->enum_id];
      rhs = "enum { ";
      for (size_t i = 0; i < en.items.size(); i++)
        rhs += (i ? ", " : "") + en.items[i];
      rhs += " }";
    } else if (a.second->k == HType::Struct) {
      rhs = "struct { ";
      auto& fs = a.second->fields;
      for (size_t i = 0; i < fs.size(); i++) {
        if (i) rhs += ", ";
        rhs += fs[i].first + " : " + pr.type(fs[i].second);
      }
      rhs += " }";
    } else {
      rhs = pr.type(a.second);
    }
    s += ind + "  " + a.first + " := " + rhs + ";\n";
  }
  pr.alias_limit = -1;
  section("Types:", s);

  s.clear();
  for (auto& st : m.streams)
    if (st.ns == ns && !st.is_const)
      s += ind + "  " + pr.declarator(st.type, st.name) + ";\n";
  section("Declarations:", s);

  s.clear();
  for (auto& b : m.blocks)
    if (b.ns == ns) {
      s += ind + "  " + b.name + " : ";
      for (size_t i = 0; i < b.args.size(); i++)
        s += (i ? ", " : "") + pr.type(b.args[i]);
      s += " -> " + pr.type(b.ret) + ";\n";
    }
  section("Blocks:", s);

  s.clear();
  for (size_t di = 0; di < m.defs.size(); di++) {
    const HDef& d = m.defs[di];
    if (d.ns != ns) continue;
    if (d.comma_form) {
      if (d.kind == HDef::Next) continue;  // printed with its Init twin
      // find the Next half: same target, comma_form, first following
      const HDef* nx = nullptr;
      for (size_t j = di + 1; j < m.defs.size(); j++)
        if (m.defs[j].target == d.target && m.defs[j].kind == HDef::Next &&
            m.defs[j].comma_form) {
          nx = &m.defs[j];
          break;
        }
      s += ind + "  " + target_str(d) + " := " + pr.expr(d.rhs, 0);
      if (nx) s += ", " + pr.expr(nx->rhs, 0);
      s += ";\n";
      continue;
    }
    std::string head = target_str(d);
    if (d.kind == HDef::Init) head = "I(" + head + ")";
    if (d.kind == HDef::Next) head = "X(" + head + ")";
    s += ind + "  " + head + " := " + pr.expr(d.rhs, 0) + ";\n";
  }
  section("Definitions:", s);

  s.clear();
  for (auto& c : m.constraints)
    if (c.ns == ns) {
      s += ind + "  ";
      if (!c.label.empty()) s += c.label + ": ";
      s += pr.expr(c.expr, 0) + ";\n";
    }
  section("Constraints:", s);

  s.clear();
  for (auto& o : m.obligations)
    if (o.ns == ns) {
      s += ind + "  ";
      if (!o.label.empty()) s += o.label + ": ";
      s += pr.expr(o.expr, 0) + ";\n";
    }
  section("Proof Obligations:", s);

  if (named) out << "}\n";
  return out.str();
}

std::string print_model(const HllModel& m) {
  std::string out;
  for (int ns = 0; ns < (int)m.namespaces.size(); ns++) {
    std::string part = print_namespace(m, ns);
    if (part.empty()) continue;
    if (!out.empty()) out += "\n";
    out += part;
  }
  return out;
}

}  // namespace ebv::hll
