#include "ebv/hll_parse.hpp"

#include <set>

namespace ebv::hll {

namespace {

// ------------------------------------------------------------------ lexer

enum class T {
  End, Ident, Int,
  LParen, RParen, LBrace, RBrace, LBrack, RBrack,
  Comma, Semi, Colon, Dot, Bar,
  Assign,  // :=
  Eq, Ne, Lt, Le, Gt, Ge,
  Arrow,   // ->
  DArrow,  // <->
  Tilde, Amp, Hash, Plus, Minus, Star, Slash,
};

struct Tk {
  T k;
  std::string text;
  i128 ival = 0;
  SourcePos pos;
};

std::vector<Tk> lex(const std::string& s, const std::string& file) {
  std::vector<Tk> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto pos = [&] { return SourcePos{file, line, col}; };
  auto bump = [&](size_t n) {
    for (size_t k = 0; k < n && i < s.size(); k++) {
      if (s[i] == '\n') { line++; col = 1; }
      else col++;
      i++;
    }
  };
  auto peek = [&](size_t k = 0) { return i + k < s.size() ? s[i + k] : '\0'; };

  while (i < s.size()) {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { bump(1); continue; }
    if (c == '/' && peek(1) == '/') {
      while (i < s.size() && peek() != '\n') bump(1);
      continue;
    }
    SourcePos p = pos();
    if (isdigit((unsigned char)c)) {
      std::string d;
      while (isdigit((unsigned char)peek())) { d.push_back(peek()); bump(1); }
      out.push_back({T::Int, d, i128_parse(d), p});
      continue;
    }
    if (isalpha((unsigned char)c) || c == '_' || c == '$') {
      std::string w;
      w.push_back(c);
      bump(1);
      while (isalnum((unsigned char)peek()) || peek() == '_') { w.push_back(peek()); bump(1); }
      out.push_back({T::Ident, w, 0, p});
      continue;
    }
    auto two = [&](const char* d, T t) {
      if (peek() == d[0] && peek(1) == d[1]) {
        bump(2);
        out.push_back({t, d, 0, p});
        return true;
      }
      return false;
    };
    if (peek() == '<' && peek(1) == '-' && peek(2) == '>') {
      bump(3);
      out.push_back({T::DArrow, "<->", 0, p});
      continue;
    }
    if (two(":=", T::Assign) || two("==", T::Eq) || two("!=", T::Ne) ||
        two("<=", T::Le) || two(">=", T::Ge) || two("->", T::Arrow))
      continue;
    T t;
    switch (c) {
      case '(': t = T::LParen; break;
      case ')': t = T::RParen; break;
      case '{': t = T::LBrace; break;
      case '}': t = T::RBrace; break;
      case '[': t = T::LBrack; break;
      case ']': t = T::RBrack; break;
      case ',': t = T::Comma; break;
      case ';': t = T::Semi; break;
      case ':': t = T::Colon; break;
      case '.': t = T::Dot; break;
      case '|': t = T::Bar; break;
      case '~': t = T::Tilde; break;
      case '&': t = T::Amp; break;
      case '#': t = T::Hash; break;
      case '+': t = T::Plus; break;
      case '-': t = T::Minus; break;
      case '*': t = T::Star; break;
      case '/': t = T::Slash; break;
      case '<': t = T::Lt; break;
      case '>': t = T::Gt; break;
      default:
        throw CompileError(p, std::string("unexpected character '") + c + "'");
    }
    bump(1);
    out.push_back({t, std::string(1, c), 0, p});
  }
  out.push_back({T::End, "", 0, pos()});
  return out;
}

const std::set<std::string> kKeywords = {
    "namespace", "bool", "int", "signed", "unsigned", "enum", "struct",
    "if", "then", "else", "mod", "ALL", "SOME", "true", "false",
    "population", "I", "X", "$min", "$max",
    "Constants", "Types", "Declarations", "Blocks", "Definitions",
    "Constraints", "Proof", "Obligations"};

// ------------------------------------------------------------------ parser

struct Parser {
  HllModel& m;
  std::vector<Tk> ts;
  size_t p = 0;

  const Tk& cur() const { return ts[p]; }
  const Tk& ahead(size_t k) const { return ts[std::min(p + k, ts.size() - 1)]; }
  bool at(T t) const { return cur().k == t; }
  bool at_word(const char* w) const { return at(T::Ident) && cur().text == w; }
  Tk eat() { return ts[p++]; }
  bool eat_word(const char* w) {
    if (at_word(w)) { p++; return true; }
    return false;
  }
  Tk expect(T t, const std::string& what) {
    if (!at(t)) throw CompileError(cur().pos, "expected " + what);
    return eat();
  }
  std::string expect_name(const std::string& what) {
    if (!at(T::Ident)) throw CompileError(cur().pos, "expected " + what);
    if (kKeywords.count(cur().text))
      throw CompileError(cur().pos, "'" + cur().text + "' is reserved");
    return eat().text;
  }
  [[noreturn]] void err(const std::string& msg) const {
    throw CompileError(cur().pos, msg);
  }

  // ---- sections

  bool at_section_header() const {
    if (!at(T::Ident)) return false;
    const std::string& w = cur().text;
    if (w == "Proof")
      return ahead(1).k == T::Ident && ahead(1).text == "Obligations" &&
             ahead(2).k == T::Colon;
    static const std::set<std::string> s = {"Constants", "Types", "Declarations",
                                            "Blocks", "Definitions", "Constraints"};
    return s.count(w) > 0 && ahead(1).k == T::Colon;
  }

  bool at_item_end() const {
    return at(T::End) || at(T::RBrace) || at_word("namespace") || at_section_header();
  }

  void parse_file() {
    while (!at(T::End)) {
      if (eat_word("namespace")) {
        std::string name = expect_name("namespace name");
        int ns = m.ns_id(name);
        expect(T::LBrace, "'{'");
        while (!at(T::RBrace)) {
          if (at(T::End)) err("unterminated namespace");
          parse_section(ns);
        }
        eat();
        continue;
      }
      parse_section(0);
    }
  }

  void parse_section(int ns) {
    if (!at_section_header())
      err("expected a section header (Constants:, Types:, Declarations:, Blocks:, "
          "Definitions:, Constraints:, Proof Obligations:)");
    std::string w = eat().text;
    if (w == "Proof") { eat(); }  // "Obligations"
    expect(T::Colon, "':'");
    while (!at_item_end()) {
      if (w == "Constants") parse_constant(ns);
      else if (w == "Types") parse_type_alias(ns);
      else if (w == "Declarations") parse_declaration(ns);
      else if (w == "Blocks") parse_block(ns);
      else if (w == "Definitions") parse_definition(ns);
      else if (w == "Constraints") parse_prop(ns, m.constraints, false);
      else parse_prop(ns, m.obligations, true);
    }
  }

  // ---- types

  // A type usable in declarations; named enums/structs come from Types.
  HTypePtr parse_type(bool allow_inline_compound) {
    SourcePos p0 = cur().pos;
    HTypePtr base;
    if (eat_word("bool")) {
      base = HType::mk_bool();
    } else if (eat_word("int")) {
      if (eat_word("signed")) {
        Tk wtk = expect(T::Int, "width");
        if (wtk.ival < 1 || wtk.ival > 64)
          throw CompileError(wtk.pos, "int width must be in 1..64");
        i128 half = (i128)1 << (int)(wtk.ival - 1);
        base = HType::mk_int(-half, half - 1);
      } else if (eat_word("unsigned")) {
        Tk wtk = expect(T::Int, "width");
        if (wtk.ival < 1 || wtk.ival > 64)
          throw CompileError(wtk.pos, "int width must be in 1..64");
        base = HType::mk_int(0, ((i128)1 << (int)wtk.ival) - 1);
      } else {
        expect(T::LBrack, "'[' after 'int'");
        i128 lo = parse_const_int();
        expect(T::Comma, "','");
        i128 hi = parse_const_int();
        expect(T::RBrack, "']'");
        if (lo > hi) throw CompileError(p0, "empty integer interval");
        base = HType::mk_int(lo, hi);
      }
    } else if (at_word("enum")) {
      if (!allow_inline_compound)
        err("enum types must be introduced in a Types: section");
      eat();
      expect(T::LBrace, "'{'");
      HEnum en;
      en.items.push_back(expect_name("enum item"));
      while (at(T::Comma)) { eat(); en.items.push_back(expect_name("enum item")); }
      expect(T::RBrace, "'}'");
      int id = (int)m.enums.size();
      m.enums.push_back(std::move(en));
      base = HType::mk_enum(id);
    } else if (at_word("struct")) {
      if (!allow_inline_compound)
        err("struct types must be introduced in a Types: section");
      eat();
      expect(T::LBrace, "'{'");
      std::vector<std::pair<std::string, HTypePtr>> fields;
      for (;;) {
        std::string fn = expect_name("field name");
        expect(T::Colon, "':'");
        fields.emplace_back(fn, parse_type(false));
        if (!at(T::Comma)) break;
        eat();
      }
      expect(T::RBrace, "'}'");
      base = HType::mk_struct(std::move(fields));
    } else if (at(T::Ident)) {
      std::string n = eat().text;
      base = nullptr;
      for (auto& a : m.aliases)
        if (a.first == n) base = a.second;
      if (!base) throw CompileError(p0, "unknown type name '" + n + "'");
    } else {
      err("expected a type");
    }
    // suffix array dimensions on the type itself (used in Types aliases)
    std::vector<i128> dims;
    while (at(T::LBrack)) {
      eat();
      dims.push_back(parse_const_size());
      expect(T::RBrack, "']'");
    }
    for (size_t k = dims.size(); k-- > 0;) base = HType::mk_array(base, dims[k]);
    return base;
  }

  i128 parse_const_int() {
    bool neg = false;
    if (at(T::Minus)) { eat(); neg = true; }
    Tk t = expect(T::Int, "integer literal");
    return neg ? -t.ival : t.ival;
  }
  i128 parse_const_size() {
    Tk t = expect(T::Int, "array size");
    if (t.ival < 1 || t.ival > 65536)
      throw CompileError(t.pos, "array size must be in 1..65536");
    return t.ival;
  }

  // C-style declarator: type name, then dimensions on the name
  std::pair<std::string, HTypePtr> parse_declarator() {
    HTypePtr t = parse_type(false);
    std::string name = expect_name("name");
    std::vector<i128> dims;
    while (at(T::LBrack)) {
      eat();
      dims.push_back(parse_const_size());
      expect(T::RBrack, "']'");
    }
    for (size_t k = dims.size(); k-- > 0;) t = HType::mk_array(t, dims[k]);
    return {name, t};
  }

  void check_fresh(const std::string& n, const SourcePos& p) {
    if (m.stream_ids.count(n) || m.block_ids.count(n) || m.enum_item_ids.count(n))
      throw CompileError(p, "duplicate name '" + n + "'");
    for (auto& a : m.aliases)
      if (a.first == n) throw CompileError(p, "duplicate name '" + n + "'");
  }

  void parse_constant(int ns) {
    SourcePos p0 = cur().pos;
    auto [name, t] = parse_declarator();
    check_fresh(name, p0);
    HStream s;
    s.name = name;
    s.type = t;
    s.ns = ns;
    s.pos = p0;
    s.is_const = true;
    if (at(T::Assign)) {
      eat();
      s.const_value = parse_expr();
    }
    expect(T::Semi, "';'");
    m.stream_ids[name] = (int)m.streams.size();
    m.streams.push_back(std::move(s));
  }

  void parse_type_alias(int ns) {
    (void)ns;
    SourcePos p0 = cur().pos;
    std::string name = expect_name("type name");
    check_fresh(name, p0);
    expect(T::Assign, "':='");
    size_t enum_before = m.enums.size();
    HTypePtr t = parse_type(true);
    expect(T::Semi, "';'");
    // an enum introduced right here takes the alias name
    if (t->k == HType::Enum && m.enums.size() == enum_before + 1)
      m.enums.back().name = name;
    if (t->k == HType::Enum) {
      const HEnum& en = m.enums[t->enum_id];
      for (size_t i = 0; i < en.items.size(); i++) {
        if (m.enum_item_ids.count(en.items[i]))
          throw CompileError(p0, "duplicate enum item '" + en.items[i] + "'");
        m.enum_item_ids[en.items[i]] = {t->enum_id, (int)i};
      }
    }
    m.aliases.emplace_back(name, t);
  }

  void parse_declaration(int ns) {
    SourcePos p0 = cur().pos;
    auto [name, t] = parse_declarator();
    check_fresh(name, p0);
    expect(T::Semi, "';'");
    HStream s;
    s.name = name;
    s.type = t;
    s.ns = ns;
    s.pos = p0;
    m.stream_ids[name] = (int)m.streams.size();
    m.streams.push_back(std::move(s));
  }

  void parse_block(int ns) {
    SourcePos p0 = cur().pos;
    std::string name = expect_name("block name");
    check_fresh(name, p0);
    expect(T::Colon, "':'");
    HBlockDecl b;
    b.name = name;
    b.ns = ns;
    b.pos = p0;
    b.args.push_back(parse_type(false));
    while (at(T::Comma)) { eat(); b.args.push_back(parse_type(false)); }
    expect(T::Arrow, "'->'");
    b.ret = parse_type(false);
    expect(T::Semi, "';'");
    m.block_ids[name] = (int)m.blocks.size();
    m.blocks.push_back(std::move(b));
  }

  void parse_definition(int ns) {
    SourcePos p0 = cur().pos;
    HDef d;
    d.ns = ns;
    d.pos = p0;
    if ((at_word("I") || at_word("X")) && ahead(1).k == T::LParen) {
      d.kind = cur().text == "I" ? HDef::Init : HDef::Next;
      eat();
      eat();
      parse_target(d);
      expect(T::RParen, "')'");
      expect(T::Assign, "':='");
      d.rhs = parse_expr();
      expect(T::Semi, "';'");
      m.defs.push_back(std::move(d));
      return;
    }
    parse_target(d);
    expect(T::Assign, "':='");
    HExprPtr e0 = parse_expr();
    if (at(T::Comma)) {
      // comma sugar: initial value, then next value
      eat();
      HExprPtr e1 = parse_expr();
      expect(T::Semi, "';'");
      HDef di = d;
      di.kind = HDef::Init;
      di.comma_form = true;
      di.rhs = e0;
      HDef dn = std::move(d);
      dn.kind = HDef::Next;
      dn.comma_form = true;
      dn.rhs = e1;
      m.defs.push_back(std::move(di));
      m.defs.push_back(std::move(dn));
      return;
    }
    expect(T::Semi, "';'");
    d.kind = HDef::Plain;
    d.rhs = e0;
    m.defs.push_back(std::move(d));
  }

  void parse_target(HDef& d) {
    d.target = expect_name("stream name");
    for (;;) {
      if (at(T::LBrack)) {
        eat();
        PathSeg seg;
        seg.binder = expect_name("index binder");
        d.path.push_back(seg);
        expect(T::RBrack, "']'");
        continue;
      }
      if (at(T::Dot)) {
        eat();
        PathSeg seg;
        seg.is_field = true;
        seg.field = expect_name("field name");
        d.path.push_back(seg);
        continue;
      }
      break;
    }
  }

  void parse_prop(int ns, std::vector<HProp>& into, bool is_obligation) {
    HProp pr;
    pr.ns = ns;
    pr.pos = cur().pos;
    if (at(T::Ident) && !kKeywords.count(cur().text) && ahead(1).k == T::Colon) {
      pr.label = eat().text;
      eat();
    } else if (is_obligation) {
      pr.label = "po_" + std::to_string(m.obligations.size());
    }
    pr.expr = parse_expr();
    expect(T::Semi, "';'");
    into.push_back(std::move(pr));
  }

  // ---- expressions
  // precedence: if/then/else wraps everything; then
  //   1 <->   2 -> (right)   3 #   4 &   5 == != < <= > >= (non-assoc)
  //   6 + -   7 * / mod   prefix ~ -   postfix [] .

  HExprPtr parse_expr() { return parse_ite(); }

  HExprPtr parse_ite() {
    if (at_word("if")) {
      SourcePos p0 = cur().pos;
      eat();
      auto e = HExpr::mk(HK::Ite, p0);
      e->kids.push_back(parse_expr());
      if (!eat_word("then")) err("expected 'then'");
      e->kids.push_back(parse_expr());
      if (!eat_word("else")) err("expected 'else'");
      e->kids.push_back(parse_expr());
      return e;
    }
    return parse_bin(1);
  }

  bool binop(const Tk& t, HK& k, int& lv, bool& right) const {
    right = false;
    switch (t.k) {
      case T::DArrow: k = HK::Eqv; lv = 1; return true;
      case T::Arrow: k = HK::Imp; lv = 2; right = true; return true;
      case T::Hash: k = HK::Or; lv = 3; return true;
      case T::Amp: k = HK::And; lv = 4; return true;
      case T::Eq: k = HK::Eq; lv = 5; return true;
      case T::Ne: k = HK::Ne; lv = 5; return true;
      case T::Lt: k = HK::Lt; lv = 5; return true;
      case T::Le: k = HK::Le; lv = 5; return true;
      case T::Gt: k = HK::Gt; lv = 5; return true;
      case T::Ge: k = HK::Ge; lv = 5; return true;
      case T::Plus: k = HK::Add; lv = 6; return true;
      case T::Minus: k = HK::Sub; lv = 6; return true;
      case T::Star: k = HK::Mul; lv = 7; return true;
      case T::Slash: k = HK::Div; lv = 7; return true;
      case T::Ident: if (t.text == "mod") { k = HK::Mod; lv = 7; return true; } return false;
      default: return false;
    }
  }

  HExprPtr parse_bin(int min_lv) {
    HExprPtr lhs = parse_unary();
    for (;;) {
      HK k;
      int lv;
      bool right;
      if (!binop(cur(), k, lv, right) || lv < min_lv) return lhs;
      SourcePos p0 = cur().pos;
      eat();
      HExprPtr rhs = parse_bin(right ? lv : lv + 1);
      auto e = HExpr::mk(k, p0);
      e->kids = {std::move(lhs), std::move(rhs)};
      lhs = std::move(e);
      if (lv == 5) {
        HK k2;
        int lv2;
        bool r2;
        if (binop(cur(), k2, lv2, r2) && lv2 == 5)
          err("comparison chains need parentheses");
      }
    }
  }

  HExprPtr parse_unary() {
    SourcePos p0 = cur().pos;
    if (at(T::Tilde)) {
      eat();
      auto e = HExpr::mk(HK::Not, p0);
      e->kids.push_back(parse_unary());
      return e;
    }
    if (at(T::Minus)) {
      eat();
      auto e = HExpr::mk(HK::Neg, p0);
      e->kids.push_back(parse_unary());
      return e;
    }
    return parse_postfix();
  }

  HExprPtr parse_postfix() {
    HExprPtr e = parse_primary();
    for (;;) {
      if (at(T::LBrack)) {
        SourcePos p0 = cur().pos;
        eat();
        auto ix = HExpr::mk(HK::Index, p0);
        ix->kids.push_back(std::move(e));
        ix->kids.push_back(parse_expr());
        expect(T::RBrack, "']'");
        e = std::move(ix);
        continue;
      }
      if (at(T::Dot)) {
        SourcePos p0 = cur().pos;
        eat();
        auto mb = HExpr::mk(HK::Member, p0);
        mb->name = expect(T::Ident, "member name").text;
        mb->kids.push_back(std::move(e));
        e = std::move(mb);
        continue;
      }
      return e;
    }
  }

  void parse_range(HBinder& b) {
    expect(T::LBrack, "'['");
    b.lo = parse_expr();
    expect(T::Comma, "','");
    b.hi = parse_expr();
    expect(T::RBrack, "']'");
  }

  HExprPtr parse_primary() {
    SourcePos p0 = cur().pos;
    switch (cur().k) {
      case T::Int: {
        Tk t = eat();
        auto e = HExpr::mk(HK::IntLit, p0);
        e->ival = t.ival;
        return e;
      }
      case T::LParen: {
        eat();
        HExprPtr e = parse_expr();
        expect(T::RParen, "')'");
        return e;
      }
      case T::Ident: break;
      default: err("expected an expression");
    }
    std::string w = cur().text;
    if (w == "true" || w == "false") {
      eat();
      auto e = HExpr::mk(HK::BoolLit, p0);
      e->bval = (w == "true");
      return e;
    }
    if (w == "if") return parse_ite();
    if (w == "population") {
      eat();
      expect(T::LParen, "'('");
      auto e = HExpr::mk(HK::Population, p0);
      e->kids.push_back(parse_expr());
      expect(T::RParen, "')'");
      return e;
    }
    if (w == "ALL" || w == "SOME") {
      eat();
      bool universal = (w == "ALL");
      std::string v0 = expect_name("binder variable");
      expect(T::Colon, "':'");
      if (at(T::Ident)) {
        // contract quantifier over a block's instances
        if (!universal) err("block quantification is universal only");
        auto e = HExpr::mk(HK::AllBlock, p0);
        e->name = eat().text;
        HBinder b;
        b.var = v0;
        e->binders.push_back(std::move(b));
        expect(T::LParen, "'('");
        e->kids.push_back(parse_expr());
        expect(T::RParen, "')'");
        return e;
      }
      auto e = HExpr::mk(universal ? HK::All : HK::Some, p0);
      HBinder b0;
      b0.var = v0;
      parse_range(b0);
      e->binders.push_back(std::move(b0));
      while (at(T::Comma)) {
        eat();
        HBinder b;
        b.var = expect_name("binder variable");
        expect(T::Colon, "':'");
        parse_range(b);
        e->binders.push_back(std::move(b));
      }
      expect(T::LParen, "'('");
      e->kids.push_back(parse_expr());
      expect(T::RParen, "')'");
      return e;
    }
    if (w == "$min" || w == "$max") {
      eat();
      auto e = HExpr::mk(w == "$min" ? HK::MinR : HK::MaxR, p0);
      HBinder b;
      b.var = expect_name("binder variable");
      expect(T::Colon, "':'");
      parse_range(b);
      e->binders.push_back(std::move(b));
      expect(T::LParen, "'('");
      e->kids.push_back(parse_expr());  // filter predicate
      expect(T::Bar, "'|'");
      e->kids.push_back(parse_expr());  // value expression
      expect(T::RParen, "')'");
      return e;
    }
    if (kKeywords.count(w)) err("'" + w + "' is reserved");
    eat();
    if (at(T::LParen)) {
      // block call; one instance per call site
      eat();
      auto e = HExpr::mk(HK::Call, p0);
      e->name = w;
      if (!at(T::RParen)) {
        e->kids.push_back(parse_expr());
        while (at(T::Comma)) { eat(); e->kids.push_back(parse_expr()); }
      }
      expect(T::RParen, "')'");
      return e;
    }
    auto e = HExpr::mk(HK::Name, p0);
    e->name = w;
    return e;
  }
};

}  // namespace

void parse_hll_into(HllModel& m, const std::string& text, const std::string& filename) {
  if (m.namespaces.empty()) m.namespaces.push_back("");
  Parser ps{m, lex(text, filename)};
  ps.parse_file();
  m.elaborated = false;
}

bool is_reserved_word(const std::string& w) { return kKeywords.count(w) != 0; }

HllModel parse_hll(const std::string& text, const std::string& filename) {
  HllModel m;
  parse_hll_into(m, text, filename);
  return m;
}

HExprPtr parse_hll_expr(const std::string& text) {
  HllModel m;
  Parser ps{m, lex(text, "<expr>")};
  HExprPtr e = ps.parse_expr();
  if (!ps.at(T::End)) throw CompileError(ps.cur().pos, "trailing input after expression");
  return e;
}

}  // namespace ebv::hll
