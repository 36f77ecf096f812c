#include "ebv/eb_parser.hpp"

#include <set>

#include "ebv/eb_lexer.hpp"

namespace ebv::eb {

namespace {

const std::set<std::string> kSectionWords = {
    "machine", "refines",  "sees",   "variables", "invariants", "events",
    "event",   "initialisation", "any", "where", "with", "then", "end",
    "external", "context", "extends", "sets", "size", "constants", "axioms"};

struct Parser {
  std::vector<Token> toks;
  size_t i = 0;

  const Token& cur() const { return toks[i]; }
  const Token& ahead(size_t k) const { return toks[std::min(i + k, toks.size() - 1)]; }
  bool at(Tok t) const { return cur().kind == t; }
  bool at_word(const char* w) const { return at(Tok::Ident) && cur().text == w; }

  Token eat() { return toks[i < toks.size() - 1 ? i++ : i]; }

  Token expect(Tok t, const std::string& what) {
    if (!at(t))
      throw CompileError(cur().pos, "expected " + what + ", found " +
                                        (at(Tok::Ident) ? "'" + cur().text + "'" : tok_name(cur().kind)));
    return eat();
  }

  std::string expect_ident(const std::string& what) {
    Token t = expect(Tok::Ident, what);
    return t.text;
  }

  void expect_word(const char* w) {
    if (!at_word(w))
      throw CompileError(cur().pos, std::string("expected '") + w + "', found " +
                                        (at(Tok::Ident) ? "'" + cur().text + "'" : tok_name(cur().kind)));
    eat();
  }

  bool eat_word(const char* w) {
    if (at_word(w)) { eat(); return true; }
    return false;
  }

  // ------------------------------------------------------------ expressions

  EExprPtr mk(EK k, SourcePos p) { return EExpr::mk(k, p); }

  EExprPtr mk2(EK k, SourcePos p, EExprPtr a, EExprPtr b) {
    auto e = mk(k, p);
    e->kids = {std::move(a), std::move(b)};
    return e;
  }

  // precedence levels, loosest first
  // 1 ⇔   2 ⇒   3 ∨   4 ∧   5 ¬(prefix)   6 relational (non-assoc)
  // 7 ↦   8 relation arrows   9 ..   10 ∪ ∖   11 ∩   12 ×
  // 13 + -   14 * ÷ mod   15 ^   16 unary -   then postfix/primary
  EExprPtr parse_expr(int min_lv = 1) {
    if (at(Tok::Forall) || at(Tok::Exists)) {
      SourcePos p = cur().pos;
      EK k = at(Tok::Forall) ? EK::Forall : EK::Exists;
      eat();
      auto e = mk(k, p);
      e->binders.push_back(expect_ident("bound variable"));
      while (at(Tok::Comma)) { eat(); e->binders.push_back(expect_ident("bound variable")); }
      expect(Tok::Dot, "'\xc2\xb7' after quantifier binders");
      e->kids.push_back(parse_expr(1));
      return e;
    }
    return parse_binary(min_lv);
  }

  struct OpInfo { EK k; int lv; bool right; };

  bool binop(Tok t, OpInfo& oi) {
    switch (t) {
      case Tok::Eqv: oi = {EK::Eqv, 1, false}; return true;
      case Tok::Imp: oi = {EK::Imp, 2, true}; return true;
      case Tok::Or: oi = {EK::Or, 3, false}; return true;
      case Tok::And: oi = {EK::And, 4, false}; return true;
      case Tok::Eq: oi = {EK::Eq, 6, false}; return true;
      case Tok::Ne: oi = {EK::Ne, 6, false}; return true;
      case Tok::Lt: oi = {EK::Lt, 6, false}; return true;
      case Tok::Le: oi = {EK::Le, 6, false}; return true;
      case Tok::Gt: oi = {EK::Gt, 6, false}; return true;
      case Tok::Ge: oi = {EK::Ge, 6, false}; return true;
      case Tok::In: oi = {EK::In, 6, false}; return true;
      case Tok::NotIn: oi = {EK::NotIn, 6, false}; return true;
      case Tok::SubsetEq: oi = {EK::Subset, 6, false}; return true;
      case Tok::SSubset: oi = {EK::SSubset, 6, false}; return true;
      case Tok::Maplet: oi = {EK::Maplet, 7, false}; return true;
      case Tok::RelAll: oi = {EK::RelAll, 8, false}; return true;
      case Tok::RelTotal: oi = {EK::RelTotal, 8, false}; return true;
      case Tok::RelSurj: oi = {EK::RelSurj, 8, false}; return true;
      case Tok::RelTotalSurj: oi = {EK::RelTotalSurj, 8, false}; return true;
      case Tok::Pfun: oi = {EK::Pfun, 8, false}; return true;
      case Tok::Tfun: oi = {EK::Tfun, 8, false}; return true;
      case Tok::Pinj: oi = {EK::Pinj, 8, false}; return true;
      case Tok::Tinj: oi = {EK::Tinj, 8, false}; return true;
      case Tok::Psur: oi = {EK::Psur, 8, false}; return true;
      case Tok::Tsur: oi = {EK::Tsur, 8, false}; return true;
      case Tok::Bij: oi = {EK::Bij, 8, false}; return true;
      case Tok::DotDot: oi = {EK::Interval, 9, false}; return true;
      case Tok::Union: oi = {EK::Union, 10, false}; return true;
      case Tok::SetMinus: oi = {EK::Diff, 10, false}; return true;
      case Tok::Inter: oi = {EK::Inter, 11, false}; return true;
      case Tok::Cross: oi = {EK::Cross, 12, false}; return true;
      case Tok::Plus: oi = {EK::Add, 13, false}; return true;
      case Tok::Minus: oi = {EK::Sub, 13, false}; return true;
      case Tok::Star: oi = {EK::Mul, 14, false}; return true;
      case Tok::Div: oi = {EK::Div, 14, false}; return true;
      case Tok::Mod: oi = {EK::Mod, 14, false}; return true;
      case Tok::Exp: oi = {EK::Exp, 15, true}; return true;
      default: return false;
    }
  }

  static bool nonassoc(int lv) { return lv == 6 || lv == 8 || lv == 9; }

  EExprPtr parse_binary(int min_lv) {
    EExprPtr lhs = parse_unary();
    for (;;) {
      OpInfo oi;
      if (!binop(cur().kind, oi) || oi.lv < min_lv) return lhs;
      SourcePos p = cur().pos;
      eat();
      int next_min = oi.right ? oi.lv : oi.lv + 1;
      EExprPtr rhs = parse_binary(next_min);
      lhs = mk2(oi.k, p, std::move(lhs), std::move(rhs));
      if (nonassoc(oi.lv)) {
        OpInfo oj;
        if (binop(cur().kind, oj) && oj.lv == oi.lv)
          throw CompileError(cur().pos, "operator is non-associative; add parentheses");
      }
    }
  }

  EExprPtr parse_unary() {
    SourcePos p = cur().pos;
    if (at(Tok::Not)) {
      eat();
      auto e = mk(EK::Not, p);
      e->kids.push_back(parse_binary(5));
      return e;
    }
    if (at(Tok::Minus)) {
      eat();
      auto e = mk(EK::Neg, p);
      e->kids.push_back(parse_unary());
      return e;
    }
    return parse_postfix();
  }

  EExprPtr parse_postfix() {
    EExprPtr e = parse_primary();
    while (at(Tok::LParen)) {
      SourcePos p = cur().pos;
      eat();
      auto app = mk(EK::App, p);
      app->kids.push_back(std::move(e));
      if (!at(Tok::RParen)) {
        app->kids.push_back(parse_expr(1));
        while (at(Tok::Comma)) { eat(); app->kids.push_back(parse_expr(1)); }
      }
      expect(Tok::RParen, "')'");
      e = std::move(app);
    }
    return e;
  }

  EExprPtr builtin_call(EK k, SourcePos p, int arity_min, int arity_max, const std::string& nm) {
    expect(Tok::LParen, "'(' after " + nm);
    auto e = mk(k, p);
    if (!at(Tok::RParen)) {
      e->kids.push_back(parse_expr(1));
      while (at(Tok::Comma)) { eat(); e->kids.push_back(parse_expr(1)); }
    }
    expect(Tok::RParen, "')'");
    int n = (int)e->kids.size();
    if (n < arity_min || n > arity_max)
      throw CompileError(p, nm + " takes " + std::to_string(arity_min) +
                                 (arity_max > arity_min ? ".." + std::to_string(arity_max) : "") +
                                 " argument(s)");
    return e;
  }

  EExprPtr parse_primary() {
    SourcePos p = cur().pos;
    switch (cur().kind) {
      case Tok::IntLit: {
        Token t = eat();
        auto e = mk(EK::IntLit, p);
        e->ival = t.ival;
        return e;
      }
      case Tok::EmptySet: eat(); return mk(EK::EmptySet, p);
      case Tok::IntSet: eat(); return mk(EK::IntSet, p);
      case Tok::NatSet: eat(); return mk(EK::NatSet, p);
      case Tok::Pow: {
        eat();
        return builtin_call(EK::PowOp, p, 1, 1, "\xe2\x84\x99");
      }
      case Tok::Pow1: {
        eat();
        return builtin_call(EK::Pow1Op, p, 1, 1, "\xe2\x84\x99" "1");
      }
      case Tok::LParen: {
        eat();
        EExprPtr e = parse_expr(1);
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::LBrace: {
        eat();
        // either a set literal {a, b, ...} or a comprehension {x, y · P | E}
        std::vector<EExprPtr> items;
        items.push_back(parse_expr(1));
        while (at(Tok::Comma)) { eat(); items.push_back(parse_expr(1)); }
        if (at(Tok::Dot)) {
          eat();
          auto e = mk(EK::SetComp, p);
          for (auto& it : items) {
            if (it->k != EK::Ident)
              throw CompileError(it->pos, "comprehension binders must be plain identifiers");
            e->binders.push_back(it->name);
          }
          e->kids.push_back(parse_expr(1));  // predicate
          expect(Tok::Bar, "'|' in set comprehension");
          e->kids.push_back(parse_expr(1));  // element expression
          expect(Tok::RBrace, "'}'");
          return e;
        }
        expect(Tok::RBrace, "'}'");
        auto e = mk(EK::SetLit, p);
        e->kids = std::move(items);
        return e;
      }
      case Tok::Ident: {
        std::string w = cur().text;
        if (w == "card") { eat(); return builtin_call(EK::Card, p, 1, 1, "card"); }
        if (w == "dom") { eat(); return builtin_call(EK::Dom, p, 1, 1, "dom"); }
        if (w == "ran") { eat(); return builtin_call(EK::Ran, p, 1, 1, "ran"); }
        if (w == "min") { eat(); return builtin_call(EK::MinOp, p, 1, 1, "min"); }
        if (w == "max") { eat(); return builtin_call(EK::MaxOp, p, 1, 1, "max"); }
        if (w == "finite") { eat(); return builtin_call(EK::Finite, p, 1, 1, "finite"); }
        if (w == "bool") { eat(); return builtin_call(EK::BoolOf, p, 1, 1, "bool"); }
        if (w == "union") { eat(); return builtin_call(EK::UnionGen, p, 1, 1, "union"); }
        if (w == "inter") { eat(); return builtin_call(EK::InterGen, p, 1, 1, "inter"); }
        if (w == "partition") { eat(); return builtin_call(EK::Partition, p, 2, 64, "partition"); }
        if (w == "UNION" || w == "INTER") {
          eat();
          auto e = mk(w == "UNION" ? EK::QUnion : EK::QInter, p);
          e->binders.push_back(expect_ident("bound variable"));
          while (at(Tok::Comma)) { eat(); e->binders.push_back(expect_ident("bound variable")); }
          expect(Tok::Dot, "'\xc2\xb7'");
          e->kids.push_back(parse_expr(1));
          expect(Tok::Bar, "'|'");
          e->kids.push_back(parse_expr(1));
          return e;
        }
        if (w == "TRUE" || w == "FALSE") {
          eat();
          auto e = mk(EK::BoolLit, p);
          e->bval = (w == "TRUE");
          return e;
        }
        if (w == "BOOL") { eat(); return mk(EK::BoolSet, p); }
        eat();
        auto e = mk(EK::Ident, p);
        e->name = w;
        return e;
      }
      default:
        throw CompileError(p, std::string("expected expression, found ") + tok_name(cur().kind));
    }
  }

  // ------------------------------------------------------------ labelled items

  std::string expect_label() {
    Token t = expect(Tok::Label, "label (@name)");
    return t.text;
  }

  bool at_section_end() const {
    return at(Tok::End) || (at(Tok::Ident) && kSectionWords.count(cur().text) > 0);
  }

  // ------------------------------------------------------------ machine

  EbEvent parse_event_body(EbEvent ev) {
    if (eat_word("refines")) ev.refines = expect_ident("abstract event name");
    if (eat_word("any")) {
      while (at(Tok::Ident) && !kSectionWords.count(cur().text))
        ev.params.push_back(eat().text);
      if (ev.params.empty())
        throw CompileError(cur().pos, "expected parameter name after 'any'");
    }
    if (eat_word("where")) {
      while (at(Tok::Label)) {
        EbGuard g;
        g.pos = cur().pos;
        g.label = expect_label();
        g.pred = parse_expr();
        ev.guards.push_back(std::move(g));
      }
      if (ev.guards.empty()) throw CompileError(cur().pos, "expected labelled guard after 'where'");
    }
    if (eat_word("with")) {
      while (at(Tok::Label)) {
        EbWitness w;
        w.pos = cur().pos;
        w.label = expect_label();
        w.pred = parse_expr();
        ev.witnesses.push_back(std::move(w));
      }
      if (ev.witnesses.empty()) throw CompileError(cur().pos, "expected labelled witness after 'with'");
    }
    if (eat_word("then")) {
      while (at(Tok::Label)) {
        EbAction a;
        a.pos = cur().pos;
        a.label = expect_label();
        a.lhs = expect_ident("assigned variable");
        if (at(Tok::BecomesIn) || at(Tok::BecomesSuch))
          throw CompileError(cur().pos,
                             "nondeterministic assignment is not supported; "
                             "model the choice as an event parameter");
        expect(Tok::Assign, "':='");
        a.rhs = parse_expr();
        ev.actions.push_back(std::move(a));
      }
      if (ev.actions.empty()) throw CompileError(cur().pos, "expected labelled action after 'then'");
    }
    expect_word("end");
    return ev;
  }

  EbMachine parse_machine() {
    EbMachine m;
    m.pos = cur().pos;
    expect_word("machine");
    m.name = expect_ident("machine name");
    if (eat_word("refines")) m.refines = expect_ident("machine name");
    if (eat_word("sees")) {
      while (at(Tok::Ident) && !kSectionWords.count(cur().text)) m.sees.push_back(eat().text);
      if (m.sees.empty()) throw CompileError(cur().pos, "expected context name after 'sees'");
    }
    if (eat_word("variables")) {
      while (at(Tok::Ident) && !kSectionWords.count(cur().text)) {
        EbVariable v;
        v.pos = cur().pos;
        v.name = eat().text;
        m.variables.push_back(std::move(v));
      }
      if (m.variables.empty()) throw CompileError(cur().pos, "expected variable name");
    }
    if (eat_word("invariants")) {
      while (at(Tok::Label)) {
        EbInvariant inv;
        inv.pos = cur().pos;
        inv.label = expect_label();
        inv.pred = parse_expr();
        m.invariants.push_back(std::move(inv));
      }
      if (m.invariants.empty()) throw CompileError(cur().pos, "expected labelled invariant");
    }
    expect_word("events");
    bool have_init = false;
    for (;;) {
      if (at_word("initialisation")) {
        SourcePos p = cur().pos;
        eat();
        if (have_init) throw CompileError(p, "duplicate initialisation");
        EbEvent ev;
        ev.name = "INITIALISATION";
        ev.pos = p;
        if (!at_word("then"))
          throw CompileError(cur().pos, "initialisation takes no parameters or guards");
        m.init = parse_event_body(std::move(ev));
        have_init = true;
        continue;
      }
      bool ext = false;
      if (at_word("external") && ahead(1).kind == Tok::Ident && ahead(1).text == "event") {
        eat();
        ext = true;
      }
      if (at_word("event")) {
        eat();
        EbEvent ev;
        ev.external = ext;
        ev.pos = cur().pos;
        ev.name = expect_ident("event name");
        m.events.push_back(parse_event_body(std::move(ev)));
        continue;
      }
      if (ext) throw CompileError(cur().pos, "expected 'event' after 'external'");
      break;
    }
    if (!have_init) throw CompileError(cur().pos, "machine has no initialisation");
    expect_word("end");
    expect(Tok::End, "end of file");
    return m;
  }

  // ------------------------------------------------------------ context

  EbContext parse_context() {
    EbContext c;
    c.pos = cur().pos;
    expect_word("context");
    c.name = expect_ident("context name");
    if (eat_word("extends")) c.extends = expect_ident("context name");
    if (eat_word("sets")) {
      while (at(Tok::Ident) && !kSectionWords.count(cur().text)) {
        CarrierSet s;
        s.pos = cur().pos;
        s.name = eat().text;
        expect_word("size");
        Token sz = expect(Tok::IntLit, "carrier size bound");
        if (sz.ival < 1 || sz.ival > 4096)
          throw CompileError(sz.pos, "carrier size must be in 1..4096");
        s.size = (int)sz.ival;
        c.sets.push_back(std::move(s));
      }
      if (c.sets.empty()) throw CompileError(cur().pos, "expected carrier set declaration");
    }
    if (eat_word("constants")) {
      for (;;) {
        bool ext = eat_word("external");
        if (!at(Tok::Ident) || kSectionWords.count(cur().text)) {
          if (ext) throw CompileError(cur().pos, "expected constant name after 'external'");
          break;
        }
        EbConstant k;
        k.pos = cur().pos;
        k.external = ext;
        k.name = eat().text;
        expect(Tok::In, "':' and a type for the constant");
        k.type_expr = parse_expr();
        c.constants.push_back(std::move(k));
      }
      if (c.constants.empty()) throw CompileError(cur().pos, "expected constant declaration");
    }
    if (eat_word("axioms")) {
      while (at(Tok::Label)) {
        EbAxiom a;
        a.pos = cur().pos;
        a.label = expect_label();
        a.pred = parse_expr();
        c.axioms.push_back(std::move(a));
      }
      if (c.axioms.empty()) throw CompileError(cur().pos, "expected labelled axiom");
    }
    expect_word("end");
    expect(Tok::End, "end of file");
    return c;
  }
};

}  // namespace

EExprPtr EExpr::mk(EK k, SourcePos pos) {
  auto e = std::make_shared<EExpr>();
  e->k = k;
  e->pos = std::move(pos);
  return e;
}

ParsedUnit parse_source(const std::string& text, const std::string& filename) {
  Parser p{lex_eb(text, filename)};
  if (p.at_word("context")) return p.parse_context();
  if (p.at_word("machine")) return p.parse_machine();
  throw CompileError(p.cur().pos, "expected 'machine' or 'context' at top of file");
}

EExprPtr parse_eb_expr(const std::string& text, const std::string& filename) {
  Parser p{lex_eb(text, filename)};
  EExprPtr e = p.parse_expr();
  p.expect(Tok::End, "end of expression");
  return e;
}

}  // namespace ebv::eb
