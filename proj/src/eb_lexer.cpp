#include "ebv/eb_lexer.hpp"

#include <cstring>

namespace ebv::eb {

namespace {

struct Cursor {
  const std::string& s;
  std::string file;
  size_t i = 0;
  int line = 1, col = 1;

  bool eof() const { return i >= s.size(); }
  char peek(size_t k = 0) const { return i + k < s.size() ? s[i + k] : '\0'; }

  SourcePos pos() const { return {file, line, col}; }

  void bump(size_t bytes) {
    for (size_t k = 0; k < bytes && i < s.size(); k++) {
      if (s[i] == '\n') { line++; col = 1; }
      else if ((s[i] & 0xC0) != 0x80) col++;  // count codepoints, not bytes
      else {}
      i++;
    }
  }

  // decode one UTF-8 codepoint at i (returns 0 on malformed input)
  uint32_t cp(size_t* len) const {
    unsigned char c = (unsigned char)peek();
    if (c < 0x80) { *len = 1; return c; }
    if ((c & 0xE0) == 0xC0) { *len = 2; return ((c & 0x1Fu) << 6) | ((unsigned char)peek(1) & 0x3Fu); }
    if ((c & 0xF0) == 0xE0) {
      *len = 3;
      return ((c & 0x0Fu) << 12) | (((unsigned char)peek(1) & 0x3Fu) << 6) |
             ((unsigned char)peek(2) & 0x3Fu);
    }
    if ((c & 0xF8) == 0xF0) {
      *len = 4;
      return ((c & 0x07u) << 18) | (((unsigned char)peek(1) & 0x3Fu) << 12) |
             (((unsigned char)peek(2) & 0x3Fu) << 6) | ((unsigned char)peek(3) & 0x3Fu);
    }
    *len = 1;
    return 0;
  }
};

bool ident_start(uint32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_cont(uint32_t c) {
  return ident_start(c) || (c >= '0' && c <= '9');
}

struct Sym { const char* txt; Tok tok; };

// ASCII digraph table, longest-first within each leading character.
const Sym kAscii[] = {
    {"<<->>", Tok::RelTotalSurj}, {"<<->", Tok::RelTotal}, {"<->>", Tok::RelSurj},
    {"<=>", Tok::Eqv}, {"<->", Tok::RelAll}, {"<<:", Tok::SSubset},
    {"<=", Tok::Le}, {"<:", Tok::SubsetEq}, {"<", Tok::Lt},
    {">->>", Tok::Bij}, {">->", Tok::Tinj}, {">+>", Tok::Pinj}, {">=", Tok::Ge}, {">", Tok::Gt},
    {"-->>", Tok::Tsur}, {"-->", Tok::Tfun}, {"-", Tok::Minus},
    {"+->>", Tok::Psur}, {"+->", Tok::Pfun}, {"+", Tok::Plus},
    {"|->", Tok::Maplet}, {"|", Tok::Bar},
    {":=", Tok::Assign}, {"::", Tok::BecomesIn}, {":|", Tok::BecomesSuch}, {":", Tok::In},
    {"/=", Tok::Ne}, {"/:", Tok::NotIn}, {"/\\", Tok::Inter}, {"/", Tok::Div},
    {"\\/", Tok::Union}, {"\\", Tok::SetMinus},
    {"=>", Tok::Imp}, {"=", Tok::Eq},
    {"**", Tok::Cross}, {"*", Tok::Star},
    {"..", Tok::DotDot}, {".", Tok::Dot},
    {"&", Tok::And}, {"^", Tok::Exp},
    {"!", Tok::Forall}, {"#", Tok::Exists},
    {"(", Tok::LParen}, {")", Tok::RParen},
    {"{}", Tok::EmptySet}, {"{", Tok::LBrace}, {"}", Tok::RBrace},
    {",", Tok::Comma},
};

struct USym { uint32_t cp; Tok tok; };
const USym kUni[] = {
    {0x2208, Tok::In},        // ∈
    {0x2209, Tok::NotIn},     // ∉
    {0x2286, Tok::SubsetEq},  // ⊆
    {0x2282, Tok::SSubset},   // ⊂
    {0x222A, Tok::Union},     // ∪
    {0x2229, Tok::Inter},     // ∩
    {0x2216, Tok::SetMinus},  // ∖
    {0x00D7, Tok::Cross},     // ×
    {0x21A6, Tok::Maplet},    // ↦
    {0x2205, Tok::EmptySet},  // ∅
    {0x2227, Tok::And},       // ∧
    {0x2228, Tok::Or},        // ∨
    {0x00AC, Tok::Not},       // ¬
    {0x21D2, Tok::Imp},       // ⇒
    {0x21D4, Tok::Eqv},       // ⇔
    {0x2260, Tok::Ne},        // ≠
    {0x2264, Tok::Le},        // ≤
    {0x2265, Tok::Ge},        // ≥
    {0x00F7, Tok::Div},       // ÷
    {0x2200, Tok::Forall},    // ∀
    {0x2203, Tok::Exists},    // ∃
    {0x00B7, Tok::Dot},       // · quantifier separator
    {0x2219, Tok::Dot},       // ∙
    {0x2025, Tok::DotDot},    // ‥
    {0x2124, Tok::IntSet},    // ℤ
    {0x2115, Tok::NatSet},    // ℕ
    {0x2119, Tok::Pow},       // ℙ  (ℙ1 handled after)
    {0x2194, Tok::RelAll},    // ↔
    {0x21F8, Tok::Pfun},      // ⇸
    {0x2192, Tok::Tfun},      // →
    {0x2914, Tok::Pinj},      // ⤔
    {0x21A3, Tok::Tinj},      // ↣
    {0x2900, Tok::Psur},      // ⤀
    {0x21A0, Tok::Tsur},      // ↠
    {0x2916, Tok::Bij},       // ⤖
};

}  // namespace

std::vector<Token> lex_eb(const std::string& src, const std::string& filename) {
  Cursor c{src, filename};
  std::vector<Token> out;

  while (!c.eof()) {
    char ch = c.peek();
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') { c.bump(1); continue; }
    if (ch == '/' && c.peek(1) == '/') {
      while (!c.eof() && c.peek() != '\n') c.bump(1);
      continue;
    }
    SourcePos p = c.pos();

    if (ch == '@') {
      c.bump(1);
      std::string t;
      while (!c.eof() && ident_cont((unsigned char)c.peek())) { t.push_back(c.peek()); c.bump(1); }
      if (t.empty()) throw CompileError(p, "expected label name after '@'");
      out.push_back({Tok::Label, t, 0, p});
      continue;
    }
    if (ch >= '0' && ch <= '9') {
      std::string t;
      while (!c.eof() && c.peek() >= '0' && c.peek() <= '9') { t.push_back(c.peek()); c.bump(1); }
      Token tk{Tok::IntLit, t, 0, p};
      try { tk.ival = i128_parse(t); } catch (const Error& e) { throw CompileError(p, e.what()); }
      out.push_back(tk);
      continue;
    }
    if (ident_start((unsigned char)ch)) {
      std::string t;
      while (!c.eof() && ident_cont((unsigned char)c.peek())) { t.push_back(c.peek()); c.bump(1); }
      // word-shaped operators
      if (t == "or") out.push_back({Tok::Or, t, 0, p});
      else if (t == "not") out.push_back({Tok::Not, t, 0, p});
      else if (t == "mod") out.push_back({Tok::Mod, t, 0, p});
      else if (t == "POW") out.push_back({Tok::Pow, t, 0, p});
      else if (t == "POW1") out.push_back({Tok::Pow1, t, 0, p});
      else if (t == "INT") out.push_back({Tok::IntSet, t, 0, p});
      else if (t == "NAT") out.push_back({Tok::NatSet, t, 0, p});
      else out.push_back({Tok::Ident, t, 0, p});
      continue;
    }

    if ((unsigned char)ch < 0x80) {
      bool matched = false;
      for (const Sym& s : kAscii) {
        size_t n = std::strlen(s.txt);
        if (c.s.compare(c.i, n, s.txt) == 0) {
          out.push_back({s.tok, s.txt, 0, p});
          c.bump(n);
          matched = true;
          break;
        }
      }
      if (!matched) throw CompileError(p, std::string("unexpected character '") + ch + "'");
      continue;
    }

    size_t len = 0;
    uint32_t cp = c.cp(&len);
    if (cp == 0x2119) {  // ℙ, maybe ℙ1
      c.bump(len);
      if (c.peek() == '1') { c.bump(1); out.push_back({Tok::Pow1, "POW1", 0, p}); }
      else out.push_back({Tok::Pow, "POW", 0, p});
      continue;
    }
    bool matched = false;
    for (const USym& s : kUni) {
      if (s.cp == cp) {
        out.push_back({s.tok, "", 0, p});
        c.bump(len);
        matched = true;
        break;
      }
    }
    if (!matched)
      throw CompileError(p, "unexpected character (U+" + std::to_string(cp) + ")");
  }

  out.push_back({Tok::End, "", 0, c.pos()});
  return out;
}

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::Label: return "label";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'\xc2\xb7'";
    case Tok::Bar: return "'|'";
    case Tok::Assign: return "':='";
    case Tok::BecomesIn: return "':\xe2\x88\x88'";
    case Tok::BecomesSuch: return "':|'";
    case Tok::In: return "'\xe2\x88\x88'";
    case Tok::NotIn: return "'\xe2\x88\x89'";
    case Tok::SubsetEq: return "'\xe2\x8a\x86'";
    case Tok::SSubset: return "'\xe2\x8a\x82'";
    case Tok::Union: return "'\xe2\x88\xaa'";
    case Tok::Inter: return "'\xe2\x88\xa9'";
    case Tok::SetMinus: return "'\\'";
    case Tok::Cross: return "'\xc3\x97'";
    case Tok::Maplet: return "'\xe2\x86\xa6'";
    case Tok::EmptySet: return "'\xe2\x88\x85'";
    case Tok::And: return "'\xe2\x88\xa7'";
    case Tok::Or: return "'\xe2\x88\xa8'";
    case Tok::Not: return "'\xc2\xac'";
    case Tok::Imp: return "'\xe2\x87\x92'";
    case Tok::Eqv: return "'\xe2\x87\x94'";
    case Tok::Eq: return "'='";
    case Tok::Ne: return "'\xe2\x89\xa0'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'\xe2\x89\xa4'";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'\xe2\x89\xa5'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Div: return "'\xc3\xb7'";
    case Tok::Mod: return "'mod'";
    case Tok::Exp: return "'^'";
    case Tok::DotDot: return "'..'";
    case Tok::Forall: return "'\xe2\x88\x80'";
    case Tok::Exists: return "'\xe2\x88\x83'";
    case Tok::Pow: return "'\xe2\x84\x99'";
    case Tok::Pow1: return "'\xe2\x84\x99" "1'";
    case Tok::IntSet: return "'\xe2\x84\xa4'";
    case Tok::NatSet: return "'\xe2\x84\x95'";
    case Tok::RelAll: return "'\xe2\x86\x94'";
    case Tok::RelTotal: return "'<<->'";
    case Tok::RelSurj: return "'<->>'";
    case Tok::RelTotalSurj: return "'<<->>'";
    case Tok::Pfun: return "'\xe2\x87\xb8'";
    case Tok::Tfun: return "'\xe2\x86\x92'";
    case Tok::Pinj: return "'\xe2\xa4\x94'";
    case Tok::Tinj: return "'\xe2\x86\xa3'";
    case Tok::Psur: return "'\xe2\xa4\x80'";
    case Tok::Tsur: return "'\xe2\x86\xa0'";
    case Tok::Bij: return "'\xe2\xa4\x96'";
  }
  return "?";
}

}  // namespace ebv::eb
