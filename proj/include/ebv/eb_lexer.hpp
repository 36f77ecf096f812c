#pragma once

// UTF-8 lexer for the Event-B subset.  Mathematical symbols have ASCII
// fallbacks (Rodin-style digraphs): both spellings map to the same token.

#include <string>
#include <vector>

#include "ebv/diag.hpp"

namespace ebv::eb {

enum class Tok {
  End, Ident, IntLit, Label,  // Label: @name
  LParen, RParen, LBrace, RBrace, Comma, Dot, Bar,
  Assign,      // :=
  BecomesIn,   // :∈  ::
  BecomesSuch, // :|
  In, NotIn, SubsetEq, SSubset,
  Union, Inter, SetMinus, Cross, Maplet, EmptySet,
  And, Or, Not, Imp, Eqv,
  Eq, Ne, Lt, Le, Gt, Ge,
  Plus, Minus, Star, Div, Mod, Exp, DotDot,
  Forall, Exists,
  Pow, Pow1, IntSet, NatSet,
  RelAll, RelTotal, RelSurj, RelTotalSurj,
  Pfun, Tfun, Pinj, Tinj, Psur, Tsur, Bij,
};

struct Token {
  Tok kind;
  std::string text;  // Ident/Label text, or literal digits
  i128 ival = 0;
  SourcePos pos;
};

std::vector<Token> lex_eb(const std::string& src, const std::string& filename);

const char* tok_name(Tok t);

}  // namespace ebv::eb
