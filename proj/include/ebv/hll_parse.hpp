#pragma once

// Text form of the IR.  One file can carry several namespaces; several files
// can be parsed into one model (the translator ships system / contracts /
// verification as separate files that form a single model).

#include "ebv/hll_ast.hpp"

namespace ebv::hll {

HllModel parse_hll(const std::string& text, const std::string& filename);
void parse_hll_into(HllModel& m, const std::string& text, const std::string& filename);

// Expression entry point for tests.
HExprPtr parse_hll_expr(const std::string& text);

// True for words the grammar reserves (emitting such a name would not
// round-trip through the text form).
bool is_reserved_word(const std::string& w);

}  // namespace ebv::hll
