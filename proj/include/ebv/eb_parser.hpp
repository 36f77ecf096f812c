#pragma once

// Recursive-descent parser for .ebm (machine) and .ebc (context) sources.

#include <variant>

#include "ebv/eb_ast.hpp"

namespace ebv::eb {

using ParsedUnit = std::variant<EbContext, EbMachine>;

// Parses one source file; throws CompileError on the first syntax error.
ParsedUnit parse_source(const std::string& text, const std::string& filename);

// Expression entry point, used by tests and by programmatic model surgery.
EExprPtr parse_eb_expr(const std::string& text, const std::string& filename = "<expr>");

}  // namespace ebv::eb
