#pragma once

// Name resolution, type inference and invariant/guard classification for the
// Event-B subset.  Machines are processed abstract-first so refinement scopes
// (abstract parameters in witnesses, ancestor variables in gluing invariants)
// are available.

#include "ebv/eb_parser.hpp"

namespace ebv::eb {

EbModel resolve_and_typecheck(std::vector<ParsedUnit> units);

// Folds an integer expression built from literals and +,-,*,unary minus.
std::optional<i128> fold_const_int(const EExprPtr& e);

// True when the expression references no variables or parameters (only
// literals, carriers and constants).
bool is_ground(const EExprPtr& e);

}  // namespace ebv::eb
