#pragma once

// Canonical text form of a model.  Printing is deterministic (source order
// within each section) and reparses to an equivalent model, so emitted
// files are diff-stable and usable as fixtures.

#include <string>

#include "ebv/hll_ast.hpp"

namespace ebv::hll {

// One namespace of the model as a complete `.hll` file body.  ns = index
// into model.namespaces.
std::string print_namespace(const HllModel& m, int ns);

// Whole model: every namespace that has content, root first.
std::string print_model(const HllModel& m);

std::string print_type(const HllModel& m, const HTypePtr& t);
std::string print_expr(const HllModel& m, const HExprPtr& e);

}  // namespace ebv::hll
