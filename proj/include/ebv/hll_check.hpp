#pragma once

// Elaboration: resolves names, folds quantifier ranges, computes exact
// interval bounds for every integer expression (i128 arithmetic; bound
// overflow is a compile error), discovers block instances at call sites,
// classifies streams (input / state / combinational) and builds the two
// definition evaluation orders (cycle 0 with I() definitions, steady state).

#include "ebv/hll_ast.hpp"

namespace ebv::hll {

void elaborate(HllModel& m);

// Interval of possible runtime values of a typed expression.  A stream read
// ranges over the full storage window of its type (assignments wrap into the
// window), not just the declared interval.
struct Bounds {
  i128 lo = 0, hi = 0;
};
Bounds expr_bounds(const HllModel& m, const HExprPtr& e);

// Storage window of a scalar type: [lo, lo+2^bits-1] for ints, {0,1} for
// bool, [0, items-1] for enums.
Bounds storage_range(const HllModel& m, const HTypePtr& t);

// Folds an expression over literals and valued constants; throws
// CompileError when not compile-time constant.
i128 fold_const(const HllModel& m, const HExprPtr& e);

}  // namespace ebv::hll
