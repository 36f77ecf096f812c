#pragma once

// Reference interpreter.  Values are flat vectors of scalar leaves in
// canonical DFS order over the stream's type.  Exact 128-bit arithmetic;
// integer streams wrap into their power-of-two storage window on every
// write, and reads see the stored (possibly wrapped) value.  Partial
// operations continue with a defined result and record a hazard:
// division/modulo by zero give 0, an empty $min/$max selection gives 0,
// and an out-of-range array index reads the last element.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ebv/hll_ast.hpp"

namespace ebv::hll {

using Value = std::vector<i128>;

struct Hazard {
  enum Kind { DivZero, ModZero, EmptyReduce, IndexClamp, StorageWrap } kind;
  SourcePos pos;
  std::string detail;
};

// One block-instance application in one cycle.
struct BlockCall {
  int instance = -1;
  std::vector<Value> args;
  Value out;
};

// output = resolve(instance_id, args, cycle).  Leaves must respect the
// block's return type (bool 0/1, enum ordinals, ints inside the storage
// window).
using BlockResolver =
    std::function<Value(const HllModel&, int instance, const std::vector<Value>&, int cycle)>;

// Function-like deterministic resolver: output depends on the block and the
// argument values only (two calls with equal arguments agree, across
// instances and cycles).
BlockResolver sampler_resolver(uint64_t seed);

struct StepResult {
  int cycle = 0;
  std::vector<char> constraints_ok;   // parallel to model.constraints
  std::vector<char> obligations_ok;   // parallel to model.obligations
  std::vector<Hazard> hazards;
  std::vector<BlockCall> calls;       // one per instance, instance order
  bool all_constraints() const;
  bool all_obligations() const;
};

class Interp {
 public:
  // model must be elaborated.  const_values supplies symbolic constants
  // (stream id -> value); valued constants are computed internally.
  Interp(const HllModel& m, std::map<int, Value> const_values,
         BlockResolver resolver);

  // Runs one cycle: needs a value for every free input (stream id -> value).
  // Int leaves must lie inside the storage window, enums must be valid
  // ordinals, bools 0/1.
  StepResult step(const std::map<int, Value>& inputs);

  int cycle() const { return cycle_; }
  const Value& value(int stream) const;        // current cycle, after step()
  const Value& constant(int stream) const;     // constants only

  // flat leaf as text: enum ordinals by item name, bools true/false
  std::string leaf_str(const HTypePtr& scalar, i128 v) const;

  // CSV trace of every non-constant stream this step: cycle,stream,value
  // (one row per scalar leaf, suffixed leaf path).
  std::string trace_csv_header() const;
  std::string trace_csv_rows() const;

 private:
  const HllModel& m_;
  BlockResolver resolve_;
  int cycle_ = -1;                       // before first step
  std::vector<Value> cur_;               // per stream
  std::vector<Value> next_;              // X() results, installed next step
  std::vector<char> has_cur_;
  std::map<int, Value> consts_;
  std::vector<BlockCall> calls_;         // current cycle, per instance
  std::vector<char> called_;
  std::vector<Hazard>* hz_ = nullptr;

  struct Env {
    std::vector<std::pair<std::string, i128>> binders;
    // contract variable: block instance bound by an ALL-over-block
    std::string block_var;
    int block_inst = -1;
  };

  void hazard(Hazard::Kind k, const SourcePos& p, const std::string& d);
  Value eval(const HExprPtr& e, Env& env);
  i128 eval1(const HExprPtr& e, Env& env);  // scalar convenience
  Value wrap_into(const HTypePtr& t, Value v, const SourcePos& p,
                  const std::string& what);
  void validate_external(const HTypePtr& t, const Value& v,
                         const std::string& what, const SourcePos& p) const;
  void run_def(const HDef& d, bool into_next);
};

}  // namespace ebv::hll
