// Machine-to-dataflow translation, checked two ways: golden emitted text for
// the construct mappings, and lockstep agreement between the reference
// interpreter and an independent explicit-state oracle over exhaustive
// parameter spaces (the oracle shares nothing with the translator beyond
// the AST).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <memory>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "eb_oracle.hpp"
#include "ebv/eb2hll.hpp"
#include "ebv/eb_flatten.hpp"
#include "ebv/eb_parser.hpp"
#include "ebv/eb_typecheck.hpp"
#include "ebv/hll_interp.hpp"

using namespace ebv;
using oracle::MachineOracle;
using oracle::OVal;
using oracle::Tuple;

// ------------------------------------------------------------ shared sources

static const char* kCtx1 = R"(
context ctx1
sets
  COLOURS size 3
constants
  red : COLOURS
  yellow : COLOURS
  green : COLOURS
external
  fun_set_red : COLOURS --> COLOURS
axioms
  @axm1 partition(COLOURS, {red}, {yellow}, {green})
  @axm2 !c . c : COLOURS => fun_set_red(c) = red
end
)";

static const char* kMac0 = R"(
machine mac0 sees ctx1
variables
  peds_go
  cars_go
invariants
  @inv1 peds_go : BOOL
  @inv2 cars_go : BOOL
  @REQ2 not(peds_go = TRUE & cars_go = TRUE)
events
  initialisation
  then
    @act1 peds_go := FALSE
    @act2 cars_go := FALSE
  end

  event set_peds_go
  where
    @grd1 cars_go = FALSE
  then
    @act1 peds_go := TRUE
  end

  event set_cars
  any new_value
  where
    @grd1 new_value : BOOL
    @grd2 new_value = TRUE => peds_go = FALSE
  then
    @act1 cars_go := new_value
  end

  event set_peds_stop
  then
    @act1 peds_go := FALSE
  end
end
)";

static const char* kMac1 = R"(
machine mac1 refines mac0 sees ctx1
variables
  peds_colour
  cars_colours
invariants
  @inv1 peds_colour : {red, green}
  @inv2 cars_colours <: COLOURS
  @glu1 peds_go = TRUE <=> peds_colour = green
  @glu2 cars_go = TRUE <=> green : cars_colours
events
  initialisation
  then
    @act1 peds_colour := red
    @act2 cars_colours := {red}
  end

  event set_peds_green refines set_peds_go
  any cmd_green
  where
    @grd0 cmd_green : BOOL
    @grd1 cmd_green = TRUE
    @grd2 green /: cars_colours
  then
    @act1 peds_colour := green
  end

  event set_cars_colours refines set_cars
  any cmd_cars new_value_colours
  where
    @grd0 cmd_cars : BOOL
    @grd1 new_value_colours <: COLOURS
    @grd2 cmd_cars = TRUE
    @grd3 green : new_value_colours => peds_colour = red
  with
    @new_value new_value = bool(green : new_value_colours)
  then
    @act1 cars_colours := new_value_colours
  end

  event set_peds_red refines set_peds_stop
  then
    @act1 peds_colour := fun_set_red(peds_colour)
  end
end
)";

namespace {

// model is heap-held: the flat machine and oracle keep pointers into it
struct Rig {
  std::unique_ptr<eb::EbModel> model;
  eb::FlatMachine fm;
  Translation t;
};

std::unique_ptr<Rig> make_rig(std::vector<std::string> sources, const std::string& machine,
                              TranslationConfig cfg = {}) {
  auto r = std::make_unique<Rig>();
  std::vector<eb::ParsedUnit> units;
  for (size_t i = 0; i < sources.size(); i++)
    units.push_back(eb::parse_source(sources[i], "u" + std::to_string(i) + ".eb"));
  r->model = std::make_unique<eb::EbModel>(eb::resolve_and_typecheck(std::move(units)));
  r->fm = eb::flatten(*r->model, machine);
  r->t = translate(r->fm, cfg);
  return r;
}

std::unique_ptr<Rig> traffic_rig() { return make_rig({kCtx1, kMac0, kMac1}, "mac1"); }

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

#define CHECK_TEXT(text, needle) CHECK_MESSAGE(contains(text, needle), "missing `" << (needle) << "` in:\n" << (text))

std::string thrown(const std::function<void()>& f) {
  try {
    f();
  } catch (const CompileError& e) {
    return e.what();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

// ---------------------------------------------------- value layout mirroring

// closed per-dimension value intervals of a set variable/parameter, in the
// translation's flattened order (left-to-right over pair components)
struct VDim {
  i128 lo = 0, hi = 0;
  i128 size() const { return hi - lo + 1; }
};

VDim scalar_vdim(const eb::ETypePtr& t, const eb::EbModel& model, int w) {
  using eb::EType;
  switch (t->kind) {
    case EType::Bool: return {0, 1};
    case EType::Carrier: return {0, model.carrier_sizes[t->carrier] - 1};
    case EType::Int: {
      i128 one = 1;
      if (!t->has_bounds) return {-(one << (w - 1)), (one << (w - 1)) - 1};
      if (t->hi < t->lo) return {0, (one << w) - 1};
      return {t->lo, t->hi};
    }
    default: throw std::runtime_error("not a scalar type");
  }
}

void flat_vdims(const eb::ETypePtr& t, const eb::EbModel& model, int w, std::vector<VDim>& out) {
  if (t->kind == eb::EType::Pair) {
    flat_vdims(t->a, model, w, out);
    flat_vdims(t->b, model, w, out);
    return;
  }
  out.push_back(scalar_vdim(t, model, w));
}

// flat bool-leaf encoding of an oracle set value, row-major over the dims
hll::Value set_bits(const OVal& v, const std::vector<VDim>& dims) {
  i128 total = 1;
  for (auto& d : dims) total *= d.size();
  hll::Value bits((size_t)total, 0);
  for (const Tuple& t : v.elems) {
    REQUIRE(t.size() == dims.size());
    i128 idx = 0;
    for (size_t d = 0; d < dims.size(); d++) {
      REQUIRE(t[d] >= dims[d].lo);
      REQUIRE(t[d] <= dims[d].hi);
      idx = idx * dims[d].size() + (t[d] - dims[d].lo);
    }
    bits[(size_t)idx] = 1;
  }
  return bits;
}

hll::Value to_value(const OVal& v, const std::vector<VDim>& dims) {
  if (!v.is_set) return {v.scalar};
  return set_bits(v, dims);
}

// ------------------------------------------------------------ lockstep rig

struct VarView {
  const eb::FlatVariable* var = nullptr;
  int stream = -1;
  std::vector<VDim> dims;  // empty for scalars
};

struct LockstepRig {
  const Rig* rig;
  MachineOracle mo;
  std::vector<VarView> vars;          // parallel to mo.concrete_vars()
  std::vector<int> grd, sel;          // per event
  std::map<std::pair<std::string, std::string>, std::pair<int, eb::ETypePtr>> params;

  LockstepRig(const Rig& r, std::map<std::string, oracle::ExtFn> ext)
      : rig(&r), mo(r.fm) {
    mo.ext = std::move(ext);
    const hll::HllModel& m = r.t.model;
    for (const eb::FlatVariable* v : mo.concrete_vars()) {
      VarView vv;
      vv.var = v;
      vv.stream = m.stream_id(v->name);
      REQUIRE(vv.stream >= 0);
      if (v->type->kind == eb::EType::Pow) flat_vdims(v->type->a, *r.model, 8, vv.dims);
      vars.push_back(std::move(vv));
    }
    for (auto& ev : r.fm.events) {
      grd.push_back(m.stream_id("GRD_" + ev.name));
      sel.push_back(m.stream_id("SEL_" + ev.name));
      REQUIRE(grd.back() >= 0);
      REQUIRE(sel.back() >= 0);
    }
    for (auto& pi : r.t.params) {
      const eb::EbEvent* ev = nullptr;
      for (auto& e : r.fm.events)
        if (e.name == pi.event) ev = &e;
      REQUIRE(ev != nullptr);
      for (size_t i = 0; i < ev->params.size(); i++)
        if (ev->params[i] == pi.param)
          params[{pi.event, pi.param}] = {m.stream_id(pi.stream), ev->param_types[i]};
    }
  }

  std::map<int, hll::Value> inputs(const MachineOracle::Params& p) const {
    std::map<int, hll::Value> in;
    for (auto& [key, val] : p) {
      auto it = params.find(key);
      REQUIRE(it != params.end());
      auto [stream, type] = it->second;
      std::vector<VDim> dims;
      if (type->kind == eb::EType::Pow) flat_vdims(type->a, *rig->model, 8, dims);
      in[stream] = to_value(val, dims);
    }
    return in;
  }

  void check_state(const hll::Interp& it, const MachineOracle::State& s) const {
    for (size_t i = 0; i < vars.size(); i++) {
      hll::Value expect = to_value(s[i], vars[i].dims);
      CHECK_MESSAGE(it.value(vars[i].stream) == expect,
                    "variable '" << vars[i].var->name << "' diverged at cycle " << it.cycle());
    }
  }

  void check_schedule(const hll::Interp& it, const MachineOracle::Step& o) const {
    for (size_t e = 0; e < grd.size(); e++) {
      CHECK_MESSAGE(it.value(grd[e])[0] == (o.guards[e] ? 1 : 0),
                    "guard of '" << rig->fm.events[e].name << "' diverged");
      CHECK_MESSAGE(it.value(sel[e])[0] == (o.fired == (int)e ? 1 : 0),
                    "selection of '" << rig->fm.events[e].name << "' diverged");
    }
  }
};

// extra per-cycle inputs (abstract-variable shadows) from the pre-state
using ShadowFn =
    std::function<std::map<int, hll::Value>(const MachineOracle::State&, const MachineOracle::Params&)>;

struct BfsOutcome {
  size_t states = 0;
  size_t edges = 0;
  bool all_obligations = true;
  std::set<std::string> failed_obligations;
};

// breadth-first product walk: every reachable oracle state is expanded with
// every parameter choice, and each edge is replayed on a copy of the
// interpreter carried along the path
BfsOutcome lockstep_bfs(const Rig& r, LockstepRig& ls, hll::BlockResolver resolver,
                        const ShadowFn& shadows, bool expect_no_hazards) {
  const hll::HllModel& m = r.t.model;
  int dlf_stream = m.stream_id("PROP_DLF");
  REQUIRE(dlf_stream >= 0);

  struct Node {
    MachineOracle::State s;
    hll::Interp it;
    bool expect_dlf;
  };
  std::vector<MachineOracle::Params> pspace = ls.mo.param_space();
  REQUIRE(!pspace.empty());

  BfsOutcome out;
  std::set<MachineOracle::State> seen;
  std::queue<Node> q;
  q.push({ls.mo.initial(), hll::Interp(m, {}, resolver), true});
  seen.insert(ls.mo.initial());

  while (!q.empty()) {
    Node n = std::move(q.front());
    q.pop();
    out.states++;
    CHECK(ls.mo.failing_invariant(n.s) == std::nullopt);
    for (const auto& P : pspace) {
      hll::Interp it = n.it;  // fork the trace
      std::map<int, hll::Value> in = ls.inputs(P);
      if (shadows)
        for (auto& [k, v] : shadows(n.s, P)) in[k] = v;
      hll::StepResult sr = it.step(in);
      out.edges++;

      ls.check_state(it, n.s);
      MachineOracle::Step o = ls.mo.step(n.s, P);
      ls.check_schedule(it, o);
      CHECK(it.value(dlf_stream)[0] == (n.expect_dlf ? 1 : 0));
      CHECK_MESSAGE(sr.all_constraints(), "assumption violated at cycle " << sr.cycle);
      if (!sr.all_obligations()) {
        out.all_obligations = false;
        for (size_t i = 0; i < sr.obligations_ok.size(); i++)
          if (!sr.obligations_ok[i]) out.failed_obligations.insert(m.obligations[i].label);
      }
      if (expect_no_hazards) CHECK(sr.hazards.empty());

      bool any_guard = o.fired >= 0;
      for (bool g : o.guards) any_guard = any_guard || g;
      if (seen.insert(o.next).second) q.push({o.next, std::move(it), any_guard});
    }
  }
  CHECK(seen == ls.mo.reachable());
  return out;
}

// ------------------------------------------------------------ probe driver

// single-event machines: every parameter valuation is fed to a fresh
// interpreter for two cycles and compared against the oracle's guard
// decision, schedule, and post-state
struct ProbeStats {
  int total = 0, fired = 0;
};

ProbeStats probe_run(const Rig& r, std::map<std::string, oracle::ExtFn> ext = {},
                     hll::BlockResolver resolver = nullptr) {
  LockstepRig ls(r, std::move(ext));
  if (!resolver) resolver = hll::sampler_resolver(7);
  hll::Interp base(r.t.model, {}, resolver);
  MachineOracle::State s0 = ls.mo.initial();
  std::vector<MachineOracle::Params> pspace = ls.mo.param_space();
  ProbeStats st;
  REQUIRE(pspace.size() <= 20000);
  for (const auto& P : pspace) {
    hll::Interp it = base;
    std::map<int, hll::Value> in = ls.inputs(P);
    hll::StepResult r0 = it.step(in);
    CHECK(r0.all_constraints());
    ls.check_state(it, s0);
    MachineOracle::Step o = ls.mo.step(s0, P);
    ls.check_schedule(it, o);
    it.step(in);
    ls.check_state(it, o.next);
    st.total++;
    if (o.fired >= 0) st.fired++;
  }
  return st;
}

// a one-event machine around one guard (plus dummy state so the schedule
// has something to stutter)
std::string guard_probe_src(const std::string& params_and_typing, const std::string& guard) {
  return "machine probe sees pctx\n"
         "variables\n  dummy\n"
         "invariants\n  @inv1 dummy : BOOL\n"
         "events\n"
         "  initialisation\n  then\n    @act1 dummy := FALSE\n  end\n\n"
         "  event probe\n" +
         params_and_typing + "    @g " + guard +
         "\n  then\n    @act1 dummy := TRUE\n  end\nend\n";
}

static const char* kPctx = R"(
context pctx
sets
  COLOURS size 3
constants
  red : COLOURS
  yellow : COLOURS
  green : COLOURS
axioms
  @axm1 partition(COLOURS, {red}, {yellow}, {green})
end
)";

ProbeStats guard_probe(const std::string& params_and_typing, const std::string& guard) {
  auto r = make_rig({kPctx, guard_probe_src(params_and_typing, guard)}, "probe");
  return probe_run(*r);
}

// asserts the guard is neither unsatisfiable nor vacuous over the space
void check_guard(const std::string& params_and_typing, const std::string& guard) {
  INFO("probing guard `" << guard << "`");
  ProbeStats st = guard_probe(params_and_typing, guard);
  CHECK_MESSAGE(st.fired > 0, "guard `" << guard << "` never held");
  CHECK_MESSAGE(st.fired < st.total, "guard `" << guard << "` always held");
}

}  // namespace

// ------------------------------------------------------------ golden output

TEST_CASE("the refinement chain becomes a scheduled machine") {
  auto r = traffic_rig();
  CHECK(r->t.machine == "mac1");
  CHECK(r->t.ns_system == "mac1");
  CHECK(r->t.ns_contracts == "mac1_contracts");
  CHECK(r->t.ns_verification == "mac1_verif");
  CHECK(r->t.warnings.empty());
  CHECK(r->t.external_events.empty());
  REQUIRE(r->t.model.elaborated);

  auto files = r->t.files();
  REQUIRE(files.size() == 4);
  CHECK(files[0].first == "mac1.hll");
  const std::string& sys = files[0].second;

  CHECK_TEXT(sys, "int [0, 2] peds_colour;");
  CHECK_TEXT(sys, "bool cars_colours[3];");

  // guards in declaration order, selection by priority
  CHECK_TEXT(sys, "GRD_set_peds_green := cmd_green == true & ~cars_colours[green];");
  CHECK_TEXT(sys,
             "GRD_set_cars_colours := cmd_cars == true & (new_value_colours[green] -> "
             "peds_colour == red);");
  CHECK_TEXT(sys, "GRD_set_peds_red := true;");
  CHECK_TEXT(sys, "SEL_set_peds_green := GRD_set_peds_green;");
  CHECK_TEXT(sys, "SEL_set_cars_colours := GRD_set_cars_colours & ~GRD_set_peds_green;");
  CHECK_TEXT(sys,
             "SEL_set_peds_red := GRD_set_peds_red & ~GRD_set_peds_green & "
             "~GRD_set_cars_colours;");

  // state: initialisation plus a prioritised update chain with stutter
  CHECK_TEXT(sys, "I(peds_colour) := red;");
  CHECK_TEXT(sys,
             "X(peds_colour) := if SEL_set_peds_green then green else (if SEL_set_peds_red "
             "then fun_set_red(peds_colour) else peds_colour);");
  CHECK_TEXT(sys, "I(cars_colours[i]) := i == red;");
  CHECK_TEXT(sys,
             "X(cars_colours[i]) := if SEL_set_cars_colours then new_value_colours[i] else "
             "cars_colours[i];");
}

TEST_CASE("the context becomes constants, free inputs, and contracted blocks") {
  auto r = traffic_rig();
  const std::string con = r->t.files()[1].second;

  // enumerated carrier constants are pinned to their ordinals
  CHECK_TEXT(con, "int [0, 2] red := 0;");
  CHECK_TEXT(con, "int [0, 2] yellow := 1;");
  CHECK_TEXT(con, "int [0, 2] green := 2;");

  // event parameters become free inputs
  CHECK_TEXT(con, "bool cmd_green;");
  CHECK_TEXT(con, "bool cmd_cars;");
  CHECK_TEXT(con, "bool new_value_colours[3];");

  // the external function becomes a block whose axiom is a contract
  CHECK_TEXT(con, "fun_set_red : int [0, 2] -> int [0, 2];");
  CHECK_TEXT(con,
             "axiom_axm2: ALL inst : fun_set_red (inst.input_0 >= 0 & inst.input_0 <= 2 -> "
             "inst.output == red);");

  REQUIRE(r->t.params.size() == 3);
  CHECK(r->t.params[0].stream == "cmd_green");
  CHECK(r->t.params[0].event == "set_peds_green");
  CHECK(r->t.params[2].stream == "new_value_colours");
  CHECK(r->t.params[2].param == "new_value_colours");
}

TEST_CASE("refinement artifacts land in the verification namespace") {
  auto r = traffic_rig();
  const std::string ver = r->t.files()[2].second;

  // ancestor variables are free shadow streams related by the gluing invariants
  CHECK_TEXT(ver, "bool cars_go;");
  CHECK_TEXT(ver, "bool peds_go;");
  CHECK_TEXT(ver, "glue_mac1_glu1: peds_go == true <-> peds_colour == green;");
  CHECK_TEXT(ver, "glue_mac1_glu2: cars_go == true <-> cars_colours[green];");

  // the witnessed abstract parameter only exists while its event is selected
  CHECK_TEXT(ver, "bool mac0_set_cars_new_value;");
  CHECK_TEXT(ver,
             "wit_mac0_set_cars_new_value: SEL_set_cars_colours -> mac0_set_cars_new_value "
             "== new_value_colours[green];");

  // abstract safety and concrete typing become proof obligations
  CHECK_TEXT(ver, "safety_mac0_REQ2: ~(peds_go == true & cars_go == true);");
  CHECK_TEXT(ver, "typing_mac1_inv1: peds_colour == red # peds_colour == green;");
  CHECK_TEXT(ver,
             "wd_fit_peds_colour_set_peds_red_0: SEL_set_peds_red -> "
             "fun_set_red(peds_colour) >= 0 & fun_set_red(peds_colour) <= 2;");

  // deadlock-freeness reads the previous cycle's guards
  CHECK_TEXT(ver, "PROP_DLF := true, GRD_set_peds_green # GRD_set_cars_colours # GRD_set_peds_red;");
  CHECK_TEXT(ver, "dlf: PROP_DLF;");
}

TEST_CASE("the manifest records the schedule interface") {
  auto r = traffic_rig();
  const std::string& man = r->t.manifest;
  CHECK_TEXT(man, "machine: mac1");
  CHECK_TEXT(man, "int_width: 8");
  CHECK_TEXT(man, "overflow: obligation");
  CHECK_TEXT(man, "system: mac1");
  CHECK_TEXT(man, "contracts: mac1_contracts");
  CHECK_TEXT(man, "verification: mac1_verif");
  CHECK_TEXT(man, "guard: GRD_set_cars_colours");
  CHECK_TEXT(man, "select: SEL_set_cars_colours");
  CHECK_TEXT(man, "name: fun_set_red");
  CHECK_TEXT(man, "status: constrained");
  CHECK_TEXT(man, "kind: safety");
  CHECK_TEXT(man, "kind: typing");
  CHECK_TEXT(man, "kind: wd");
  CHECK_TEXT(man, "kind: dlf");
  CHECK_TEXT(man, "shadow: true");
}

TEST_CASE("translation output is deterministic") {
  auto a = traffic_rig();
  auto b = traffic_rig();
  CHECK(a->t.files() == b->t.files());
  CHECK(a->t.manifest == b->t.manifest);
}

// -------------------------------------------------------- lockstep walks

static hll::BlockResolver always_red() {
  return [](const hll::HllModel&, int, const std::vector<hll::Value>&, int) {
    return hll::Value{0};
  };
}

static std::map<std::string, oracle::ExtFn> traffic_ext() {
  return {{"fun_set_red", [](const Tuple&) -> i128 { return 0; }}};
}

TEST_CASE("interpreter and oracle agree across the whole traffic chain") {
  auto r = traffic_rig();
  LockstepRig ls(*r, traffic_ext());
  const hll::HllModel& m = r->t.model;

  int id_peds_go = m.stream_id("peds_go");
  int id_cars_go = m.stream_id("cars_go");
  int id_wit = m.stream_id("mac0_set_cars_new_value");
  REQUIRE(id_peds_go >= 0);
  REQUIRE(id_cars_go >= 0);
  REQUIRE(id_wit >= 0);

  // shadows are free inputs: feed the values the gluing invariants dictate
  ShadowFn shadows = [&](const MachineOracle::State& s, const MachineOracle::Params& p) {
    std::map<int, hll::Value> in;
    in[id_peds_go] = {s[0].scalar == 2 ? 1 : 0};
    in[id_cars_go] = {s[1].elems.count({2}) ? 1 : 0};
    auto nv = p.find({"set_cars_colours", "new_value_colours"});
    REQUIRE(nv != p.end());
    in[id_wit] = {nv->second.elems.count({2}) ? 1 : 0};
    return in;
  };

  BfsOutcome out = lockstep_bfs(*r, ls, always_red(), shadows, /*expect_no_hazards=*/true);
  CHECK(out.states > 4);
  CHECK(out.edges == out.states * 32);
  // with honest shadows every obligation holds on every reachable cycle
  CHECK_MESSAGE(out.all_obligations, *out.failed_obligations.begin());
  CHECK(!ls.mo.deadlock_reachable());
}

TEST_CASE("an unrefined machine runs without a verification harness") {
  auto r = make_rig({kCtx1, kMac0}, "mac0");
  LockstepRig ls(*r, {});
  BfsOutcome out = lockstep_bfs(*r, ls, always_red(), nullptr, true);
  // priority pins set_peds_go whenever the cars stay stopped: two states only
  CHECK(out.states == 2);
  CHECK(out.all_obligations);
}

TEST_CASE("a dropped guard falsifies the inherited safety obligation") {
  std::string bad = kMac1;
  size_t at = bad.find("    @grd2 green /: cars_colours\n");
  REQUIRE(at != std::string::npos);
  bad.erase(at, std::string("    @grd2 green /: cars_colours\n").size());

  auto r = make_rig({kCtx1, kMac0, bad}, "mac1");
  LockstepRig ls(*r, traffic_ext());
  const hll::HllModel& m = r->t.model;
  int id_peds_go = m.stream_id("peds_go");
  int id_cars_go = m.stream_id("cars_go");
  int id_wit = m.stream_id("mac0_set_cars_new_value");
  ShadowFn shadows = [&](const MachineOracle::State& s, const MachineOracle::Params& p) {
    std::map<int, hll::Value> in;
    in[id_peds_go] = {s[0].scalar == 2 ? 1 : 0};
    in[id_cars_go] = {s[1].elems.count({2}) ? 1 : 0};
    in[id_wit] = {p.at({"set_cars_colours", "new_value_colours"}).elems.count({2}) ? 1 : 0};
    return in;
  };
  BfsOutcome out = lockstep_bfs(*r, ls, always_red(), shadows, true);
  CHECK(!out.all_obligations);
  CHECK(out.failed_obligations.count("safety_mac0_REQ2"));
}

TEST_CASE("states stutter and deadlock-freeness trips when no guard holds") {
  const char* mac = R"(
machine pstut sees pctx
variables
  n
invariants
  @inv1 n : 0 .. 7
events
  initialisation
  then
    @act1 n := 0
  end

  event bump
  any cmd
  where
    @grd1 cmd : BOOL
    @grd2 cmd = TRUE
  then
    @act1 n := n + 1
  end
end
)";
  auto r = make_rig({kPctx, mac}, "pstut");
  const hll::HllModel& m = r->t.model;
  int id_n = m.stream_id("n");
  int id_cmd = m.stream_id("cmd");
  int dlf_idx = -1;
  for (size_t i = 0; i < m.obligations.size(); i++)
    if (m.obligations[i].label == "dlf") dlf_idx = (int)i;
  REQUIRE(id_n >= 0);
  REQUIRE(id_cmd >= 0);
  REQUIRE(dlf_idx >= 0);

  hll::Interp it(m, {}, hll::sampler_resolver(1));
  hll::StepResult r0 = it.step({{id_cmd, {0}}});
  CHECK(it.value(id_n)[0] == 0);
  CHECK(r0.obligations_ok[dlf_idx]);  // nothing before the first cycle

  hll::StepResult r1 = it.step({{id_cmd, {0}}});
  CHECK(it.value(id_n)[0] == 0);           // stutter
  CHECK(!r1.obligations_ok[dlf_idx]);      // previous cycle had no enabled event

  hll::StepResult r2 = it.step({{id_cmd, {1}}});
  CHECK(it.value(id_n)[0] == 0);
  CHECK(!r2.obligations_ok[dlf_idx]);

  hll::StepResult r3 = it.step({{id_cmd, {0}}});
  CHECK(it.value(id_n)[0] == 1);           // bump landed
  CHECK(r3.obligations_ok[dlf_idx]);

  MachineOracle mo(r->fm);
  CHECK(mo.deadlock_reachable());
}

// ------------------------------------------------- guard probes, per construct

TEST_CASE("guards: arithmetic and comparisons") {
  std::string xy = "  any x y\n  where\n    @t1 x : 0 .. 7\n    @t2 y : 0 .. 7\n";
  check_guard(xy, "x + 2 * y - 1 = 10");
  check_guard(xy, "x - y < y - x");
  check_guard(xy, "x / y > x mod y");   // division by zero falls back to 0
  check_guard(xy, "x ^ 2 <= 10");
  check_guard(xy, "-x = -2");
  check_guard(xy, "x <= y & (y <= 3 => x /= 2)");
  check_guard(xy, "x = y <=> x + y = 4");
}

TEST_CASE("guards: membership and set algebra") {
  std::string sets =
      "  any S T x\n  where\n    @t1 S <: 0 .. 2\n    @t2 T <: 0 .. 2\n    @t3 x : 0 .. 2\n";
  check_guard(sets, "x : S");
  check_guard(sets, "x /: S \\/ T");
  check_guard(sets, "x : S /\\ T");
  check_guard(sets, "x : S \\ T");
  check_guard(sets, "S <: T");
  check_guard(sets, "S <<: T");
  check_guard(sets, "S = T");
  check_guard(sets, "S /= {}");
  check_guard(sets, "x : {0, 2}");
  check_guard(sets, "S : POW(T)");
  check_guard(sets, "S : POW1(T)");
  check_guard(sets, "partition(0 .. 2, S, T)");
  check_guard(sets, "x : {z . z : 0 .. 2 & z /= 1 | z}");
  check_guard(sets, "x : {z . z : 0 .. 1 | z + 1}");
  check_guard(sets, "x : union({S, T})");
  check_guard(sets, "x : inter({S, T})");
  check_guard(sets, "x : union({z . z : 0 .. 1 | {z * 2}})");
  check_guard(sets, "x : (UNION z . z : 1 .. 2 | z .. z)");
  check_guard(sets, "x : (INTER z . z : 0 .. 1 | 0 .. z + 1)");
  check_guard(sets, "card(S) = 2");
  check_guard(sets, "min(S) = x");
  check_guard(sets, "max(S) > min(S)");
  check_guard(sets, "S /= {} & (#m . m : 0 .. 2 & m : S)");
  check_guard(sets, "!m . m : 0 .. 2 => (m : S => m : T)");
  check_guard(sets, "finite(S) & S /= T");
}

TEST_CASE("guards: carriers and enumerated constants") {
  std::string cs = "  any c S\n  where\n    @t1 c : COLOURS\n    @t2 S <: COLOURS\n";
  check_guard(cs, "c = red or c = green");
  check_guard(cs, "c : S");
  check_guard(cs, "red : S & yellow /: S");
  check_guard(cs, "S = {red, green}");
  check_guard(cs, "c : COLOURS \\ {yellow}");
}

TEST_CASE("guards: pairs and relations") {
  std::string rel =
      "  any r x y\n  where\n    @t1 r <: (0 .. 1) ** (0 .. 2)\n    @t2 x : 0 .. 1\n"
      "    @t3 y : 0 .. 2\n";
  check_guard(rel, "x |-> y : r");
  check_guard(rel, "x : dom(r)");
  check_guard(rel, "y : ran(r)");
  check_guard(rel, "x |-> y : (0 .. 1) ** (1 .. 2)");
  check_guard(rel, "x |-> y = 1 |-> 2");
  check_guard(rel, "dom(r) = 0 .. 1");
  check_guard(rel, "r /= {} & r <: {0 |-> 0, 1 |-> 2}");

  std::string sq = "  any r\n  where\n    @t1 r <: (0 .. 1) ** (0 .. 1)\n";
  // plain <-> over the exact typed space holds for every valuation
  CHECK(guard_probe(sq, "r : 0 .. 1 <-> 0 .. 1").fired == 16);
  check_guard(sq, "r : 0 .. 1 <-> 1 .. 1");
  check_guard(sq, "r : 0 .. 1 <<-> 0 .. 1");
  check_guard(sq, "r : 0 .. 1 <->> 0 .. 1");
  check_guard(sq, "r : 0 .. 1 <<->> 0 .. 1");
  check_guard(sq, "r : 0 .. 1 +-> 0 .. 1");
  check_guard(sq, "r : 0 .. 1 --> 0 .. 1");
  check_guard(sq, "r : 0 .. 1 >+> 0 .. 1");
  check_guard(sq, "r : 0 .. 1 >-> 0 .. 1");
  check_guard(sq, "r : 0 .. 1 +->> 0 .. 1");
  check_guard(sq, "r : 0 .. 1 -->> 0 .. 1");
  check_guard(sq, "r : 0 .. 1 >->> 0 .. 1");
}

TEST_CASE("guards: function application selects the least image") {
  std::string fn =
      "  any f x y\n  where\n    @t1 f <: (0 .. 1) ** (0 .. 2)\n    @t2 x : 0 .. 1\n"
      "    @t3 y : 0 .. 2\n";
  check_guard(fn, "f : 0 .. 1 +-> 0 .. 2 & x : dom(f) & f(x) = y");
  check_guard(fn, "f(x) = y");  // unguarded: both sides fall back over non-functions
}

// ------------------------------------------------- value probes, per construct

static ProbeStats value_probe(const std::string& mac) {
  auto r = make_rig({kPctx, mac}, "probe");
  return probe_run(*r);
}

TEST_CASE("updates: arithmetic lands exactly") {
  ProbeStats st = value_probe(R"(
machine probe sees pctx
variables
  obs
invariants
  @inv1 obs : -10 .. 31
events
  initialisation
  then
    @act1 obs := 0
  end

  event probe
  any x y
  where
    @t1 x : 0 .. 7
    @t2 y : 0 .. 7
  then
    @act1 obs := x + y * 2 - 1
  end
end
)");
  CHECK(st.fired == st.total);  // no guard beyond typing
}

TEST_CASE("updates: division, modulo, exponent defaults") {
  value_probe(R"(
machine probe sees pctx
variables
  q
  m
  e
invariants
  @inv1 q : 0 .. 7
  @inv2 m : 0 .. 7
  @inv3 e : 0 .. 63
events
  initialisation
  then
    @act1 q := 0
    @act2 m := 0
    @act3 e := 0
  end

  event probe
  any x y
  where
    @t1 x : 0 .. 7
    @t2 y : 0 .. 3
  then
    @act1 q := x / y
    @act2 m := x mod y
    @act3 e := x ^ 2
  end
end
)");
}

TEST_CASE("updates: reductions over stored sets") {
  value_probe(R"(
machine probe sees pctx
variables
  lo
  hi
  k
invariants
  @inv1 lo : 0 .. 7
  @inv2 hi : 0 .. 7
  @inv3 k : 0 .. 7
events
  initialisation
  then
    @act1 lo := 0
    @act2 hi := 0
    @act3 k := 0
  end

  event probe
  any S
  where
    @t1 S <: 0 .. 2
  then
    @act1 lo := min(S)
    @act2 hi := max(S)
    @act3 k := card(S)
  end
end
)");
}

TEST_CASE("updates: set-valued state assignments") {
  value_probe(R"(
machine probe sees pctx
variables
  OS
invariants
  @inv1 OS <: 0 .. 2
events
  initialisation
  then
    @act1 OS := {}
  end

  event probe
  any S T
  where
    @t1 S <: 0 .. 2
    @t2 T <: 0 .. 2
  then
    @act1 OS := (S \/ T) \ (S /\ T)
  end
end
)");
  value_probe(R"(
machine probe sees pctx
variables
  OS
invariants
  @inv1 OS <: 0 .. 2
events
  initialisation
  then
    @act1 OS := 0 .. 2
  end

  event probe
  any S x
  where
    @t1 S <: 0 .. 2
    @t2 x : 0 .. 2
  then
    @act1 OS := {z . z : 0 .. 2 & z : S & z /= x | z}
  end
end
)");
}

TEST_CASE("updates: relation-valued state assignments") {
  value_probe(R"(
machine probe sees pctx
variables
  R
invariants
  @inv1 R <: (0 .. 1) ** (0 .. 1)
events
  initialisation
  then
    @act1 R := {}
  end

  event probe
  any S T x y
  where
    @t1 S <: 0 .. 1
    @t2 T <: 0 .. 1
    @t3 x : 0 .. 1
    @t4 y : 0 .. 1
  then
    @act1 R := (S ** T) \/ {x |-> y}
  end
end
)");
}

TEST_CASE("updates: data-function application picks the least image") {
  value_probe(R"(
machine probe sees pctx
variables
  obs
invariants
  @inv1 obs : 0 .. 2
events
  initialisation
  then
    @act1 obs := 0
  end

  event probe
  any f x
  where
    @t1 f <: (0 .. 1) ** (0 .. 2)
    @t2 x : 0 .. 1
  then
    @act1 obs := f(x)
  end
end
)");
}

TEST_CASE("updates: carrier-valued state and booleans from predicates") {
  value_probe(R"(
machine probe sees pctx
variables
  col
  b
invariants
  @inv1 col : COLOURS
  @inv2 b : BOOL
events
  initialisation
  then
    @act1 col := red
    @act2 b := FALSE
  end

  event probe
  any c S
  where
    @t1 c : COLOURS
    @t2 S <: COLOURS
  then
    @act1 col := c
    @act2 b := bool(c : S & c /= yellow)
  end
end
)");
}

TEST_CASE("updates: open integer types run in the storage window") {
  value_probe(R"(
machine probe sees pctx
variables
  n
  m
invariants
  @inv1 n : NAT
  @inv2 m : INT
events
  initialisation
  then
    @act1 n := 0
    @act2 m := 0
  end

  event probe
  any x
  where
    @t1 x : 0 .. 3
  then
    @act1 n := n + x
    @act2 m := m - x
  end
end
)");
}

TEST_CASE("updates: external function calls against a contract") {
  const char* ctx = R"(
context pctx
sets
  COLOURS size 3
constants
  red : COLOURS
  yellow : COLOURS
  green : COLOURS
external
  fun_inc : 0 .. 6 --> 0 .. 7
axioms
  @axm1 partition(COLOURS, {red}, {yellow}, {green})
  @axm2 !z . z : 0 .. 6 => fun_inc(z) = z + 1
end
)";
  const char* mac = R"(
machine probe sees pctx
variables
  obs
invariants
  @inv1 obs : 0 .. 7
events
  initialisation
  then
    @act1 obs := 0
  end

  event probe
  any x
  where
    @t1 x : 0 .. 6
  then
    @act1 obs := fun_inc(x)
  end
end
)";
  auto r = make_rig({ctx, mac}, "probe");
  CHECK_TEXT(r->t.files()[1].second,
             "axiom_axm2: ALL inst : fun_inc (inst.input_0 >= 0 & inst.input_0 <= 6 -> "
             "inst.output == inst.input_0 + 1);");
  std::map<std::string, oracle::ExtFn> ext{
      {"fun_inc", [](const Tuple& a) -> i128 { return a[0] + 1; }}};
  hll::BlockResolver res = [](const hll::HllModel&, int, const std::vector<hll::Value>& a,
                              int) { return hll::Value{a[0][0] + 1}; };
  ProbeStats st = probe_run(*r, ext, res);
  CHECK(st.fired == st.total);
}

// ------------------------------------------------------------ error paths

TEST_CASE("translation rejects ill-formed machines") {
  auto xl = [](std::vector<std::string> srcs) {
    return thrown([srcs = std::move(srcs)] { make_rig(srcs, "probe"); });
  };

  CHECK(contains(xl({kPctx, R"(
machine probe sees pctx
variables
  n
invariants
  @inv1 n : 0 .. 3
events
  initialisation
  then
    @act1 n := 0
  end

  event probe
  then
    @act1 n := 1
    @act2 n := 2
  end
end
)"}),
                 "assigned twice"));

  CHECK(contains(xl({kPctx, R"(
machine probe sees pctx
variables
  n
  m
invariants
  @inv1 n : 0 .. 3
  @inv2 m : 0 .. 3
events
  initialisation
  then
    @act1 n := 0
  end

  event probe
  then
    @act1 n := 1
  end
end
)"}),
                 "does not assign"));

  CHECK(contains(xl({kPctx, R"(
machine probe sees pctx
variables
  n
invariants
  @inv1 n : 0 .. 3
events
  initialisation
  then
    @act1 n := 7
  end

  event probe
  then
    @act1 n := 1
  end
end
)"}),
                 "outside the range"));

  // pair-valued scalar state has no stream layout
  CHECK(contains(xl({kPctx, R"(
machine probe sees pctx
variables
  p
invariants
  @inv1 p : (0 .. 1) ** (0 .. 1)
events
  initialisation
  then
    @act1 p := 0 |-> 0
  end

  event probe
  then
    @act1 p := 1 |-> 1
  end
end
)"}),
                 "pair"));

  // population counting only works on stored characteristic arrays
  CHECK(contains(xl({kPctx, R"(
machine probe sees pctx
variables
  n
invariants
  @inv1 n : 0 .. 7
events
  initialisation
  then
    @act1 n := 0
  end

  event probe
  any S T
  where
    @t1 S <: 0 .. 2
    @t2 T <: 0 .. 2
  then
    @act1 n := card(S \/ T)
  end
end
)"}),
                 "card"));

  // a generalized union needs a denotable family
  CHECK(contains(xl({kPctx, R"(
machine probe sees pctx
variables
  n
invariants
  @inv1 n : 0 .. 2
events
  initialisation
  then
    @act1 n := 0
  end

  event probe
  any x
  where
    @t1 x : 0 .. 2
    @g x : union({{x}} \/ {{0}})
  then
    @act1 n := x
  end
end
)"}),
                 "union"));
}

TEST_CASE("external function axioms must quantify the call shape") {
  auto bad_ctx = [](const std::string& axm) {
    return std::string(R"(
context pctx
sets
  COLOURS size 3
constants
  red : COLOURS
  yellow : COLOURS
  green : COLOURS
external
  f : 0 .. 3 --> 0 .. 3
axioms
  @axm1 partition(COLOURS, {red}, {yellow}, {green})
  @axm2 )") + axm + "\nend\n";
  };
  const char* mac = R"(
machine probe sees pctx
variables
  n
invariants
  @inv1 n : 0 .. 3
events
  initialisation
  then
    @act1 n := 0
  end

  event probe
  any x
  where
    @t1 x : 0 .. 3
  then
    @act1 n := f(x)
  end
end
)";
  auto xl = [&](const std::string& axm) {
    return thrown([&] { make_rig({bad_ctx(axm), mac}, "probe"); });
  };
  // applied to a constant, not the binder
  CHECK(xl("!z . z : 0 .. 3 => f(0) <= 3") != "");
  // not universally quantified
  CHECK(xl("f(0) = 0") != "");
}
