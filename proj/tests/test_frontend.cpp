#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebv/eb_flatten.hpp"
#include "ebv/eb_lexer.hpp"
#include "ebv/eb_parser.hpp"
#include "ebv/eb_typecheck.hpp"

using namespace ebv;
using namespace ebv::eb;

// ------------------------------------------------------------ shared sources

static const char* kCtx1 = R"(
context ctx1
sets COLOURS size 3
constants
  red : COLOURS
  yellow : COLOURS
  green : COLOURS
  external fun_set_red : COLOURS --> COLOURS
axioms
  @axm1 partition(COLOURS, {red}, {yellow}, {green})
  @axm2 !c . c : COLOURS => fun_set_red(c) = red
end
)";

static const char* kMac0 = R"(
machine mac0 sees ctx1
variables peds_go cars_go
invariants
  @inv1 peds_go : BOOL
  @inv2 cars_go : BOOL
  @REQ2 not(peds_go = TRUE & cars_go = TRUE)
events
  initialisation then
    @act1 peds_go := FALSE
    @act2 cars_go := FALSE
  end
  event set_peds_go where
    @grd1 cars_go = FALSE
  then
    @act1 peds_go := TRUE
  end
  event set_cars any new_value where
    @grd1 new_value : BOOL
    @grd2 new_value = TRUE => peds_go = FALSE
  then
    @act1 cars_go := new_value
  end
  event set_peds_stop then
    @act1 peds_go := FALSE
  end
end
)";

static const char* kMac1 = R"(
machine mac1 refines mac0 sees ctx1
variables peds_colour cars_colours
invariants
  @inv1 peds_colour : {red, green}
  @inv2 cars_colours <: COLOURS
  @glu1 peds_go = TRUE <=> peds_colour = green
  @glu2 cars_go = TRUE <=> green : cars_colours
events
  initialisation then
    @act1 peds_colour := red
    @act2 cars_colours := {red}
  end
  event set_peds_green refines set_peds_go any cmd_green where
    @grd0 cmd_green : BOOL
    @grd1 cmd_green = TRUE
    @grd2 green /: cars_colours
  then
    @act1 peds_colour := green
  end
  event set_cars_colours refines set_cars any cmd_cars new_value_colours where
    @grd0 cmd_cars : BOOL
    @grd1 new_value_colours <: COLOURS
    @grd2 cmd_cars = TRUE
    @grd3 green : new_value_colours => peds_colour = red
  with
    @new_value new_value = bool(green : new_value_colours)
  then
    @act1 cars_colours := new_value_colours
  end
  event set_peds_red refines set_peds_stop then
    @act1 peds_colour := fun_set_red(peds_colour)
  end
end
)";

static EbModel traffic_model() {
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(kCtx1, "ctx1.ebc"));
  units.push_back(parse_source(kMac0, "mac0.ebm"));
  units.push_back(parse_source(kMac1, "mac1.ebm"));
  return resolve_and_typecheck(std::move(units));
}

// ------------------------------------------------------------ lexer

TEST_CASE("ascii and unicode operator spellings lex identically") {
  auto a = lex_eb("x : S & y /: T => z <: U", "a");
  auto u = lex_eb("x \xe2\x88\x88 S \xe2\x88\xa7 y \xe2\x88\x89 T \xe2\x87\x92 z \xe2\x8a\x86 U", "u");
  REQUIRE(a.size() == u.size());
  for (size_t i = 0; i < a.size(); i++) CHECK(a[i].kind == u[i].kind);
}

TEST_CASE("digraphs take the longest match") {
  auto t = lex_eb("a <<->> b <-> c >->> d -->> e", "x");
  REQUIRE(t.size() == 10);  // 5 idents + 4 ops + End
  CHECK(t[1].kind == Tok::RelTotalSurj);
  CHECK(t[3].kind == Tok::RelAll);
  CHECK(t[5].kind == Tok::Bij);
  CHECK(t[7].kind == Tok::Tsur);
}

TEST_CASE("labels, comments and positions") {
  auto t = lex_eb("// leading comment\n@grd1 x = 1 // trailing\n", "f.ebm");
  REQUIRE(t.size() == 5);
  CHECK(t[0].kind == Tok::Label);
  CHECK(t[0].text == "grd1");
  CHECK(t[0].pos.line == 2);
  CHECK(t[0].pos.col == 1);
  CHECK(t[1].pos.col == 7);
  CHECK(t[3].ival == 1);
}

TEST_CASE("unicode columns count codepoints") {
  auto t = lex_eb("\xe2\x88\x80x \xc2\xb7 x \xe2\x88\x88 S", "u");
  // ∀ x · x ∈ S  — the ∈ sits at column 8
  REQUIRE(t.size() >= 5);
  CHECK(t[4].kind == Tok::In);
  CHECK(t[4].pos.col == 8);
}

// ------------------------------------------------------------ parser

TEST_CASE("conjunction binds tighter than disjunction and implication") {
  EExprPtr e = parse_eb_expr("a = 1 or b = 2 & c = 3 => d = 4");
  REQUIRE(e->k == EK::Imp);
  REQUIRE(e->kids[0]->k == EK::Or);
  CHECK(e->kids[0]->kids[1]->k == EK::And);
}

TEST_CASE("implication is right-associative, equivalence binds loosest") {
  EExprPtr e = parse_eb_expr("a = 1 => b = 2 => c = 3 <=> d = 4");
  REQUIRE(e->k == EK::Eqv);
  REQUIRE(e->kids[0]->k == EK::Imp);
  CHECK(e->kids[0]->kids[1]->k == EK::Imp);
}

TEST_CASE("arithmetic precedence and unary minus") {
  EExprPtr e = parse_eb_expr("-a + b * c - d mod e");
  REQUIRE(e->k == EK::Sub);
  REQUIRE(e->kids[0]->k == EK::Add);
  CHECK(e->kids[0]->kids[0]->k == EK::Neg);
  CHECK(e->kids[0]->kids[1]->k == EK::Mul);
  CHECK(e->kids[1]->k == EK::Mod);
}

TEST_CASE("non-associative operators demand parentheses") {
  CHECK_THROWS_WITH_AS(parse_eb_expr("1 .. 2 .. 3"),
                       doctest::Contains("non-associative"), CompileError);
  CHECK_THROWS_WITH_AS(parse_eb_expr("a < b < c"),
                       doctest::Contains("non-associative"), CompileError);
  CHECK_THROWS_AS(parse_eb_expr("A <-> B <-> C"), CompileError);
}

TEST_CASE("set literal vs comprehension") {
  EExprPtr lit = parse_eb_expr("{a, b, c}");
  CHECK(lit->k == EK::SetLit);
  CHECK(lit->kids.size() == 3);
  EExprPtr comp = parse_eb_expr("{x . x : 1 .. 9 & x < 5 | x * 2}");
  REQUIRE(comp->k == EK::SetComp);
  CHECK(comp->binders == std::vector<std::string>{"x"});
  REQUIRE(comp->kids.size() == 2);
  CHECK(comp->kids[1]->k == EK::Mul);
}

TEST_CASE("builtins parse as dedicated nodes") {
  CHECK(parse_eb_expr("card(S)")->k == EK::Card);
  CHECK(parse_eb_expr("min(S)")->k == EK::MinOp);
  CHECK(parse_eb_expr("bool(x = 1)")->k == EK::BoolOf);
  CHECK(parse_eb_expr("partition(S, {a}, {b})")->k == EK::Partition);
  CHECK(parse_eb_expr("POW(S)")->k == EK::PowOp);
  EExprPtr app = parse_eb_expr("f(x, y)");
  REQUIRE(app->k == EK::App);
  CHECK(app->kids.size() == 3);
}

TEST_CASE("machine parse shape") {
  ParsedUnit u = parse_source(kMac1, "mac1.ebm");
  REQUIRE(std::holds_alternative<EbMachine>(u));
  const EbMachine& m = std::get<EbMachine>(u);
  CHECK(m.name == "mac1");
  REQUIRE(m.refines.has_value());
  CHECK(*m.refines == "mac0");
  CHECK(m.sees == std::vector<std::string>{"ctx1"});
  CHECK(m.variables.size() == 2);
  CHECK(m.invariants.size() == 4);
  REQUIRE(m.events.size() == 3);
  CHECK(m.events[0].name == "set_peds_green");
  CHECK(m.events[1].params == std::vector<std::string>{"cmd_cars", "new_value_colours"});
  REQUIRE(m.events[1].witnesses.size() == 1);
  CHECK(m.events[1].witnesses[0].label == "new_value");
  CHECK(m.init.actions.size() == 2);
}

TEST_CASE("context parse shape") {
  ParsedUnit u = parse_source(kCtx1, "ctx1.ebc");
  REQUIRE(std::holds_alternative<EbContext>(u));
  const EbContext& c = std::get<EbContext>(u);
  REQUIRE(c.sets.size() == 1);
  CHECK(c.sets[0].name == "COLOURS");
  CHECK(c.sets[0].size == 3);
  REQUIRE(c.constants.size() == 4);
  CHECK(c.constants[3].external);
  CHECK(c.axioms.size() == 2);
}

TEST_CASE("nondeterministic assignment is rejected with guidance") {
  const char* src = R"(
machine m
variables x
invariants @inv1 x : BOOL
events
  initialisation then @a1 x := FALSE end
  event e then @a1 x :: BOOL end
end
)";
  CHECK_THROWS_WITH_AS(parse_source(src, "m.ebm"),
                       doctest::Contains("event parameter"), CompileError);
}

TEST_CASE("missing initialisation is an error") {
  const char* src = R"(
machine m
variables x
invariants @inv1 x : BOOL
events
  event e then @a1 x := TRUE end
end
)";
  CHECK_THROWS_WITH_AS(parse_source(src, "m.ebm"),
                       doctest::Contains("initialisation"), CompileError);
}

// ------------------------------------------------------------ typechecking

TEST_CASE("traffic chain typechecks with classified invariants") {
  EbModel model = traffic_model();
  REQUIRE(model.machines.size() == 2);
  CHECK(model.machines[0].name == "mac0");  // abstract first
  const EbMachine& m0 = model.machines[0];
  CHECK(m0.invariants[0].kind == InvKind::Typing);
  CHECK(m0.invariants[1].kind == InvKind::Typing);
  CHECK(m0.invariants[2].kind == InvKind::Safety);
  const EbMachine& m1 = model.machines[1];
  CHECK(m1.invariants[0].kind == InvKind::Typing);
  CHECK(m1.invariants[1].kind == InvKind::Typing);
  CHECK(m1.invariants[2].kind == InvKind::Gluing);
  CHECK(m1.invariants[3].kind == InvKind::Gluing);

  // variable types
  REQUIRE(m1.variables[0].type);
  CHECK(m1.variables[0].type->kind == EType::Carrier);
  CHECK(m1.variables[1].type->kind == EType::Pow);
  CHECK(m0.variables[0].type->kind == EType::Bool);

  // parameter typing guards are flagged
  const EbEvent& sc = m1.events[1];
  CHECK(sc.guards[0].is_typing);
  CHECK(sc.guards[1].is_typing);
  CHECK_FALSE(sc.guards[2].is_typing);
  CHECK_FALSE(sc.guards[3].is_typing);
  REQUIRE(sc.param_types.size() == 2);
  CHECK(sc.param_types[0]->kind == EType::Bool);
  CHECK(sc.param_types[1]->kind == EType::Pow);
}

TEST_CASE("external function signature is enforced") {
  EbModel model = traffic_model();
  const EbContext* c = model.find_context("ctx1");
  REQUIRE(c);
  const EbConstant& f = c->constants[3];
  REQUIRE(f.sig_args.size() == 1);
  CHECK(f.sig_args[0]->kind == EType::Carrier);
  CHECK(f.sig_ret->kind == EType::Carrier);

  std::vector<ParsedUnit> units;
  units.push_back(parse_source(kCtx1, "ctx1.ebc"));
  units.push_back(parse_source(R"(
machine bad sees ctx1
variables v
invariants @inv1 v : COLOURS
events
  initialisation then @a1 v := red end
  event e then @a1 v := fun_set_red(v, v) end
end
)", "bad.ebm"));
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("expects 1 argument"), CompileError);
}

TEST_CASE("variables demand a typing invariant") {
  const char* src = R"(
machine m
variables x
invariants @inv1 x = 3
events
  initialisation then @a1 x := 0 end
end
)";
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(src, "m.ebm"));
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("typing invariant"), CompileError);
}

TEST_CASE("parameters demand a typing guard") {
  const char* src = R"(
machine m
variables x
invariants @inv1 x : 0 .. 7
events
  initialisation then @a1 x := 0 end
  event e any p where @grd1 p < 3 then @a1 x := 1 end
end
)";
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(src, "m.ebm"));
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("typing guard"), CompileError);
}

TEST_CASE("duplicate labels are rejected") {
  const char* src = R"(
machine m
variables x
invariants
  @inv1 x : BOOL
  @inv1 x = TRUE
events
  initialisation then @a1 x := FALSE end
end
)";
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(src, "m.ebm"));
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("duplicate label"), CompileError);
}

TEST_CASE("initialisation must assign every variable with ground values") {
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(R"(
machine m
variables x y
invariants
  @inv1 x : BOOL
  @inv2 y : BOOL
events
  initialisation then @a1 x := FALSE end
end
)", "m.ebm"));
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("does not assign"), CompileError);

  units.clear();
  units.push_back(parse_source(R"(
machine m
variables x y
invariants
  @inv1 x : BOOL
  @inv2 y : BOOL
events
  initialisation then
    @a1 x := FALSE
    @a2 y := x
  end
end
)", "m.ebm"));
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("ground"), CompileError);
}

TEST_CASE("quantifiers require a leading typing guard") {
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(R"(
context c
constants k : 0 .. 9
axioms @axm1 !x . x < k
end
)", "c.ebc"));
  // not even implication-shaped
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("must have the form"), CompileError);

  units.clear();
  units.push_back(parse_source(R"(
context c
constants k : 0 .. 9
axioms @axm1 !x . x = 1 => x < k
end
)", "c.ebc"));
  // implication-shaped but the guard does not type the binder
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("typing guard"), CompileError);
}

TEST_CASE("type errors carry positions and readable types") {
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(R"(
machine m
variables x
invariants @inv1 x : 0 .. 7
events
  initialisation then @a1 x := 0 end
  event e then @a1 x := TRUE end
end
)", "m.ebm"));
  try {
    resolve_and_typecheck(std::move(units));
    FAIL("expected a type error");
  } catch (const CompileError& e) {
    std::string msg = e.what();
    CHECK(msg.find("m.ebm:") == 0);
    CHECK(msg.find("mismatch") != std::string::npos);
  }
}

TEST_CASE("witness must name an abstract parameter") {
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(kCtx1, "ctx1.ebc"));
  units.push_back(parse_source(kMac0, "mac0.ebm"));
  units.push_back(parse_source(R"(
machine m1 refines mac0 sees ctx1
variables peds_go cars_go
invariants
  @inv1 peds_go : BOOL
  @inv2 cars_go : BOOL
events
  initialisation then
    @a1 peds_go := FALSE
    @a2 cars_go := FALSE
  end
  event e refines set_cars any v where @grd1 v : BOOL
  with @nosuch nosuch = TRUE
  then @a1 cars_go := v end
end
)", "m1.ebm"));
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("not a parameter"), CompileError);
}

TEST_CASE("unwitnessed abstract parameter is an error") {
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(kCtx1, "ctx1.ebc"));
  units.push_back(parse_source(kMac0, "mac0.ebm"));
  units.push_back(parse_source(R"(
machine m1 refines mac0 sees ctx1
variables peds_go cars_go
invariants
  @inv1 peds_go : BOOL
  @inv2 cars_go : BOOL
events
  initialisation then
    @a1 peds_go := FALSE
    @a2 cars_go := FALSE
  end
  event e refines set_cars then @a1 cars_go := TRUE end
end
)", "m1.ebm"));
  CHECK_THROWS_WITH_AS(resolve_and_typecheck(std::move(units)),
                       doctest::Contains("witness"), CompileError);
}

// ------------------------------------------------------------ helpers

TEST_CASE("constant folding covers linear arithmetic") {
  auto v = fold_const_int(parse_eb_expr("2 + 3 * 4"));
  REQUIRE(v.has_value());
  CHECK((long long)*v == 14);
  CHECK(fold_const_int(parse_eb_expr("- (5 - 9)")).value() == 4);
  CHECK_FALSE(fold_const_int(parse_eb_expr("x + 1")).has_value());
}

TEST_CASE("groundness follows resolved references") {
  EbModel model = traffic_model();
  const EbMachine& m1 = model.machines[1];
  // init RHS are ground, guard over a variable is not
  CHECK(is_ground(m1.init.actions[0].rhs));
  CHECK_FALSE(is_ground(m1.events[0].guards[2].pred));
}

// ------------------------------------------------------------ flattening

TEST_CASE("traffic chain flattens to concrete state plus shadows") {
  EbModel model = traffic_model();
  FlatMachine fm = flatten(model, "mac1");

  CHECK(fm.name == "mac1");
  REQUIRE(fm.variables.size() == 4);
  CHECK(fm.variables[0].name == "peds_colour");
  CHECK(fm.variables[0].concrete);
  CHECK(fm.variables[1].name == "cars_colours");
  CHECK_FALSE(fm.variables[2].concrete);
  CHECK_FALSE(fm.variables[3].concrete);

  REQUIRE(fm.invariants.size() == 7);
  CHECK(fm.invariants[0].label == "mac0_inv1");
  CHECK(fm.invariants[2].label == "mac0_REQ2");
  CHECK(fm.invariants[2].kind == InvKind::Safety);
  CHECK(fm.invariants[5].kind == InvKind::Gluing);

  REQUIRE(fm.events.size() == 3);
  REQUIRE(fm.chains.size() == 3);
  for (auto& ch : fm.chains) CHECK(ch.levels.size() == 2);

  REQUIRE(fm.abs_params.size() == 1);
  CHECK(fm.abs_params[0].name == "mac0_set_cars_new_value");
  CHECK(fm.abs_params[0].event == "set_cars_colours");
  CHECK(fm.abs_params[0].type->kind == EType::Bool);
  CHECK(fm.abs_params[0].level == 0);

  CHECK(fm.sets.size() == 1);
  CHECK(fm.constants.size() == 4);
  CHECK(fm.axioms.size() == 2);
}

TEST_CASE("flattening a single machine yields no shadows") {
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(kCtx1, "ctx1.ebc"));
  units.push_back(parse_source(kMac0, "mac0.ebm"));
  EbModel model = resolve_and_typecheck(std::move(units));
  FlatMachine fm = flatten(model, "mac0");
  CHECK(fm.variables.size() == 2);
  CHECK(fm.abs_params.empty());
  for (auto& ch : fm.chains) CHECK(ch.levels.size() == 1);
}

TEST_CASE("three-level chain with a persisting variable") {
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(R"(
machine chain0
variables x
invariants @inv1 x : 0 .. 3
events
  initialisation then @a1 x := 0 end
  event step any p where @grd1 p : 0 .. 3 then @a1 x := p end
end
)", "chain0.ebm"));
  units.push_back(parse_source(R"(
machine chain1 refines chain0
variables x y
invariants
  @inv1 x : 0 .. 3
  @inv2 y : 0 .. 3
  @glu1 y = x
events
  initialisation then
    @a1 x := 0
    @a2 y := 0
  end
  event step refines step any p where @grd1 p : 0 .. 3 then
    @a1 x := p
    @a2 y := p
  end
end
)", "chain1.ebm"));
  units.push_back(parse_source(R"(
machine chain2 refines chain1
variables x z
invariants
  @inv1 x : 0 .. 3
  @inv2 z : 0 .. 3
  @glu1 z = y
events
  initialisation then
    @a1 x := 0
    @a2 z := 0
  end
  event step refines step any q where @grd1 q : 0 .. 3
  with @p p = q
  then
    @a1 x := q
    @a2 z := q
  end
end
)", "chain2.ebm"));
  EbModel model = resolve_and_typecheck(std::move(units));
  FlatMachine fm = flatten(model, "chain2");

  // x persists, y is shadowed, z is new
  REQUIRE(fm.variables.size() == 3);
  CHECK(fm.variables[0].name == "x");
  CHECK(fm.variables[0].concrete);
  CHECK(fm.variables[1].name == "z");
  CHECK(fm.variables[2].name == "y");
  CHECK_FALSE(fm.variables[2].concrete);

  REQUIRE(fm.chains.size() == 1);
  CHECK(fm.chains[0].levels.size() == 3);

  // chain1's p is witnessed at the chain2 level; chain0's p is retained by chain1
  REQUIRE(fm.abs_params.size() == 1);
  CHECK(fm.abs_params[0].name == "chain1_step_p");
  CHECK(fm.abs_params[0].level == 1);
}

TEST_CASE("dropped variables may not reappear") {
  std::vector<ParsedUnit> units;
  units.push_back(parse_source(R"(
machine a0
variables x
invariants @inv1 x : BOOL
events
  initialisation then @a1 x := FALSE end
end
)", "a0.ebm"));
  units.push_back(parse_source(R"(
machine a1 refines a0
variables w
invariants
  @inv1 w : BOOL
  @glu1 w = x
events
  initialisation then @a1 w := FALSE end
end
)", "a1.ebm"));
  units.push_back(parse_source(R"(
machine a2 refines a1
variables x
invariants
  @inv1 x : BOOL
  @glu1 x = w
events
  initialisation then @a1 x := FALSE end
end
)", "a2.ebm"));
  EbModel model = resolve_and_typecheck(std::move(units));
  CHECK_THROWS_WITH_AS(flatten(model, "a2"), doctest::Contains("reappears"),
                       CompileError);
}
