#include <doctest.h>

#include "malias/syntax.hpp"
#include "malias/typecheck.hpp"

using namespace malias;

namespace {
SourceTypePtr infer_str(const std::string& src) {
    return infer_source(SourceEnv{}, parse_expr(src));
}
}  // namespace

TEST_CASE("source inference on closed terms") {
    CHECK(pretty_type(infer_str("42")) == "int");
    CHECK(pretty_type(infer_str("1 + 2 * 3")) == "int");
    CHECK(pretty_type(infer_str("1 <= 2")) == "bool");
    CHECK(pretty_type(infer_str("3 > 4")) == "bool");
    CHECK(pretty_type(infer_str("read \"k\"")) == "int");
    CHECK(pretty_type(infer_str("tick \"t\"")) == "int");
    CHECK(pretty_type(infer_str("\\x : int. x + 1")) == "int -> int");
    CHECK(pretty_type(infer_str("(\\x : int. x) 5")) == "int");
    CHECK(pretty_type(infer_str("let x = 1 in x + x")) == "int");
    CHECK(pretty_type(infer_str("if 1 <= 2 then 3 else 4")) == "int");
    CHECK(pretty_type(infer_str("\\f : int -> int. f 1")) == "(int -> int) -> int");
}

TEST_CASE("inference uses the environment") {
    SourceEnv env = SourceEnv{}.extend("n", ty_int()).extend("f", ty_arrow(ty_int(), ty_bool()));
    CHECK(pretty_type(infer_source(env, parse_expr("f (n + 1)"))) == "bool");
    CHECK_THROWS_AS(infer_source(env, parse_expr("n n")), TypeError);
    CHECK_THROWS_AS(infer_source(SourceEnv{}, parse_expr("zz")), TypeError);
}

TEST_CASE("checking pushes types into unannotated lambdas") {
    // \x. x has no annotation, so inference alone cannot type it...
    CHECK_THROWS_AS(infer_str("\\x. x"), TypeError);
    // ...but checking against int -> int can.
    SourceExprPtr annotated =
        SourceChecker().check(SourceEnv{}, parse_expr("\\x. x"), parse_type("int -> int"));
    const auto& lam = std::get<SourceExpr::Lam>(annotated->node);
    REQUIRE(lam.ann != nullptr);
    CHECK(pretty_type(lam.ann) == "int");

    // Checking also reaches through let bodies and if branches (bindings are
    // still inferred, so they need enough annotations on their own).
    CHECK_NOTHROW(check_source(SourceEnv{}, parse_expr("let n = 1 in \\x. x + n"),
                               parse_type("int -> int")));
    CHECK_THROWS_AS(check_source(SourceEnv{}, parse_expr("let f = \\x. x + 1 in f"),
                                 parse_type("int -> int")),
                    TypeError);
    CHECK_NOTHROW(check_source(SourceEnv{}, parse_expr("if 1 <= 2 then \\x. x else \\y. y"),
                               parse_type("bool -> bool")));
}

TEST_CASE("type errors are reported with context") {
    CHECK_THROWS_WITH_AS(infer_str("1 + (\\x : int. x)"), doctest::Contains("type error"),
                         TypeError);
    CHECK_THROWS_AS(infer_str("if 1 then 2 else 3"), TypeError);        // condition not bool
    CHECK_THROWS_AS(infer_str("if 1 <= 2 then 3 else \\x : int. x"), TypeError);
    CHECK_THROWS_AS(infer_str("(\\x : bool. x) 3"), TypeError);
}

TEST_CASE("annotate_program checks definitions against their declared types") {
    Program p = parse_program(
        "def inc : int -> int = \\x. x + 1\n"
        "main = inc (read \"k\")\n");
    CheckedProgram cp = annotate_program(p);
    CHECK(pretty_type(cp.main_type) == "int");
    // The returned program has every lambda annotated.
    const auto& lam = std::get<SourceExpr::Lam>(cp.program.defs[0].body->node);
    REQUIRE(lam.ann != nullptr);
    CHECK(pretty_type(lam.ann) == "int");

    Program bad = parse_program("def inc : int -> int = \\x. 1 <= x\nmain = 0\n");
    CHECK_THROWS_WITH_AS(annotate_program(bad), doctest::Contains("in definition 'inc'"),
                         TypeError);
}

TEST_CASE("recursive definitions type-check against their declaration") {
    Program p = parse_program(
        "def fib : int -> int =\n"
        "  \\n. if n <= 1 then n else fib (n - 1) + fib (n - 2)\n"
        "main = fib 10\n");
    CHECK(pretty_type(annotate_program(p).main_type) == "int");
}

TEST_CASE("target types print with M layered correctly") {
    TargetTypePtr t = tty_arrow(tty_m(tty_int()), tty_m(tty_int()));
    CHECK(pretty_type(t) == "M int -> M int");
    CHECK(pretty_type(tty_m(t)) == "M (M int -> M int)");
    CHECK(pretty_type(tty_arrow(tty_m(tty_arrow(tty_m(tty_int()), tty_m(tty_int()))),
                                tty_m(tty_int()))) == "M (M int -> M int) -> M int");
}

TEST_CASE("target checker: unit, bind and malias rules") {
    TargetEnv env;
    // unit : a -> M a
    CHECK(type_equal(infer_target(env, t_unit(t_int(1))), tty_m(tty_int())));
    // bind : M a -> (a -> M b) -> M b.  Inference needs the continuation's
    // parameter annotated; checking mode pushes the type in by itself.
    TargetExprPtr annotated =
        t_bind(t_unit(t_int(1)), t_lam("x", t_unit(t_var("x")), tty_int()));
    CHECK(type_equal(infer_target(env, annotated), tty_m(tty_int())));
    TargetExprPtr bare = t_bind(t_unit(t_int(1)), t_lam("x", t_unit(t_var("x"))));
    CHECK(check_target(env, bare, tty_m(tty_int())));
    // malias : M a -> M (M a)
    TargetExprPtr ma = t_malias(t_unit(t_int(1)));
    CHECK(type_equal(infer_target(env, ma), tty_m(tty_m(tty_int()))));

    // check_target accepts the right type and rejects the wrong one.
    CHECK(check_target(env, ma, tty_m(tty_m(tty_int()))));
    CHECK_FALSE(check_target(env, ma, tty_m(tty_int())));
    std::string why;
    CHECK_FALSE(check_target(env, t_unit(t_int(1)), tty_int(), &why));
    CHECK(!why.empty());
}

TEST_CASE("target checker rejects ill-formed binds") {
    TargetEnv env;
    // Binding a non-computation.
    CHECK_FALSE(check_target(env, t_bind(t_int(1), t_lam("x", t_unit(t_var("x")))),
                             tty_m(tty_int())));
    // Continuation result is not a computation.
    CHECK_FALSE(check_target(env, t_bind(t_unit(t_int(1)), t_lam("x", t_var("x"))),
                             tty_m(tty_int())));
    // malias of a non-computation.
    CHECK_FALSE(check_target(env, t_malias(t_int(3)), tty_m(tty_m(tty_int()))));
}

TEST_CASE("environments are persistent and shadow correctly") {
    SourceEnv base = SourceEnv{}.extend("x", ty_int());
    SourceEnv shadowed = base.extend("x", ty_bool());
    REQUIRE(base.lookup("x") != nullptr);
    CHECK(pretty_type(*base.lookup("x")) == "int");
    CHECK(pretty_type(*shadowed.lookup("x")) == "bool");
    CHECK(base.size() == 1);
    CHECK(shadowed.size() == 2);
}
