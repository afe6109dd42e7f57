#pragma once

// Randomized law checking.
//
// The aliasing operation must satisfy four laws, checked observationally
// (same final value, same per-layer traces when the nested computation is
// peeled with flatten_nested):
//
//   naturality        map (map f) . malias  ==  malias . map f
//   associativity     map malias . malias   ==  malias . malias
//   computationality  malias . unit         ==  unit . unit
//   identity          join . malias         ==  id
//
// On top of those, this module checks that the alias translation run with
// the cbn (resp. cbv) malias agrees with the classic call-by-name (resp.
// call-by-value) translation, that two source-level transformations preserve
// observable behaviour, and that the need strategy runs every aliased
// computation at most once.
//
// Everything is a pure function of the seed: reports are reproducible and
// each recorded failure carries the derived per-case seed that regenerates
// its inputs exactly.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "malias/comp.hpp"
#include "malias/eval.hpp"
#include "malias/run.hpp"
#include "malias/strategies.hpp"
#include "malias/syntax.hpp"
#include "malias/translate.hpp"

namespace malias {

// ---------------------------------------------------------------------------
// Generator specification

struct NamedFn {
    std::string name;
    std::function<Value(const Value&)> fn;
};

// Small fixed pool of integer functions; named so counterexamples stay
// readable.
inline const std::vector<NamedFn>& default_function_pool() {
    static const std::vector<NamedFn> pool = {
        {"succ", [](const Value& v) { return v_int(v.as_int() + 1); }},
        {"double", [](const Value& v) { return v_int(v.as_int() * 2); }},
        {"const0", [](const Value&) { return v_int(0); }},
    };
    return pool;
}

struct GenSpec {
    std::uint64_t seed = 1;
    int max_depth = 4;
    std::vector<std::string> effect_keys = {"k0", "k1", "k2"};
};

// Configuration the law suites run against: every effect key present, with
// distinct values of both parities.
inline Config law_config(const GenSpec& spec) {
    Config cfg;
    for (std::size_t i = 0; i < spec.effect_keys.size(); ++i)
        cfg.entries[spec.effect_keys[i]] = static_cast<std::int64_t>(3 * i + 4);
    return cfg;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform-ish in [0, n); plain modulo keeps results identical across
    // standard library implementations.
    std::int64_t below(std::int64_t n) {
        return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(n));
    }

private:
    std::mt19937_64 eng_;
};

// Per-case seeds derived with a splitmix64 step so that consecutive cases
// are decorrelated and each failure is replayable from its own seed.
inline std::uint64_t derive_case_seed(std::uint64_t suite_seed, std::uint64_t index) {
    std::uint64_t z = suite_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Computation generator

struct GeneratedComp {
    Comp comp;
    std::string desc;
};

namespace detail {

// Generated computations thread an integer accumulator so that read results
// influence the final value (strategies that duplicate or drop effects then
// disagree on values, not just traces).
using CompBuilder = std::function<Comp(std::int64_t)>;

inline std::pair<CompBuilder, std::string> gen_comp_rec(Rng& rng, const GenSpec& spec,
                                                        int depth) {
    if (depth <= 0 || rng.below(10) < 2) {
        std::int64_t n = rng.below(20);
        return {[n](std::int64_t acc) { return comp_pure(v_int(acc + n)); },
                "pure(+" + std::to_string(n) + ")"};
    }
    std::int64_t choice = rng.below(10);
    if (choice < 4) {
        std::string key =
            spec.effect_keys[static_cast<std::size_t>(rng.below(
                static_cast<std::int64_t>(spec.effect_keys.size())))];
        auto [rest, rest_desc] = gen_comp_rec(rng, spec, depth - 1);
        CompBuilder b = [key, rest = rest](std::int64_t acc) {
            return comp_step(ReadReq{key}, [rest, acc](const Value& v) {
                return rest(acc + v.as_int());
            });
        };
        return {b, "read " + key + "; " + rest_desc};
    }
    if (choice < 7) {
        std::string label = "t" + std::to_string(rng.below(2));
        auto [rest, rest_desc] = gen_comp_rec(rng, spec, depth - 1);
        CompBuilder b = [label, rest = rest](std::int64_t acc) {
            return comp_step(TickReq{label}, [rest, acc](const Value&) { return rest(acc); });
        };
        return {b, "tick " + label + "; " + rest_desc};
    }
    // Branch on the parity of a read, exercising value-dependent control.
    std::string key = spec.effect_keys[static_cast<std::size_t>(
        rng.below(static_cast<std::int64_t>(spec.effect_keys.size())))];
    auto [then_b, then_desc] = gen_comp_rec(rng, spec, depth - 1);
    auto [else_b, else_desc] = gen_comp_rec(rng, spec, depth - 1);
    CompBuilder b = [key, then_b = then_b, else_b = else_b](std::int64_t acc) {
        return comp_step(ReadReq{key}, [then_b, else_b, acc](const Value& v) {
            return v.as_int() % 2 != 0 ? then_b(acc + v.as_int()) : else_b(acc);
        });
    };
    return {b, "read " + key + " ? (" + then_desc + ") : (" + else_desc + ")"};
}

}  // namespace detail

inline GeneratedComp gen_comp_described(const GenSpec& spec) {
    Rng rng(spec.seed);
    auto [builder, desc] = detail::gen_comp_rec(rng, spec, spec.max_depth);
    return {builder(0), desc};
}

inline Comp gen_comp(const GenSpec& spec) { return gen_comp_described(spec).comp; }

// ---------------------------------------------------------------------------
// Typed term generator

struct GeneratedTerm {
    SourceExprPtr expr;
    SourceTypePtr type;
};

namespace detail {

class TermGen {
public:
    TermGen(Rng& rng, const GenSpec& spec) : rng_(rng), spec_(spec) {}

    using Binding = std::pair<std::string, SourceTypePtr>;

    SourceExprPtr gen(std::vector<Binding>& env, const SourceTypePtr& ty, int depth) {
        if (depth <= 0) return gen_base(env, ty);

        std::vector<int> candidates;  // weighted production ids
        auto add = [&](int id, int weight) {
            for (int i = 0; i < weight; ++i) candidates.push_back(id);
        };
        bool have_var = !vars_of(env, ty).empty();
        bool is_arrow = std::holds_alternative<SourceType::Arrow>(ty->node);
        if (have_var) add(kVar, 3);
        add(kLet, 3);
        add(kApp, 3);
        add(kIf, 2);
        if (is_arrow) {
            add(kLam, 6);
        } else if (type_equal(ty, ty_int())) {
            add(kPrim, 3);
            add(kRead, 3);
            add(kTick, 1);
            add(kLit, 1);
        } else {  // bool
            add(kPrim, 4);
        }

        switch (candidates[static_cast<std::size_t>(
            rng_.below(static_cast<std::int64_t>(candidates.size())))]) {
            case kVar: return pick_var(env, ty);
            case kLet: {
                SourceTypePtr bound_ty = gen_small_type(depth);
                SourceExprPtr bound = gen(env, bound_ty, depth - 1);
                std::string name = fresh();
                env.emplace_back(name, bound_ty);
                SourceExprPtr body = gen(env, ty, depth - 1);
                env.pop_back();
                return s_let(name, bound, body);
            }
            case kApp: {
                SourceTypePtr arg_ty = gen_small_type(depth);
                SourceExprPtr fn = gen(env, ty_arrow(arg_ty, ty), depth - 1);
                SourceExprPtr arg = gen(env, arg_ty, depth - 1);
                return s_app(fn, arg);
            }
            case kIf: {
                SourceExprPtr c = gen(env, ty_bool(), depth - 1);
                SourceExprPtr t = gen(env, ty, depth - 1);
                SourceExprPtr e = gen(env, ty, depth - 1);
                return s_if(c, t, e);
            }
            case kLam: {
                const auto& arrow = std::get<SourceType::Arrow>(ty->node);
                std::string name = fresh();
                env.emplace_back(name, arrow.from);
                SourceExprPtr body = gen(env, arrow.to, depth - 1);
                env.pop_back();
                return s_lam(name, body, arrow.from);
            }
            case kPrim: {
                bool comparison = type_equal(ty, ty_bool());
                PrimOp op;
                if (comparison) {
                    op = rng_.below(2) == 0 ? PrimOp::Leq : PrimOp::Gt;
                } else {
                    static const PrimOp arith[] = {PrimOp::Add, PrimOp::Sub, PrimOp::Mul};
                    op = arith[rng_.below(3)];
                }
                return s_prim(op, gen(env, ty_int(), depth - 1), gen(env, ty_int(), depth - 1));
            }
            case kRead: return s_read(pick_key());
            case kTick: return s_tick("t" + std::to_string(rng_.below(2)));
            case kLit: return s_int(rng_.below(10));
        }
        return s_int(0);  // unreachable
    }

    SourceTypePtr gen_top_type() {
        switch (rng_.below(10)) {
            case 0:
            case 1:
            case 2:
            case 3: return ty_int();
            case 4: return ty_bool();
            case 5:
            case 6:
            case 7: return ty_arrow(ty_int(), ty_int());
            case 8: return ty_arrow(ty_arrow(ty_int(), ty_int()), ty_int());
            default: return ty_arrow(ty_int(), ty_arrow(ty_int(), ty_int()));
        }
    }

private:
    enum { kVar, kLet, kApp, kIf, kLam, kPrim, kRead, kTick, kLit };

    Rng& rng_;
    const GenSpec& spec_;
    int next_var_ = 0;

    std::string fresh() { return "v" + std::to_string(next_var_++); }

    std::string pick_key() {
        return spec_.effect_keys[static_cast<std::size_t>(
            rng_.below(static_cast<std::int64_t>(spec_.effect_keys.size())))];
    }

    std::vector<std::size_t> vars_of(const std::vector<Binding>& env, const SourceTypePtr& ty) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < env.size(); ++i)
            if (type_equal(env[i].second, ty)) out.push_back(i);
        return out;
    }

    SourceExprPtr pick_var(const std::vector<Binding>& env, const SourceTypePtr& ty) {
        auto candidates = vars_of(env, ty);
        return s_var(env[candidates[static_cast<std::size_t>(
                             rng_.below(static_cast<std::int64_t>(candidates.size())))]]
                         .first);
    }

    SourceTypePtr gen_small_type(int depth) {
        std::int64_t r = rng_.below(20);
        if (depth <= 1 || r < 11) return r < 14 ? ty_int() : ty_bool();
        if (r < 14) return ty_bool();
        if (r < 19) return ty_arrow(ty_int(), ty_int());
        return ty_arrow(ty_arrow(ty_int(), ty_int()), ty_int());
    }

    SourceExprPtr gen_base(std::vector<Binding>& env, const SourceTypePtr& ty) {
        if (auto* arrow = std::get_if<SourceType::Arrow>(&ty->node)) {
            std::string name = fresh();
            env.emplace_back(name, arrow->from);
            SourceExprPtr body = gen_base(env, arrow->to);
            env.pop_back();
            return s_lam(name, body, arrow->from);
        }
        bool is_bool = type_equal(ty, ty_bool());
        if (!is_bool) {
            auto candidates = vars_of(env, ty);
            std::int64_t r = rng_.below(10);
            if (!candidates.empty() && r < 3) return pick_var(env, ty);
            if (r < 6) return s_int(rng_.below(10));
            if (r < 9) return s_read(pick_key());
            return s_tick("t" + std::to_string(rng_.below(2)));
        }
        auto candidates = vars_of(env, ty);
        if (!candidates.empty() && rng_.below(10) < 3) return pick_var(env, ty);
        PrimOp op = rng_.below(2) == 0 ? PrimOp::Leq : PrimOp::Gt;
        return s_prim(op, s_int(rng_.below(10)), s_int(rng_.below(10)));
    }
};

}  // namespace detail

// Generates a closed, fully annotated, well-typed term.  With `ground` the
// term has type int, so running it yields a comparable base value.
inline GeneratedTerm gen_typed_term(const GenSpec& spec, bool ground = false) {
    Rng rng(spec.seed);
    detail::TermGen gen(rng, spec);
    SourceTypePtr ty = ground ? ty_int() : gen.gen_top_type();
    std::vector<detail::TermGen::Binding> env;
    return {gen.gen(env, ty, spec.max_depth), ty};
}

// ---------------------------------------------------------------------------
// Reports

struct LawFailure {
    std::uint64_t seed;
    std::string detail;
};

struct LawReport {
    std::string law;
    int cases = 0;
    std::vector<LawFailure> failures;

    bool passed() const { return failures.empty(); }
};

inline json law_report_to_json(const LawReport& r) {
    json j;
    j["law"] = r.law;
    j["cases"] = r.cases;
    j["failures"] = json::array();
    for (const auto& f : r.failures) {
        json jf;
        jf["seed"] = f.seed;
        jf["detail"] = f.detail;
        j["failures"].push_back(jf);
    }
    return j;
}

// ---------------------------------------------------------------------------
// Observational comparison

namespace detail {

struct Observation {
    std::vector<Trace> layers;
    Value value;
};

inline bool observation_equal(const Observation& a, const Observation& b, bool multiset) {
    if (!value_equal(a.value, b.value)) return false;
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        bool ok = multiset ? trace_multiset_equal(a.layers[i], b.layers[i])
                           : a.layers[i] == b.layers[i];
        if (!ok) return false;
    }
    return true;
}

inline std::string show_observation(const Observation& o) {
    std::string out = "value=" + show_value(o.value) + " layers=[";
    for (std::size_t i = 0; i < o.layers.size(); ++i) {
        if (i != 0) out += ", ";
        out += show_trace(o.layers[i]);
    }
    return out + "]";
}

inline Observation observe(const Comp& m, const Config& cfg, int depth, bool parallel) {
    FlattenResult r = flatten_nested(m, cfg, depth, parallel, make_fuel());
    return {std::move(r.layers), std::move(r.value)};
}

// Lifts an integer function to act on the *inner* computation carried by an
// aliased value: v must be a computation; the result maps f over it.
inline std::function<Value(const Value&)> map_inner(std::function<Value(const Value&)> f) {
    return [f = std::move(f)](const Value& v) { return v_comp(comp_map(v.as_comp(), f)); };
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The four malias laws

inline std::vector<LawReport> check_malias_laws(StrategyId strategy, const GenSpec& spec,
                                                int cases) {
    const auto& pool = default_function_pool();
    MAliasFn malias = get_strategy(strategy);
    Config cfg = law_config(spec);
    bool par = strategy_needs_par_runner(strategy);
    bool multiset = strategy == StrategyId::CbParNeed;
    std::string tag = std::string("(") + strategy_name(strategy) + ")";

    LawReport naturality{"naturality" + tag};
    LawReport associativity{"associativity" + tag};
    LawReport computationality{"computationality" + tag};
    LawReport identity{"identity" + tag};

    for (int i = 0; i < cases; ++i) {
        std::uint64_t case_seed = derive_case_seed(spec.seed, static_cast<std::uint64_t>(i));
        GenSpec case_spec = spec;
        case_spec.seed = case_seed;
        GeneratedComp g = gen_comp_described(case_spec);

        // naturality, once per pool function
        ++naturality.cases;
        for (const NamedFn& f : pool) {
            Comp lhs = comp_map(malias(g.comp), detail::map_inner(f.fn));
            Comp rhs = malias(comp_map(g.comp, f.fn));
            detail::Observation lo = detail::observe(lhs, cfg, 2, par);
            detail::Observation ro = detail::observe(rhs, cfg, 2, par);
            if (!detail::observation_equal(lo, ro, multiset)) {
                naturality.failures.push_back(
                    {case_seed, "m = " + g.desc + ", f = " + f.name +
                                    "; lhs " + detail::show_observation(lo) + "; rhs " +
                                    detail::show_observation(ro)});
            }
        }

        // associativity at depth-3 flattening
        ++associativity.cases;
        {
            Comp lhs = comp_map(malias(g.comp), [&malias](const Value& v) {
                return v_comp(malias(v.as_comp()));
            });
            Comp rhs = malias(malias(g.comp));
            detail::Observation lo = detail::observe(lhs, cfg, 3, par);
            detail::Observation ro = detail::observe(rhs, cfg, 3, par);
            if (!detail::observation_equal(lo, ro, multiset)) {
                associativity.failures.push_back(
                    {case_seed, "m = " + g.desc + "; lhs " + detail::show_observation(lo) +
                                    "; rhs " + detail::show_observation(ro)});
            }
        }

        // computationality on a generated literal
        ++computationality.cases;
        {
            Rng rng(case_seed ^ 0xC0FFEE);
            std::int64_t n = rng.below(100);
            Comp lhs = malias(comp_unit(v_int(n)));
            Comp rhs = comp_unit(v_comp(comp_unit(v_int(n))));
            detail::Observation lo = detail::observe(lhs, cfg, 2, par);
            detail::Observation ro = detail::observe(rhs, cfg, 2, par);
            if (!detail::observation_equal(lo, ro, multiset)) {
                computationality.failures.push_back(
                    {case_seed, "n = " + std::to_string(n) + "; lhs " +
                                    detail::show_observation(lo) + "; rhs " +
                                    detail::show_observation(ro)});
            }
        }

        // identity: join (malias m) behaves exactly like m
        ++identity.cases;
        {
            Comp lhs = comp_join(malias(g.comp));
            detail::Observation lo = detail::observe(lhs, cfg, 1, par);
            detail::Observation ro = detail::observe(g.comp, cfg, 1, par);
            if (!detail::observation_equal(lo, ro, multiset)) {
                identity.failures.push_back(
                    {case_seed, "m = " + g.desc + "; join.malias " +
                                    detail::show_observation(lo) + "; id " +
                                    detail::show_observation(ro)});
            }
        }
    }
    return {naturality, associativity, computationality, identity};
}

// ---------------------------------------------------------------------------
// Equivalence with the classic translations

// Runs the alias translation with the matching strategy against the classic
// cbn/cbv translation of the same term; both must produce identical values
// and traces.
inline LawReport check_equivalence(Translation flavor, const GenSpec& spec, int cases) {
    if (flavor == Translation::Cba)
        throw std::invalid_argument("check_equivalence compares against cbn or cbv");
    StrategyId strategy = flavor == Translation::Cbn ? StrategyId::CbN : StrategyId::CbV;
    Config cfg = law_config(spec);
    LawReport report{std::string("equivalence(cba+") + strategy_name(strategy) + " vs " +
                     translation_name(flavor) + ")"};

    for (int i = 0; i < cases; ++i) {
        std::uint64_t case_seed = derive_case_seed(spec.seed, static_cast<std::uint64_t>(i));
        GenSpec case_spec = spec;
        case_spec.seed = case_seed;
        GeneratedTerm t = gen_typed_term(case_spec, /*ground=*/true);
        ++report.cases;

        Comp via_cba = eval_target(translate_cba(t.expr), Env{}, strategy, make_fuel());
        Comp via_classic = eval_target(flavor == Translation::Cbn ? translate_cbn(t.expr)
                                                                  : translate_cbv(t.expr),
                                       Env{}, strategy, make_fuel());
        SeqResult a = run_seq(via_cba, cfg, make_fuel());
        SeqResult b = run_seq(via_classic, cfg, make_fuel());
        if (!value_equal(a.value, b.value) || a.trace != b.trace) {
            report.failures.push_back(
                {case_seed, "term = " + pretty_source(t.expr) + "; cba " + show_value(a.value) +
                                " " + show_trace(a.trace) + "; classic " + show_value(b.value) +
                                " " + show_trace(b.trace)});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Source-level transformations

namespace detail {

// e2[name := replacement]; safe here because the replacement is closed.
inline SourceExprPtr substitute(const SourceExprPtr& e, const std::string& name,
                                const SourceExprPtr& replacement) {
    return std::visit(
        overloaded{
            [&](const SourceExpr::Var& v) -> SourceExprPtr {
                return v.name == name ? replacement : e;
            },
            [&](const SourceExpr::Lam& l) -> SourceExprPtr {
                if (l.param == name) return e;  // shadowed
                return s_lam(l.param, substitute(l.body, name, replacement), l.ann);
            },
            [&](const SourceExpr::App& a) -> SourceExprPtr {
                return s_app(substitute(a.fn, name, replacement),
                             substitute(a.arg, name, replacement));
            },
            [&](const SourceExpr::Let& l) -> SourceExprPtr {
                SourceExprPtr bound = substitute(l.bound, name, replacement);
                if (l.name == name) return s_let(l.name, bound, l.body);
                return s_let(l.name, bound, substitute(l.body, name, replacement));
            },
            [&](const SourceExpr::Prim& p) -> SourceExprPtr {
                return s_prim(p.op, substitute(p.lhs, name, replacement),
                              substitute(p.rhs, name, replacement));
            },
            [&](const SourceExpr::If& i) -> SourceExprPtr {
                return s_if(substitute(i.cond, name, replacement),
                            substitute(i.then_branch, name, replacement),
                            substitute(i.else_branch, name, replacement));
            },
            [&](const auto&) -> SourceExprPtr { return e; }},
        e->node);
}

inline Observation observe_program(const SourceExprPtr& main, StrategyId strategy,
                                   const Config& cfg) {
    Program p;
    p.main = main;
    PipelineResult r = run_program(p, strategy, cfg, make_fuel());
    return Observation{{r.trace}, r.value};
}

}  // namespace detail

// Two semantics-preserving source rewrites, checked under the given
// strategy's alias translation pipeline:
//   (a) let f = \x. e1 in e2   ==   e2[f := \x. e1]   (bound value is pure)
//   (b) let x = e in x         ==   e                 (the identity law)
inline std::vector<LawReport> check_source_transforms(StrategyId strategy, const GenSpec& spec,
                                                      int cases) {
    Config cfg = law_config(spec);
    bool multiset = strategy == StrategyId::CbParNeed;
    std::string tag = std::string("(") + strategy_name(strategy) + ")";
    LawReport inline_lam{"inline-pure-function" + tag};
    LawReport let_id{"let-identity" + tag};

    for (int i = 0; i < cases; ++i) {
        std::uint64_t case_seed = derive_case_seed(spec.seed, static_cast<std::uint64_t>(i));

        // (a) inline a lambda-bound function
        ++inline_lam.cases;
        {
            Rng rng(case_seed);
            detail::TermGen gen(rng, spec);
            std::vector<detail::TermGen::Binding> env1;
            env1.emplace_back("x", ty_int());
            SourceExprPtr e1 = gen.gen(env1, ty_int(), spec.max_depth - 1);
            SourceExprPtr lam = s_lam("x", e1, ty_int());
            std::vector<detail::TermGen::Binding> env2;
            env2.emplace_back("fn", ty_arrow(ty_int(), ty_int()));
            SourceExprPtr e2 = gen.gen(env2, ty_int(), spec.max_depth - 1);

            SourceExprPtr lhs = s_let("fn", lam, e2);
            SourceExprPtr rhs = detail::substitute(e2, "fn", lam);
            detail::Observation lo = detail::observe_program(lhs, strategy, cfg);
            detail::Observation ro = detail::observe_program(rhs, strategy, cfg);
            if (!detail::observation_equal(lo, ro, multiset)) {
                inline_lam.failures.push_back(
                    {case_seed, "let fn = " + pretty_source(lam) + " in " + pretty_source(e2) +
                                    "; lhs " + detail::show_observation(lo) + "; rhs " +
                                    detail::show_observation(ro)});
            }
        }

        // (b) let x = e in x
        ++let_id.cases;
        {
            GenSpec case_spec = spec;
            case_spec.seed = case_seed ^ 0x5EEDULL;
            GeneratedTerm t = gen_typed_term(case_spec, /*ground=*/true);
            SourceExprPtr lhs = s_let("x", t.expr, s_var("x"));
            detail::Observation lo = detail::observe_program(lhs, strategy, cfg);
            detail::Observation ro = detail::observe_program(t.expr, strategy, cfg);
            if (!detail::observation_equal(lo, ro, multiset)) {
                let_id.failures.push_back(
                    {case_seed, "e = " + pretty_source(t.expr) + "; let-bound " +
                                    detail::show_observation(lo) + "; direct " +
                                    detail::show_observation(ro)});
            }
        }
    }
    return {inline_lam, let_id};
}

// ---------------------------------------------------------------------------
// At-most-once for the need strategy

// For generated programs: the need run must agree with the cbn run on the
// value, its trace must be a sub-multiset of the cbn trace, and no aliased
// computation may execute more than once (checked via the memo cells: each
// is written at most once).
inline LawReport check_at_most_once(const GenSpec& spec, int cases) {
    Config cfg = law_config(spec);
    LawReport report{"need-at-most-once"};

    for (int i = 0; i < cases; ++i) {
        std::uint64_t case_seed = derive_case_seed(spec.seed, static_cast<std::uint64_t>(i));
        GenSpec case_spec = spec;
        case_spec.seed = case_seed;
        GeneratedTerm t = gen_typed_term(case_spec, /*ground=*/true);
        ++report.cases;

        TargetExprPtr target = translate_cba(t.expr);

        Comp cbn_comp = eval_target(target, Env{}, StrategyId::CbN, make_fuel());
        SeqResult cbn = run_seq(cbn_comp, cfg, make_fuel());

        RunContext ctx(cfg, make_fuel());
        Comp need_comp = eval_target(target, Env{}, StrategyId::CbNeed, ctx.fuel());
        SeqResult need = ctx.run_seq_layer(need_comp);

        std::string problem;
        if (!value_equal(need.value, cbn.value)) {
            problem = "value mismatch: need " + show_value(need.value) + ", cbn " +
                      show_value(cbn.value);
        } else if (!trace_sub_multiset(need.trace, cbn.trace)) {
            problem = "need trace " + show_trace(need.trace) +
                      " is not a sub-multiset of cbn trace " + show_trace(cbn.trace);
        } else {
            for (std::size_t c = 0; c < ctx.cells_allocated(); ++c) {
                if (ctx.cell_write_count(static_cast<CellId>(c)) > 1) {
                    problem = "memo cell " + std::to_string(c) + " written " +
                              std::to_string(ctx.cell_write_count(static_cast<CellId>(c))) +
                              " times";
                    break;
                }
            }
        }
        if (!problem.empty()) {
            report.failures.push_back({case_seed, "term = " + pretty_source(t.expr) + "; " +
                                                      problem});
        }
    }
    return report;
}

}  // namespace malias
