#pragma once

// Interpretation of target terms into Comp values, and the whole-program
// pipeline (parse -> typecheck -> translate -> eval -> run).
//
// Target terms evaluate *purely* to runtime values; computation-typed terms
// evaluate to first-class Comp values whose effects only happen when a
// runner executes them.  Lambdas become host closures; the MAlias form is
// interpreted by whichever strategy was plugged in.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "malias/comp.hpp"
#include "malias/run.hpp"
#include "malias/strategies.hpp"
#include "malias/syntax.hpp"
#include "malias/translate.hpp"

namespace malias {

// Top-level definitions, filled in program order; lambdas close over the
// table, so a definition may refer to itself and run-time lookup finds it.
using DefTable = std::map<std::string, Value>;
using DefTablePtr = std::shared_ptr<DefTable>;

class Env {
public:
    Env() = default;
    explicit Env(DefTablePtr defs) : defs_(std::move(defs)) {}

    Env with(std::string name, Value v) const {
        Env out = *this;
        out.locals_ = std::make_shared<const Node>(Node{std::move(name), std::move(v), locals_});
        return out;
    }

    const Value* lookup_local(const std::string& name) const {
        for (const Node* n = locals_.get(); n != nullptr; n = n->next.get())
            if (n->name == name) return &n->value;
        return nullptr;
    }

    const Value* lookup_def(const std::string& name) const {
        if (!defs_) return nullptr;
        auto it = defs_->find(name);
        return it == defs_->end() ? nullptr : &it->second;
    }

private:
    struct Node {
        std::string name;
        Value value;
        std::shared_ptr<const Node> next;
    };
    std::shared_ptr<const Node> locals_;
    DefTablePtr defs_;
};

namespace detail {

// Copyable bundle of evaluation context; closures capture it by value.
struct Evaluator {
    MAliasFn malias;
    FuelPtr fuel;
    std::shared_ptr<std::int64_t> depth = std::make_shared<std::int64_t>(0);

    // Deep enough for any realistic program (effects break up evaluation, so
    // legitimate nesting stays shallow), small enough that the guard fires
    // well before the C++ stack runs out.
    static constexpr std::int64_t kMaxDepth = 1500;

    Value eval(const TargetExprPtr& e, const Env& env) const {
        fuel->spend();
        struct DepthGuard {
            std::int64_t* d;
            explicit DepthGuard(std::int64_t* p) : d(p) { ++*d; }
            ~DepthGuard() { --*d; }
        } guard{depth.get()};
        if (*depth > kMaxDepth)
            throw EvalError("evaluation recursion limit exceeded (runaway recursion?)");

        return std::visit(
            overloaded{
                [&](const TargetExpr::Var& v) -> Value {
                    if (const Value* found = env.lookup_local(v.name)) return *found;
                    throw EvalError("unbound variable '" + v.name + "' at run time");
                },
                [&](const TargetExpr::DefRef& d) -> Value {
                    if (const Value* found = env.lookup_def(d.name)) return *found;
                    throw EvalError("unknown definition '" + d.name + "' at run time");
                },
                [&](const TargetExpr::IntLit& n) -> Value { return v_int(n.value); },
                [&](const TargetExpr::Lam& l) -> Value {
                    return v_closure([self = *this, param = l.param, body = l.body,
                                      env](const Value& arg) {
                        return self.eval(body, env.with(param, arg));
                    });
                },
                [&](const TargetExpr::App& a) -> Value {
                    Value fn = eval(a.fn, env);
                    Value arg = eval(a.arg, env);
                    return fn.as_closure().apply(arg);
                },
                [&](const TargetExpr::Prim& p) -> Value {
                    std::int64_t l = eval(p.lhs, env).as_int();
                    std::int64_t r = eval(p.rhs, env).as_int();
                    return apply_prim(p.op, l, r);
                },
                [&](const TargetExpr::If& i) -> Value {
                    bool c = eval(i.cond, env).as_bool();
                    return eval(c ? i.then_branch : i.else_branch, env);
                },
                [&](const TargetExpr::Effect& f) -> Value {
                    EffectRequest req =
                        f.spec.kind == EffectSpec::Kind::Read
                            ? EffectRequest(ReadReq{f.spec.arg})
                            : EffectRequest(TickReq{f.spec.arg});
                    return v_comp(
                        comp_step(std::move(req), [](const Value& v) { return comp_pure(v); }));
                },
                [&](const TargetExpr::Unit& u) -> Value {
                    return v_comp(comp_pure(eval(u.arg, env)));
                },
                [&](const TargetExpr::Bind& b) -> Value {
                    Comp m = eval(b.comp, env).as_comp();
                    Value k = eval(b.cont, env);
                    return v_comp(comp_bind(m, [k](const Value& v) {
                        return k.as_closure().apply(v).as_comp();
                    }));
                },
                [&](const TargetExpr::MAlias& m) -> Value {
                    return v_comp(malias(eval(m.arg, env).as_comp()));
                }},
            e->node);
    }

    static Value apply_prim(PrimOp op, std::int64_t l, std::int64_t r) {
        auto wrap = [](std::uint64_t u) { return static_cast<std::int64_t>(u); };
        switch (op) {
            case PrimOp::Add:
                return v_int(wrap(static_cast<std::uint64_t>(l) + static_cast<std::uint64_t>(r)));
            case PrimOp::Sub:
                return v_int(wrap(static_cast<std::uint64_t>(l) - static_cast<std::uint64_t>(r)));
            case PrimOp::Mul:
                return v_int(wrap(static_cast<std::uint64_t>(l) * static_cast<std::uint64_t>(r)));
            case PrimOp::Leq: return v_bool(l <= r);
            case PrimOp::Gt: return v_bool(l > r);
        }
        throw EvalError("unknown primitive");
    }
};

}  // namespace detail

// Evaluates a computation-typed target term to its Comp.
inline Comp eval_target(const TargetExprPtr& e, const Env& env, StrategyId strategy,
                        FuelPtr fuel = nullptr) {
    detail::Evaluator ev{get_strategy(strategy), fuel ? std::move(fuel) : make_fuel()};
    return ev.eval(e, env).as_comp();
}

// ---------------------------------------------------------------------------
// Whole-program execution

struct PipelineResult {
    Value value;
    Trace trace;
    std::optional<ParReport> par;  // present for the par strategy
};

// Evaluates and runs an already translated program.  Definitions load in
// order: under the cbv translation a definition's computation runs eagerly
// (its effects, if any, precede main's trace); under cbn/cba a definition
// is bound as the computation itself and re-entered per use.
inline PipelineResult run_translated(const TargetProgram& tp, Translation flavor,
                                     StrategyId strategy, const Config& cfg,
                                     FuelPtr fuel = nullptr) {
    RunContext ctx(cfg, fuel ? std::move(fuel) : make_fuel());
    detail::Evaluator ev{get_strategy(strategy), ctx.fuel()};
    DefTablePtr defs = std::make_shared<DefTable>();
    Env env(defs);

    Trace def_trace;
    for (const auto& d : tp.defs) {
        Value v = ev.eval(d.body, env);
        if (flavor == Translation::Cbv) {
            SeqResult r = ctx.run_seq_layer(v.as_comp());
            def_trace.insert(def_trace.end(), r.trace.begin(), r.trace.end());
            (*defs)[d.name] = r.value;
        } else {
            (*defs)[d.name] = v;
        }
    }

    Comp main = ev.eval(tp.main, env).as_comp();
    PipelineResult out;
    if (strategy_needs_par_runner(strategy)) {
        RunContext::ParLayerResult layer = ctx.run_par_layer(main);
        out.value = layer.value;
        out.trace = def_trace;
        out.trace.insert(out.trace.end(), layer.trace.begin(), layer.trace.end());
        out.par = ParReport{layer.value, out.trace, layer.span, ctx.work_total()};
    } else {
        SeqResult r = ctx.run_seq_layer(main);
        out.value = r.value;
        out.trace = def_trace;
        out.trace.insert(out.trace.end(), r.trace.begin(), r.trace.end());
    }
    return out;
}

// Full pipeline over source programs: typecheck, translate via the
// call-by-alias rules, evaluate with the chosen strategy's malias, run.
inline PipelineResult run_program(const Program& p, StrategyId strategy, const Config& cfg,
                                  FuelPtr fuel = nullptr) {
    TargetProgram tp = translate_program(p, Translation::Cba);
    return run_translated(tp, Translation::Cba, strategy, cfg, std::move(fuel));
}

// Replaces the body of the distinguished `arg` definition with a literal;
// lets one program serve a whole input sweep.
inline Program substitute_arg(const Program& p, std::int64_t n) {
    Program out = p;
    bool found = false;
    for (auto& d : out.defs) {
        if (d.name == "arg") {
            d.body = s_int(n);
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("program has no `arg` definition to substitute");
    return out;
}

}  // namespace malias
