#pragma once

// The three monadic translations from the source calculus into the target
// calculus, and the typing-preservation verifier.
//
//   cbn   call-by-name:  arguments passed as computations, re-run per use
//   cbv   call-by-value: arguments evaluated before the call
//   cba   call-by-alias: like cbn, but every application argument and let
//         binding goes through malias, so the strategy plugged in at run
//         time decides how often argument effects happen
//
// Core rules (x a variable, juxtaposition application):
//
//            cbn                    cbv                    cba
//   x        x                      unit x                 x
//   \x.e     unit (\x. T[e])        unit (\x. T[e])        unit (\x. T[e])
//   e1 e2    bind T[e1]             bind T[e1] (\f.        bind T[e1] (\f.
//              (\f. f T[e2])          bind T[e2] (\x.        bind (malias T[e2]) f)
//                                        f x))
//   let x =  (\x. T[e2]) T[e1]      bind T[e1]             bind (malias T[e1])
//     e1 in e2                        (\x. T[e2])            (\x. T[e2])
//
// Extensions, shared by all three so the equivalence results carry over to
// the full language: literals are pure; primitives bind left then right and
// return a pure result; `if` binds the condition, then selects a branch
// translation; read/tick are the primitive effect computations.
//
// Types: cbn and cba send τ1 → τ2 to M T[τ1] → M T[τ2]; cbv uses value
// types, sending τ1 → τ2 to V[τ1] → M V[τ2].  A term of type τ translates
// to a target term of computation type (M T[τ], resp. M V[τ]).
//
// The translators are type-directed so that every emitted lambda carries
// its parameter type; target terms therefore check under plain structural
// inference.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "malias/syntax.hpp"
#include "malias/typecheck.hpp"

namespace malias {

enum class Translation { Cbn, Cbv, Cba };

inline const char* translation_name(Translation t) {
    switch (t) {
        case Translation::Cbn: return "cbn";
        case Translation::Cbv: return "cbv";
        case Translation::Cba: return "cba";
    }
    return "?";
}

inline Translation parse_translation(const std::string& name) {
    if (name == "cbn") return Translation::Cbn;
    if (name == "cbv") return Translation::Cbv;
    if (name == "cba") return Translation::Cba;
    throw std::invalid_argument("unknown translation '" + name +
                                "' (expected cbn, cbv or cba)");
}

// ---------------------------------------------------------------------------
// Type translations

// Computation-style: base types unchanged, τ1 → τ2 becomes M T[τ1] → M T[τ2].
inline TargetTypePtr translate_type_cba(const SourceTypePtr& t) {
    return std::visit(
        overloaded{[](const SourceType::Base& b) { return tty_base(b.name); },
                   [](const SourceType::Arrow& a) {
                       return tty_arrow(tty_m(translate_type_cba(a.from)),
                                        tty_m(translate_type_cba(a.to)));
                   }},
        t->node);
}

inline TargetTypePtr translate_type_cbn(const SourceTypePtr& t) { return translate_type_cba(t); }

// Value-style: τ1 → τ2 becomes V[τ1] → M V[τ2] (functions take evaluated
// arguments but still produce computations).
inline TargetTypePtr translate_type_cbv(const SourceTypePtr& t) {
    return std::visit(
        overloaded{[](const SourceType::Base& b) { return tty_base(b.name); },
                   [](const SourceType::Arrow& a) {
                       return tty_arrow(translate_type_cbv(a.from),
                                        tty_m(translate_type_cbv(a.to)));
                   }},
        t->node);
}

inline TargetTypePtr translate_type(const SourceTypePtr& t, Translation flavor) {
    return flavor == Translation::Cbv ? translate_type_cbv(t) : translate_type_cba(t);
}

// ---------------------------------------------------------------------------
// Term translation

namespace detail {

// Issues binder names guaranteed distinct from every name in the program
// and from each other; draws from a readable pool (f, g, h, k, f1, g1, ...).
class FreshNamer {
public:
    explicit FreshNamer(std::set<std::string> used) : used_(std::move(used)) {}

    std::string fresh() {
        static const char* pool[] = {"f", "g", "h", "k"};
        while (true) {
            std::string candidate = pool[counter_ % 4];
            if (counter_ >= 4) candidate += std::to_string(counter_ / 4);
            ++counter_;
            if (used_.insert(candidate).second) return candidate;
        }
    }

private:
    std::set<std::string> used_;
    std::size_t counter_ = 0;
};

inline std::set<std::string> names_in(const SourceExprPtr& e) {
    std::set<std::string> out;
    visit_subexprs(e, [&](const SourceExprPtr& sub) {
        std::visit(overloaded{[&](const SourceExpr::Var& v) { out.insert(v.name); },
                              [&](const SourceExpr::Lam& l) { out.insert(l.param); },
                              [&](const SourceExpr::Let& l) { out.insert(l.name); },
                              [&](const SourceExpr::DefRef& d) { out.insert(d.name); },
                              [&](const auto&) {}},
                   sub->node);
    });
    return out;
}

class Translator {
public:
    Translator(Translation flavor, std::vector<std::pair<std::string, SourceTypePtr>> def_types,
               FreshNamer namer)
        : flavor_(flavor), def_types_(std::move(def_types)), namer_(std::move(namer)) {}

    // Returns the translated term together with the source type of e.
    std::pair<TargetExprPtr, SourceTypePtr> translate(const SourceEnv& env,
                                                      const SourceExprPtr& e) {
        return std::visit(
            overloaded{
                [&](const SourceExpr::Var& v) -> Result {
                    const SourceTypePtr* t = env.lookup(v.name);
                    if (t == nullptr) throw TypeError("unbound variable '" + v.name + "'");
                    TargetExprPtr x = t_var(v.name);
                    return {flavor_ == Translation::Cbv ? t_unit(x) : x, *t};
                },
                [&](const SourceExpr::DefRef& d) -> Result {
                    SourceTypePtr t = def_type(d.name);
                    TargetExprPtr r = t_defref(d.name);
                    return {flavor_ == Translation::Cbv ? t_unit(r) : r, t};
                },
                [&](const SourceExpr::IntLit& n) -> Result {
                    return {t_unit(t_int(n.value)), ty_int()};
                },
                [&](const SourceExpr::Lam& l) -> Result {
                    if (!l.ann)
                        throw TypeError("translation requires an annotated parameter '" +
                                        l.param + "'");
                    auto [body, bt] = translate(env.extend(l.param, l.ann), l.body);
                    TargetTypePtr param_ty = flavor_ == Translation::Cbv
                                                 ? translate_type_cbv(l.ann)
                                                 : tty_m(translate_type_cba(l.ann));
                    return {t_unit(t_lam(l.param, body, param_ty)), ty_arrow(l.ann, bt)};
                },
                [&](const SourceExpr::App& a) -> Result {
                    auto [fn, ft] = translate(env, a.fn);
                    auto* arrow = std::get_if<SourceType::Arrow>(&ft->node);
                    if (arrow == nullptr)
                        throw TypeError("applied expression has non-function type " +
                                        pretty_type(ft));
                    auto [arg, at] = translate(env, a.arg);
                    (void)at;
                    std::string f = namer_.fresh();
                    TargetTypePtr fty = translate_type(ft, flavor_);
                    TargetExprPtr cont;
                    switch (flavor_) {
                        case Translation::Cbn:
                            cont = t_lam(f, t_app(t_var(f), arg), fty);
                            break;
                        case Translation::Cbv: {
                            std::string x = namer_.fresh();
                            TargetTypePtr xty = translate_type_cbv(arrow->from);
                            cont = t_lam(f,
                                         t_bind(arg, t_lam(x, t_app(t_var(f), t_var(x)), xty)),
                                         fty);
                            break;
                        }
                        case Translation::Cba:
                            cont = t_lam(f, t_bind(t_malias(arg), t_var(f)), fty);
                            break;
                    }
                    return {t_bind(fn, cont), arrow->to};
                },
                [&](const SourceExpr::Let& l) -> Result {
                    auto [bound, bt] = translate(env, l.bound);
                    auto [body, rt] = translate(env.extend(l.name, bt), l.body);
                    switch (flavor_) {
                        case Translation::Cbn:
                            return {t_app(t_lam(l.name, body, tty_m(translate_type_cba(bt))),
                                          bound),
                                    rt};
                        case Translation::Cbv:
                            return {t_bind(bound, t_lam(l.name, body, translate_type_cbv(bt))),
                                    rt};
                        case Translation::Cba:
                            return {t_bind(t_malias(bound),
                                           t_lam(l.name, body, tty_m(translate_type_cba(bt)))),
                                    rt};
                    }
                    throw std::logic_error("unreachable");
                },
                [&](const SourceExpr::Prim& p) -> Result {
                    auto [lhs, lt] = translate(env, p.lhs);
                    auto [rhs, rt] = translate(env, p.rhs);
                    (void)lt;
                    (void)rt;
                    std::string a = namer_.fresh();
                    std::string b = namer_.fresh();
                    bool comparison = p.op == PrimOp::Leq || p.op == PrimOp::Gt;
                    TargetExprPtr out = t_bind(
                        lhs,
                        t_lam(a,
                              t_bind(rhs, t_lam(b,
                                                t_unit(t_prim(p.op, t_var(a), t_var(b))),
                                                tty_int())),
                              tty_int()));
                    return {out, comparison ? ty_bool() : ty_int()};
                },
                [&](const SourceExpr::If& i) -> Result {
                    auto [cond, ct] = translate(env, i.cond);
                    (void)ct;
                    auto [then_b, tt] = translate(env, i.then_branch);
                    auto [else_b, et] = translate(env, i.else_branch);
                    (void)et;
                    std::string b = namer_.fresh();
                    return {t_bind(cond, t_lam(b, t_if(t_var(b), then_b, else_b), tty_bool())),
                            tt};
                },
                [&](const SourceExpr::Effect& f) -> Result {
                    return {t_effect(f.spec), ty_int()};
                }},
            e->node);
    }

private:
    using Result = std::pair<TargetExprPtr, SourceTypePtr>;

    Translation flavor_;
    std::vector<std::pair<std::string, SourceTypePtr>> def_types_;
    FreshNamer namer_;

    SourceTypePtr def_type(const std::string& name) const {
        for (const auto& [n, t] : def_types_)
            if (n == name) return t;
        throw TypeError("unknown definition '" + name + "'");
    }
};

inline TargetExprPtr translate_expr(const SourceExprPtr& e, Translation flavor,
                                    const SourceEnv& env) {
    // Unannotated input is annotated on the fly by running inference first.
    auto [ty, annotated] = SourceChecker().infer(env, e);
    (void)ty;
    Translator tr(flavor, {}, FreshNamer(names_in(annotated)));
    return tr.translate(env, annotated).first;
}

}  // namespace detail

inline TargetExprPtr translate_cbn(const SourceExprPtr& e, const SourceEnv& env = {}) {
    return detail::translate_expr(e, Translation::Cbn, env);
}
inline TargetExprPtr translate_cbv(const SourceExprPtr& e, const SourceEnv& env = {}) {
    return detail::translate_expr(e, Translation::Cbv, env);
}
inline TargetExprPtr translate_cba(const SourceExprPtr& e, const SourceEnv& env = {}) {
    return detail::translate_expr(e, Translation::Cba, env);
}

// ---------------------------------------------------------------------------
// Whole programs

struct TargetProgram {
    struct Def {
        std::string name;
        TargetTypePtr type;  // M T[τ] for cbn/cba; V[τ] for cbv (defs hold values)
        TargetExprPtr body;  // always of computation type
    };
    std::vector<Def> defs;
    TargetExprPtr main;
    TargetTypePtr main_type;  // computation type of the translated main
};

inline TargetProgram translate_program(const Program& p, Translation flavor) {
    CheckedProgram checked = annotate_program(p);

    std::vector<std::pair<std::string, SourceTypePtr>> def_types;
    std::set<std::string> used;
    for (const auto& d : checked.program.defs) {
        def_types.emplace_back(d.name, d.type);
        used.insert(d.name);
        for (const auto& n : detail::names_in(d.body)) used.insert(n);
    }
    for (const auto& n : detail::names_in(checked.program.main)) used.insert(n);

    detail::Translator tr(flavor, def_types, detail::FreshNamer(std::move(used)));
    TargetProgram out;
    for (const auto& d : checked.program.defs) {
        auto [body, ty] = tr.translate(SourceEnv{}, d.body);
        TargetTypePtr def_ty = flavor == Translation::Cbv ? translate_type_cbv(d.type)
                                                          : tty_m(translate_type_cba(d.type));
        out.defs.push_back({d.name, def_ty, body});
        (void)ty;
    }
    auto [main, main_src_ty] = tr.translate(SourceEnv{}, checked.program.main);
    out.main = main;
    out.main_type = tty_m(translate_type(main_src_ty, flavor));
    return out;
}

// ---------------------------------------------------------------------------
// Typing preservation

// A term of type τ in context x1:τ1,... must translate (via cba) to a
// target term of type M T[τ] in context x1 : M T[τ1], ....  Returns false
// and fills `report` when the translated term fails to check, which would
// be a translator bug.
inline bool verify_typing_preservation(const SourceExprPtr& e, const SourceEnv& ctx,
                                       std::string* report = nullptr) {
    auto [src_ty, annotated] = SourceChecker().infer(ctx, e);
    detail::Translator tr(Translation::Cba, {}, detail::FreshNamer(detail::names_in(annotated)));
    auto [target, ty2] = tr.translate(ctx, annotated);
    (void)ty2;
    TargetEnv tenv;
    for (const auto& [name, t] : ctx.entries()) tenv = tenv.extend(name, tty_m(translate_type_cba(t)));
    return check_target(tenv, target, tty_m(translate_type_cba(src_ty)), report);
}

}  // namespace malias
