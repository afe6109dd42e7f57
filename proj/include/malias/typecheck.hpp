#pragma once

// Bidirectional type checking for the source calculus and a checker for the
// monadic target calculus.  Checking a whole program also produces a copy in
// which every lambda carries an explicit parameter annotation; the
// translators rely on those annotations to emit fully annotated target code.
//
// Target typing treats the three monadic forms schematically:
//
//   unit   : a -> M a
//   bind   : M a -> (a -> M b) -> M b
//   malias : M a -> M (M a)

#include <string>
#include <utility>
#include <vector>

#include "malias/syntax.hpp"

namespace malias {

struct TypeError : std::runtime_error {
    std::string message;  // without the "type error: " prefix
    explicit TypeError(const std::string& what_)
        : std::runtime_error("type error: " + what_), message(what_) {}
};

// Ordered name -> type context; later bindings shadow earlier ones.
template <typename T>
class TypeEnv {
public:
    TypeEnv extend(std::string name, T type) const {
        TypeEnv out = *this;
        out.entries_.emplace_back(std::move(name), std::move(type));
        return out;
    }

    const T* lookup(const std::string& name) const {
        for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
            if (it->first == name) return &it->second;
        return nullptr;
    }

    std::size_t size() const { return entries_.size(); }

    const std::vector<std::pair<std::string, T>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, T>> entries_;
};

using SourceEnv = TypeEnv<SourceTypePtr>;
using TargetEnv = TypeEnv<TargetTypePtr>;

// ---------------------------------------------------------------------------
// Source checker

class SourceChecker {
public:
    SourceChecker() = default;
    explicit SourceChecker(std::vector<std::pair<std::string, SourceTypePtr>> defs)
        : defs_(std::move(defs)) {}

    // Inference that simultaneously rebuilds the expression with every
    // lambda annotated.
    std::pair<SourceTypePtr, SourceExprPtr> infer(const SourceEnv& env,
                                                  const SourceExprPtr& e) const {
        return std::visit(
            overloaded{
                [&](const SourceExpr::Var& v) -> std::pair<SourceTypePtr, SourceExprPtr> {
                    const SourceTypePtr* t = env.lookup(v.name);
                    if (t == nullptr) throw TypeError("unbound variable '" + v.name + "'");
                    return {*t, e};
                },
                [&](const SourceExpr::DefRef& d) -> std::pair<SourceTypePtr, SourceExprPtr> {
                    return {def_type(d.name), e};
                },
                [&](const SourceExpr::IntLit&) -> std::pair<SourceTypePtr, SourceExprPtr> {
                    return {ty_int(), e};
                },
                [&](const SourceExpr::Lam& l) -> std::pair<SourceTypePtr, SourceExprPtr> {
                    if (!l.ann)
                        throw TypeError("cannot infer type of unannotated parameter '" + l.param +
                                        "'");
                    auto [bt, body] = infer(env.extend(l.param, l.ann), l.body);
                    return {ty_arrow(l.ann, bt), s_lam(l.param, body, l.ann)};
                },
                [&](const SourceExpr::App& a) -> std::pair<SourceTypePtr, SourceExprPtr> {
                    auto [ft, fn] = infer(env, a.fn);
                    auto* arrow = std::get_if<SourceType::Arrow>(&ft->node);
                    if (arrow == nullptr)
                        throw TypeError("applied expression has non-function type " +
                                        pretty_type(ft));
                    SourceExprPtr arg = check(env, a.arg, arrow->from);
                    return {arrow->to, s_app(fn, arg)};
                },
                [&](const SourceExpr::Let& l) -> std::pair<SourceTypePtr, SourceExprPtr> {
                    auto [bt, bound] = infer(env, l.bound);
                    auto [rt, body] = infer(env.extend(l.name, bt), l.body);
                    return {rt, s_let(l.name, bound, body)};
                },
                [&](const SourceExpr::Prim& p) -> std::pair<SourceTypePtr, SourceExprPtr> {
                    SourceExprPtr lhs = check(env, p.lhs, ty_int());
                    SourceExprPtr rhs = check(env, p.rhs, ty_int());
                    bool comparison = p.op == PrimOp::Leq || p.op == PrimOp::Gt;
                    return {comparison ? ty_bool() : ty_int(), s_prim(p.op, lhs, rhs)};
                },
                [&](const SourceExpr::If& i) -> std::pair<SourceTypePtr, SourceExprPtr> {
                    SourceExprPtr cond = check(env, i.cond, ty_bool());
                    auto [tt, then_b] = infer(env, i.then_branch);
                    SourceExprPtr else_b = check(env, i.else_branch, tt);
                    return {tt, s_if(cond, then_b, else_b)};
                },
                [&](const SourceExpr::Effect&) -> std::pair<SourceTypePtr, SourceExprPtr> {
                    return {ty_int(), e};
                }},
            e->node);
    }

    SourceExprPtr check(const SourceEnv& env, const SourceExprPtr& e,
                        const SourceTypePtr& expected) const {
        // Checking mode lets unannotated lambdas pick up their type from the
        // expected arrow, and pushes the expected type into both if-branches.
        if (auto* l = std::get_if<SourceExpr::Lam>(&e->node)) {
            auto* arrow = std::get_if<SourceType::Arrow>(&expected->node);
            if (arrow == nullptr)
                throw TypeError("lambda checked against non-function type " +
                                pretty_type(expected));
            if (l->ann && !type_equal(l->ann, arrow->from))
                throw TypeError("parameter '" + l->param + "' annotated " + pretty_type(l->ann) +
                                " but used at " + pretty_type(arrow->from));
            SourceExprPtr body = check(env.extend(l->param, arrow->from), l->body, arrow->to);
            return s_lam(l->param, body, arrow->from);
        }
        if (auto* i = std::get_if<SourceExpr::If>(&e->node)) {
            SourceExprPtr cond = check(env, i->cond, ty_bool());
            SourceExprPtr then_b = check(env, i->then_branch, expected);
            SourceExprPtr else_b = check(env, i->else_branch, expected);
            return s_if(cond, then_b, else_b);
        }
        if (auto* l = std::get_if<SourceExpr::Let>(&e->node)) {
            auto [bt, bound] = infer(env, l->bound);
            SourceExprPtr body = check(env.extend(l->name, bt), l->body, expected);
            return s_let(l->name, bound, body);
        }
        auto [got, rebuilt] = infer(env, e);
        if (!type_equal(got, expected))
            throw TypeError("expected " + pretty_type(expected) + ", found " + pretty_type(got) +
                            " in " + pretty_source(e));
        return rebuilt;
    }

private:
    std::vector<std::pair<std::string, SourceTypePtr>> defs_;

    SourceTypePtr def_type(const std::string& name) const {
        for (const auto& [n, t] : defs_)
            if (n == name) return t;
        throw TypeError("unknown definition '" + name + "'");
    }
};

inline SourceTypePtr infer_source(const SourceEnv& env, const SourceExprPtr& e) {
    return SourceChecker().infer(env, e).first;
}

inline void check_source(const SourceEnv& env, const SourceExprPtr& e,
                         const SourceTypePtr& expected) {
    SourceChecker().check(env, e, expected);
}

// Checks every definition against its declared type and main in the context
// of all definitions; the result has every lambda annotated.  Throws
// TypeError on ill-typed input.
struct CheckedProgram {
    Program program;         // fully annotated
    SourceTypePtr main_type;
};

inline CheckedProgram annotate_program(const Program& p) {
    std::vector<std::pair<std::string, SourceTypePtr>> def_types;
    for (const auto& d : p.defs) def_types.emplace_back(d.name, d.type);
    SourceChecker checker(def_types);
    CheckedProgram out;
    for (const auto& d : p.defs) {
        SourceExprPtr body;
        try {
            body = checker.check(SourceEnv{}, d.body, d.type);
        } catch (const TypeError& err) {
            throw TypeError("in definition '" + d.name + "': " + err.message);
        }
        out.program.defs.push_back({d.name, d.type, body});
    }
    auto [mt, main] = checker.infer(SourceEnv{}, p.main);
    out.program.main = main;
    out.main_type = mt;
    return out;
}

// ---------------------------------------------------------------------------
// Target checker

class TargetChecker {
public:
    TargetChecker() = default;
    explicit TargetChecker(std::vector<std::pair<std::string, TargetTypePtr>> defs)
        : defs_(std::move(defs)) {}

    TargetTypePtr infer(const TargetEnv& env, const TargetExprPtr& e) const {
        return std::visit(
            overloaded{
                [&](const TargetExpr::Var& v) -> TargetTypePtr {
                    const TargetTypePtr* t = env.lookup(v.name);
                    if (t == nullptr) throw TypeError("unbound variable '" + v.name + "'");
                    return *t;
                },
                [&](const TargetExpr::DefRef& d) -> TargetTypePtr { return def_type(d.name); },
                [&](const TargetExpr::IntLit&) -> TargetTypePtr { return tty_int(); },
                [&](const TargetExpr::Lam& l) -> TargetTypePtr {
                    if (!l.ann)
                        throw TypeError("cannot infer type of unannotated parameter '" + l.param +
                                        "'");
                    return tty_arrow(l.ann, infer(env.extend(l.param, l.ann), l.body));
                },
                [&](const TargetExpr::App& a) -> TargetTypePtr {
                    TargetTypePtr ft = infer(env, a.fn);
                    auto* arrow = std::get_if<TargetType::Arrow>(&ft->node);
                    if (arrow == nullptr)
                        throw TypeError("applied expression has non-function type " +
                                        pretty_type(ft));
                    check(env, a.arg, arrow->from);
                    return arrow->to;
                },
                [&](const TargetExpr::Prim& p) -> TargetTypePtr {
                    check(env, p.lhs, tty_int());
                    check(env, p.rhs, tty_int());
                    bool comparison = p.op == PrimOp::Leq || p.op == PrimOp::Gt;
                    return comparison ? tty_bool() : tty_int();
                },
                [&](const TargetExpr::If& i) -> TargetTypePtr {
                    check(env, i.cond, tty_bool());
                    TargetTypePtr tt = infer(env, i.then_branch);
                    check(env, i.else_branch, tt);
                    return tt;
                },
                [&](const TargetExpr::Effect&) -> TargetTypePtr { return tty_m(tty_int()); },
                [&](const TargetExpr::Unit& u) -> TargetTypePtr {
                    return tty_m(infer(env, u.arg));
                },
                [&](const TargetExpr::Bind& b) -> TargetTypePtr {
                    TargetTypePtr mt = infer(env, b.comp);
                    auto* m = std::get_if<TargetType::M>(&mt->node);
                    if (m == nullptr)
                        throw TypeError("bind of non-computation type " + pretty_type(mt));
                    TargetTypePtr kt = infer(env, b.cont);
                    auto* arrow = std::get_if<TargetType::Arrow>(&kt->node);
                    if (arrow == nullptr)
                        throw TypeError("bind continuation has non-function type " +
                                        pretty_type(kt));
                    if (!type_equal(arrow->from, m->inner))
                        throw TypeError("bind continuation expects " + pretty_type(arrow->from) +
                                        " but computation yields " + pretty_type(m->inner));
                    if (!std::holds_alternative<TargetType::M>(arrow->to->node))
                        throw TypeError("bind continuation returns non-computation type " +
                                        pretty_type(arrow->to));
                    return arrow->to;
                },
                [&](const TargetExpr::MAlias& m) -> TargetTypePtr {
                    TargetTypePtr mt = infer(env, m.arg);
                    if (!std::holds_alternative<TargetType::M>(mt->node))
                        throw TypeError("malias of non-computation type " + pretty_type(mt));
                    return tty_m(mt);
                }},
            e->node);
    }

    void check(const TargetEnv& env, const TargetExprPtr& e, const TargetTypePtr& expected) const {
        if (auto* l = std::get_if<TargetExpr::Lam>(&e->node)) {
            auto* arrow = std::get_if<TargetType::Arrow>(&expected->node);
            if (arrow == nullptr)
                throw TypeError("lambda checked against non-function type " +
                                pretty_type(expected));
            if (l->ann && !type_equal(l->ann, arrow->from))
                throw TypeError("parameter '" + l->param + "' annotated " + pretty_type(l->ann) +
                                " but used at " + pretty_type(arrow->from));
            check(env.extend(l->param, arrow->from), l->body, arrow->to);
            return;
        }
        if (auto* i = std::get_if<TargetExpr::If>(&e->node)) {
            check(env, i->cond, tty_bool());
            check(env, i->then_branch, expected);
            check(env, i->else_branch, expected);
            return;
        }
        if (auto* u = std::get_if<TargetExpr::Unit>(&e->node)) {
            auto* m = std::get_if<TargetType::M>(&expected->node);
            if (m == nullptr)
                throw TypeError("unit checked against non-computation type " +
                                pretty_type(expected));
            check(env, u->arg, m->inner);
            return;
        }
        if (auto* ma = std::get_if<TargetExpr::MAlias>(&e->node)) {
            auto* m = std::get_if<TargetType::M>(&expected->node);
            if (m != nullptr && std::holds_alternative<TargetType::M>(m->inner->node)) {
                check(env, ma->arg, m->inner);
                return;
            }
            throw TypeError("malias checked against " + pretty_type(expected) +
                            ", which is not of the form M (M a)");
        }
        if (auto* b = std::get_if<TargetExpr::Bind>(&e->node)) {
            if (!std::holds_alternative<TargetType::M>(expected->node))
                throw TypeError("bind checked against non-computation type " +
                                pretty_type(expected));
            TargetTypePtr mt = infer(env, b->comp);
            auto* m = std::get_if<TargetType::M>(&mt->node);
            if (m == nullptr) throw TypeError("bind of non-computation type " + pretty_type(mt));
            check(env, b->cont, tty_arrow(m->inner, expected));
            return;
        }
        TargetTypePtr got = infer(env, e);
        if (!type_equal(got, expected))
            throw TypeError("expected " + pretty_type(expected) + ", found " + pretty_type(got) +
                            " in " + pretty_target(e));
    }

private:
    std::vector<std::pair<std::string, TargetTypePtr>> defs_;

    TargetTypePtr def_type(const std::string& name) const {
        for (const auto& [n, t] : defs_)
            if (n == name) return t;
        throw TypeError("unknown definition '" + name + "'");
    }
};

inline TargetTypePtr infer_target(const TargetEnv& env, const TargetExprPtr& e) {
    return TargetChecker().infer(env, e);
}

// Non-throwing wrapper; on failure the report describes the first error.
inline bool check_target(const TargetEnv& env, const TargetExprPtr& e,
                         const TargetTypePtr& expected, std::string* report = nullptr) {
    try {
        TargetChecker().check(env, e, expected);
        return true;
    } catch (const TypeError& err) {
        if (report != nullptr) *report = err.what();
        return false;
    }
}

}  // namespace malias
