#pragma once

// First-class monadic computations over the effect signature
// (read/tick/cell/spawn/get), built as a free construction:
//
//   Comp = Pure(value) | Step(effect, value -> Comp)
//
// comp_bind grafts the continuation onto every Pure leaf, so the three monad
// laws hold by construction:
//
//   bind (unit a) k  = k a          (left identity, definitional)
//   bind m unit      = m            (right identity, observationally)
//   bind (bind m k) h = bind m (\v. bind (k v) h)   (associativity)
//
// Runtime values include computations themselves: translated variables have
// computation type, so a Comp may flow anywhere a value can.

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "malias/util.hpp"

namespace malias {

// ---------------------------------------------------------------------------
// Runtime errors

struct RuntimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingKeyError : RuntimeError {
    std::string key;
    explicit MissingKeyError(const std::string& key_)
        : RuntimeError("MissingKey: configuration has no entry for \"" + key_ + "\""), key(key_) {}
};

struct FuelError : RuntimeError {
    FuelError() : RuntimeError("fuel exhausted: computation exceeded the step limit") {}
};

struct DeadlockError : RuntimeError {
    DeadlockError() : RuntimeError("deadlock: all tasks are blocked on unfilled ivars") {}
};

struct EvalError : RuntimeError {
    using RuntimeError::RuntimeError;
};

// ---------------------------------------------------------------------------
// Values and computations

struct ValueNode;
struct CompNode;

class Comp {
public:
    Comp() = default;
    explicit Comp(std::shared_ptr<const CompNode> node) : node_(std::move(node)) {}
    Comp(const Comp&) = default;
    Comp(Comp&&) noexcept = default;
    Comp& operator=(const Comp& o) {
        if (this != &o) {
            release(node_);
            node_ = o.node_;
        }
        return *this;
    }
    Comp& operator=(Comp&& o) noexcept {
        if (this != &o) {
            release(node_);
            node_ = std::move(o.node_);
        }
        return *this;
    }
    ~Comp() { release(node_); }

    const CompNode& node() const { return *node_; }
    bool valid() const { return node_ != nullptr; }
    const void* identity() const { return node_.get(); }

private:
    // Dropping a reference can free a node whose continuation captures more
    // computations, and that ownership chain can be arbitrarily long (every
    // aliasing layer links to the one below it).  Freeing it by straight
    // destructor recursion overflows the stack, so the outermost release
    // drains a queue instead: nested releases just enqueue and return.
    static void release(std::shared_ptr<const CompNode>& p) noexcept {
        if (!p) return;
        thread_local std::vector<std::shared_ptr<const CompNode>> pending;
        thread_local bool draining = false;
        pending.push_back(std::move(p));
        if (draining) return;
        draining = true;
        while (!pending.empty()) {
            std::shared_ptr<const CompNode> next = std::move(pending.back());
            pending.pop_back();
            next.reset();  // may re-enter release(), which only enqueues
        }
        draining = false;
    }

    std::shared_ptr<const CompNode> node_;
};

class Value {
public:
    Value() = default;
    const ValueNode& node() const { return *node_; }
    bool valid() const { return node_ != nullptr; }

    bool is_int() const;
    bool is_bool() const;
    bool is_closure() const;
    bool is_comp() const;

    std::int64_t as_int() const;      // throws EvalError on kind mismatch
    bool as_bool() const;
    const struct Closure& as_closure() const;
    const Comp& as_comp() const;

    static Value of(std::shared_ptr<const ValueNode> node) { return Value(std::move(node)); }

private:
    explicit Value(std::shared_ptr<const ValueNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const ValueNode> node_;
};

struct Closure {
    std::function<Value(const Value&)> apply;
};

using CellId = std::int64_t;
using IVarId = std::int64_t;

struct ReadReq {
    std::string key;
};
struct TickReq {
    std::string label;
};
struct CellNewReq {
    Value initial;
};
struct CellReadReq {
    CellId cell;
};
struct CellWriteReq {
    CellId cell;
    Value value;
};
struct SpawnReq {
    Comp task;
};
struct GetReq {
    IVarId ivar;
};

using EffectRequest =
    std::variant<ReadReq, TickReq, CellNewReq, CellReadReq, CellWriteReq, SpawnReq, GetReq>;

struct ValueNode {
    std::variant<std::int64_t, bool, Closure, Comp> v;
};

struct CompNode {
    struct Pure {
        Value value;
    };
    struct Step {
        EffectRequest effect;
        std::function<Comp(const Value&)> cont;
    };
    std::variant<Pure, Step> node;
};

// ---------------------------------------------------------------------------
// Value constructors / accessors

inline Value v_int(std::int64_t n) {
    return Value::of(std::make_shared<ValueNode>(ValueNode{n}));
}
inline Value v_bool(bool b) {
    return Value::of(std::make_shared<ValueNode>(ValueNode{b}));
}
inline Value v_closure(std::function<Value(const Value&)> f) {
    return Value::of(std::make_shared<ValueNode>(ValueNode{Closure{std::move(f)}}));
}
inline Value v_comp(Comp c) {
    return Value::of(std::make_shared<ValueNode>(ValueNode{std::move(c)}));
}

inline bool Value::is_int() const { return std::holds_alternative<std::int64_t>(node_->v); }
inline bool Value::is_bool() const { return std::holds_alternative<bool>(node_->v); }
inline bool Value::is_closure() const { return std::holds_alternative<Closure>(node_->v); }
inline bool Value::is_comp() const { return std::holds_alternative<Comp>(node_->v); }

inline const char* value_kind(const Value& v) {
    if (!v.valid()) return "<null>";
    if (v.is_int()) return "integer";
    if (v.is_bool()) return "boolean";
    if (v.is_closure()) return "closure";
    return "computation";
}

inline std::int64_t Value::as_int() const {
    if (auto* p = std::get_if<std::int64_t>(&node_->v)) return *p;
    throw EvalError(std::string("expected an integer value, found ") + value_kind(*this));
}
inline bool Value::as_bool() const {
    if (auto* p = std::get_if<bool>(&node_->v)) return *p;
    throw EvalError(std::string("expected a boolean value, found ") + value_kind(*this));
}
inline const Closure& Value::as_closure() const {
    if (auto* p = std::get_if<Closure>(&node_->v)) return *p;
    throw EvalError(std::string("expected a closure, found ") + value_kind(*this));
}
inline const Comp& Value::as_comp() const {
    if (auto* p = std::get_if<Comp>(&node_->v)) return *p;
    throw EvalError(std::string("expected a computation, found ") + value_kind(*this));
}

inline std::string show_value(const Value& v) {
    if (!v.valid()) return "<null>";
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_bool()) return v.as_bool() ? "true" : "false";
    if (v.is_closure()) return "<closure>";
    return "<computation>";
}

// Comparable kinds compare by content; closures and computations have no
// structural equality and compare by identity only.
inline bool value_equal(const Value& a, const Value& b) {
    if (!a.valid() || !b.valid()) return a.valid() == b.valid();
    if (a.is_int() && b.is_int()) return a.as_int() == b.as_int();
    if (a.is_bool() && b.is_bool()) return a.as_bool() == b.as_bool();
    if (a.is_comp() && b.is_comp()) return a.as_comp().identity() == b.as_comp().identity();
    if (a.is_closure() && b.is_closure()) return &a.as_closure() == &b.as_closure();
    return false;
}

// ---------------------------------------------------------------------------
// Monad operations

inline Comp comp_pure(Value v) {
    return Comp(std::make_shared<CompNode>(CompNode{CompNode::Pure{std::move(v)}}));
}

inline Comp comp_unit(Value v) { return comp_pure(std::move(v)); }

inline Comp comp_step(EffectRequest req, std::function<Comp(const Value&)> cont) {
    return Comp(std::make_shared<CompNode>(
        CompNode{CompNode::Step{std::move(req), std::move(cont)}}));
}

inline Comp comp_bind(const Comp& m, std::function<Comp(const Value&)> k) {
    return std::visit(
        overloaded{
            [&](const CompNode::Pure& p) { return k(p.value); },
            [&](const CompNode::Step& s) {
                return comp_step(s.effect, [cont = s.cont, k = std::move(k)](const Value& v) {
                    return comp_bind(cont(v), k);
                });
            }},
        m.node().node);
}

inline Comp comp_map(const Comp& m, std::function<Value(const Value&)> f) {
    return comp_bind(m, [f = std::move(f)](const Value& v) { return comp_pure(f(v)); });
}

// Collapses one level of nesting: the value produced by mm must itself be a
// computation.
inline Comp comp_join(const Comp& mm) {
    return comp_bind(mm, [](const Value& v) { return v.as_comp(); });
}

// True only for computations that are a bare Pure leaf; used where a
// structural check is meaningful (trees without continuations).
inline bool comp_is_pure(const Comp& m) {
    return std::holds_alternative<CompNode::Pure>(m.node().node);
}

inline const Value& comp_pure_value(const Comp& m) {
    return std::get<CompNode::Pure>(m.node().node).value;
}

}  // namespace malias
