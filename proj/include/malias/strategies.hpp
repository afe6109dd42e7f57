#pragma once

// The pluggable aliasing operation: malias : M a -> M (M a).
//
// Each strategy splits a computation's effects between an outer layer
// (performed when the alias is created) and an inner layer (performed when
// the aliased value is used).  That split is exactly what distinguishes the
// evaluation strategies:
//
//   cbn   keep everything in the inner layer; each use re-runs it
//   cbv   run everything in the outer layer; uses are pure
//   need  allocate a cell; the first use runs the computation and caches it
//   par   spawn the computation immediately; each use waits on its result
//
// Strategies are pure Comp-to-Comp transformers.  All mutable state (cells,
// tasks) lives in the runners.

#include <functional>
#include <stdexcept>
#include <string>

#include "malias/comp.hpp"

namespace malias {

enum class StrategyId { CbN, CbV, CbNeed, CbParNeed };

inline const char* strategy_name(StrategyId id) {
    switch (id) {
        case StrategyId::CbN: return "cbn";
        case StrategyId::CbV: return "cbv";
        case StrategyId::CbNeed: return "need";
        case StrategyId::CbParNeed: return "par";
    }
    return "?";
}

inline StrategyId parse_strategy(const std::string& name) {
    if (name == "cbn") return StrategyId::CbN;
    if (name == "cbv") return StrategyId::CbV;
    if (name == "need") return StrategyId::CbNeed;
    if (name == "par") return StrategyId::CbParNeed;
    throw std::invalid_argument("unknown strategy '" + name +
                                "' (expected cbn, cbv, need or par)");
}

// Outer layer does nothing; the inner computation is m itself, so every use
// re-runs its effects.
inline Comp malias_cbn(const Comp& m) { return comp_pure(v_comp(m)); }

// Outer layer runs m to a value; the inner computation just returns it.
inline Comp malias_cbv(const Comp& m) {
    return comp_bind(m, [](const Value& v) { return comp_pure(v_comp(comp_pure(v))); });
}

// Outer layer allocates a memo cell (a filled-flag cell plus a value cell,
// together playing the role of an optional slot starting out empty).  The
// inner computation consults the flag: on first use it runs m and fills the
// slot; later uses return the cached value with no observable effects.
inline Comp malias_need(const Comp& m) {
    return comp_step(
        CellNewReq{v_bool(false)}, [m](const Value& flag_id_v) {
            CellId flag = flag_id_v.as_int();
            return comp_step(CellNewReq{v_int(0)}, [m, flag](const Value& val_id_v) {
                CellId val = val_id_v.as_int();
                Comp inner = comp_step(
                    CellReadReq{flag}, [m, flag, val](const Value& filled) {
                        if (filled.as_bool()) {
                            return comp_step(CellReadReq{val},
                                             [](const Value& v) { return comp_pure(v); });
                        }
                        return comp_bind(m, [flag, val](const Value& v) {
                            return comp_step(CellWriteReq{val, v}, [flag, v](const Value&) {
                                return comp_step(CellWriteReq{flag, v_bool(true)},
                                                 [v](const Value&) { return comp_pure(v); });
                            });
                        });
                    });
                return comp_pure(v_comp(inner));
            });
        });
}

// Outer layer spawns m, which starts running in the background immediately;
// the inner computation waits for the spawned task's result.
inline Comp malias_par(const Comp& m) {
    return comp_step(SpawnReq{m}, [](const Value& ivar_v) {
        IVarId ivar = ivar_v.as_int();
        Comp inner = comp_step(GetReq{ivar}, [](const Value& v) { return comp_pure(v); });
        return comp_pure(v_comp(inner));
    });
}

using MAliasFn = std::function<Comp(const Comp&)>;

inline MAliasFn get_strategy(StrategyId id) {
    switch (id) {
        case StrategyId::CbN: return [](const Comp& m) { return malias_cbn(m); };
        case StrategyId::CbV: return [](const Comp& m) { return malias_cbv(m); };
        case StrategyId::CbNeed: return [](const Comp& m) { return malias_need(m); };
        case StrategyId::CbParNeed: return [](const Comp& m) { return malias_par(m); };
    }
    throw std::invalid_argument("unknown strategy id");
}

// The parallel strategy needs the virtual-time runner; everything else runs
// sequentially.
inline bool strategy_needs_par_runner(StrategyId id) { return id == StrategyId::CbParNeed; }

}  // namespace malias
