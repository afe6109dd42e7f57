#pragma once

// Executors for Comp trees.
//
//   run_seq        depth-first sequential execution with a cell store
//   run_par        deterministic cooperative scheduler in virtual time
//   flatten_nested peels nested computations layer by layer while sharing
//                  one store/scheduler, for observing values of type M (M a)
//
// Traces record only Read and Tick observations; cell and scheduler effects
// are invisible by design (sharing is an implementation detail, and making
// it observable would spuriously distinguish equivalent computations).
//
// Virtual-time cost model of run_par: Read and Tick cost one tick; Pure,
// cell operations and scheduler operations (spawn, get) cost nothing.  Every
// spawned task starts executing immediately, there is no worker limit, and
// ready tasks step in spawn order within a tick.  The run ends the moment
// the main task completes; span is the completion time of the main task and
// work is the total number of ticks consumed by all tasks.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "malias/comp.hpp"
#include "malias/util.hpp"

namespace malias {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration (flat `key = integer` file, a TOML subset)

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what_) : std::runtime_error("config error: " + what_) {}
};

struct Config {
    std::map<std::string, std::int64_t> entries;

    std::int64_t lookup(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) throw MissingKeyError(key);
        return it->second;
    }
};

inline Config parse_config(const std::string& text) {
    Config cfg;
    std::size_t line_no = 0;
    std::size_t start = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        std::size_t b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        std::size_t e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string line = text.substr(start, nl == std::string::npos ? nl : nl - start);
        start = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected `key = integer`");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.size() >= 2 && key.front() == '"' && key.back() == '"')
            key = key.substr(1, key.size() - 2);
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (cfg.entries.count(key))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key `" + key +
                              "`");
        try {
            std::size_t used = 0;
            std::int64_t parsed = std::stoll(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
            cfg.entries[key] = parsed;
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(line_no) + ": `" + val +
                              "` is not an integer");
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Traces

struct Event {
    enum class Kind { Read, Tick };
    Kind kind;
    std::string name;         // key for reads, label for ticks
    std::int64_t value = 0;   // read result; unused for ticks

    bool operator==(const Event& o) const {
        return kind == o.kind && name == o.name && (kind == Kind::Tick || value == o.value);
    }
    bool operator<(const Event& o) const {
        return std::tie(kind, name, value) < std::tie(o.kind, o.name, o.value);
    }
};

inline Event ev_read(std::string key, std::int64_t value) {
    return Event{Event::Kind::Read, std::move(key), value};
}
inline Event ev_tick(std::string label) { return Event{Event::Kind::Tick, std::move(label), 0}; }

using Trace = std::vector<Event>;

inline std::string show_event(const Event& e) {
    if (e.kind == Event::Kind::Read)
        return "read " + e.name + "=" + std::to_string(e.value);
    return "tick " + e.name;
}

inline std::string show_trace(const Trace& t) {
    std::string out = "[";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i != 0) out += ", ";
        out += show_event(t[i]);
    }
    return out + "]";
}

inline bool trace_multiset_equal(Trace a, Trace b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

// True when every event of `a` occurs in `b` at least as many times.
inline bool trace_sub_multiset(Trace a, Trace b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline json event_to_json(const Event& e) {
    json j;
    if (e.kind == Event::Kind::Read) {
        j["type"] = "read";
        j["key"] = e.name;
        j["value"] = e.value;
    } else {
        j["type"] = "tick";
        j["label"] = e.name;
    }
    return j;
}

inline json trace_to_json(const Trace& t) {
    json j;
    j["events"] = json::array();
    for (const Event& e : t) j["events"].push_back(event_to_json(e));
    return j;
}

// ---------------------------------------------------------------------------
// Fuel

class FuelMeter {
public:
    static constexpr std::uint64_t kDefaultFuel = 1'000'000;

    explicit FuelMeter(std::uint64_t limit = kDefaultFuel) : remaining_(limit) {}

    void spend(std::uint64_t n = 1) {
        if (remaining_ < n) throw FuelError();
        remaining_ -= n;
    }

    std::uint64_t remaining() const { return remaining_; }

private:
    std::uint64_t remaining_;
};

using FuelPtr = std::shared_ptr<FuelMeter>;

inline FuelPtr make_fuel(std::uint64_t limit = FuelMeter::kDefaultFuel) {
    return std::make_shared<FuelMeter>(limit);
}

// ---------------------------------------------------------------------------
// Results

struct SeqResult {
    Value value;
    Trace trace;
};

struct ParReport {
    Value value;
    Trace trace;
    std::int64_t span = 0;
    std::int64_t work = 0;
};

inline json par_report_to_json(const ParReport& r) {
    json j = trace_to_json(r.trace);
    j["span"] = r.span;
    j["work"] = r.work;
    return j;
}

struct NotAComputationError : RuntimeError {
    NotAComputationError()
        : RuntimeError("flatten: outer layer yielded a non-computation value") {}
};

// ---------------------------------------------------------------------------
// Run context: per-run mutable state shared by the layers of one nested run

class RunContext {
public:
    explicit RunContext(Config cfg, FuelPtr fuel = nullptr)
        : config_(std::move(cfg)), fuel_(fuel ? std::move(fuel) : make_fuel()) {}

    const Config& config() const { return config_; }
    const FuelPtr& fuel() const { return fuel_; }

    // --- cell store -------------------------------------------------------
    CellId cell_new(Value initial) {
        cells_.push_back(std::move(initial));
        cell_writes_.push_back(0);
        return static_cast<CellId>(cells_.size() - 1);
    }
    const Value& cell_read(CellId id) const {
        check_cell(id);
        return cells_[static_cast<std::size_t>(id)];
    }
    void cell_write(CellId id, Value v) {
        check_cell(id);
        cells_[static_cast<std::size_t>(id)] = std::move(v);
        ++cell_writes_[static_cast<std::size_t>(id)];
    }
    std::size_t cells_allocated() const { return cells_.size(); }
    int cell_write_count(CellId id) const {
        check_cell(id);
        return cell_writes_[static_cast<std::size_t>(id)];
    }

    // --- sequential layer -------------------------------------------------
    SeqResult run_seq_layer(Comp m) {
        SeqResult out;
        while (true) {
            fuel_->spend();
            if (comp_is_pure(m)) {
                out.value = comp_pure_value(m);
                return out;
            }
            const auto& step = std::get<CompNode::Step>(m.node().node);
            Value resume = std::visit(
                overloaded{
                    [&](const ReadReq& r) {
                        std::int64_t v = config_.lookup(r.key);
                        out.trace.push_back(ev_read(r.key, v));
                        return v_int(v);
                    },
                    [&](const TickReq& t) {
                        out.trace.push_back(ev_tick(t.label));
                        return v_int(0);
                    },
                    [&](const CellNewReq& c) { return v_int(cell_new(c.initial)); },
                    [&](const CellReadReq& c) { return cell_read(c.cell); },
                    [&](const CellWriteReq& c) {
                        cell_write(c.cell, c.value);
                        return v_int(0);
                    },
                    [&](const SpawnReq&) -> Value {
                        throw EvalError("spawn under the sequential runner");
                    },
                    [&](const GetReq&) -> Value {
                        throw EvalError("get under the sequential runner");
                    }},
                step.effect);
            m = step.cont(resume);
        }
    }

    // --- parallel layer ---------------------------------------------------
    struct ParLayerResult {
        Value value;
        Trace trace;
        std::int64_t span = 0;  // main-task completion time, relative to layer start
    };

    ParLayerResult run_par_layer(Comp main) {
        std::int64_t layer_start = now_;
        std::size_t first_event = events_.size();
        int main_id = add_task(std::move(main), /*ivar=*/-1);

        while (true) {
            // Rounds within the current tick: step tasks in spawn order until
            // the tick is quiescent or the main task completes.
            bool progress = true;
            while (progress) {
                progress = false;
                for (std::size_t i = 0; i < tasks_.size(); ++i) {
                    Task& t = tasks_[i];
                    if (t.state == Task::State::WaitTick && t.wake_at <= now_) {
                        fuel_->spend();
                        t.current = t.pending(t.pending_value);
                        t.pending = nullptr;
                        t.state = Task::State::Ready;
                        progress = true;
                    }
                    if (t.state == Task::State::WaitIVar &&
                        ivars_[static_cast<std::size_t>(t.waiting_ivar)].filled) {
                        t.current = t.pending(
                            ivars_[static_cast<std::size_t>(t.waiting_ivar)].value);
                        t.pending = nullptr;
                        t.state = Task::State::Ready;
                        progress = true;
                    }
                    if (t.state == Task::State::Ready) {
                        step_task(t);
                        progress = true;
                        if (tasks_[static_cast<std::size_t>(main_id)].state ==
                            Task::State::Done)
                            return finish_layer(main_id, layer_start, first_event);
                    }
                }
            }
            // Quiescent: advance virtual time to the earliest wake-up.
            std::int64_t next = -1;
            bool any_blocked = false;
            for (const Task& t : tasks_) {
                if (t.state == Task::State::WaitTick)
                    next = next < 0 ? t.wake_at : std::min(next, t.wake_at);
                if (t.state == Task::State::WaitIVar) any_blocked = true;
            }
            if (next < 0) {
                if (any_blocked) throw DeadlockError();
                throw EvalError("scheduler stalled with no runnable task");  // defensive
            }
            now_ = next;
        }
    }

    std::int64_t work_total() const { return work_; }
    std::int64_t now() const { return now_; }

private:
    struct IVar {
        bool filled = false;
        Value value;
    };

    struct Task {
        enum class State { Ready, WaitTick, WaitIVar, Done };
        Comp current;
        State state = State::Ready;
        std::function<Comp(const Value&)> pending;  // continuation while waiting
        Value pending_value;                        // resume value for WaitTick
        std::int64_t wake_at = 0;
        IVarId waiting_ivar = -1;
        IVarId result_ivar = -1;  // filled on completion; -1 for layer mains
        Value result;
    };

    struct TimedEvent {
        std::int64_t tick;
        int task;
        Event event;
    };

    Config config_;
    FuelPtr fuel_;
    std::vector<Value> cells_;
    std::vector<int> cell_writes_;

    std::vector<Task> tasks_;
    std::vector<IVar> ivars_;
    std::vector<TimedEvent> events_;
    std::int64_t now_ = 0;
    std::int64_t work_ = 0;

    void check_cell(CellId id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= cells_.size())
            throw EvalError("unallocated cell " + std::to_string(id));
    }

    int add_task(Comp c, IVarId result_ivar) {
        Task t;
        t.current = std::move(c);
        t.result_ivar = result_ivar;
        tasks_.push_back(std::move(t));
        return static_cast<int>(tasks_.size() - 1);
    }

    // Runs one task until it completes, blocks, or consumes this tick.
    void step_task(Task& t) {
        int id = static_cast<int>(&t - tasks_.data());
        while (true) {
            fuel_->spend();
            if (comp_is_pure(t.current)) {
                t.result = comp_pure_value(t.current);
                t.state = Task::State::Done;
                if (t.result_ivar >= 0) {
                    ivars_[static_cast<std::size_t>(t.result_ivar)] = {true, t.result};
                }
                return;
            }
            const auto& step = std::get<CompNode::Step>(t.current.node().node);
            bool continue_stepping = std::visit(
                overloaded{
                    [&](const ReadReq& r) {
                        std::int64_t v = config_.lookup(r.key);
                        events_.push_back({now_, id, ev_read(r.key, v)});
                        ++work_;
                        t.pending = step.cont;
                        t.pending_value = v_int(v);
                        t.wake_at = now_ + 1;
                        t.state = Task::State::WaitTick;
                        return false;
                    },
                    [&](const TickReq& k) {
                        events_.push_back({now_, id, ev_tick(k.label)});
                        ++work_;
                        t.pending = step.cont;
                        t.pending_value = v_int(0);
                        t.wake_at = now_ + 1;
                        t.state = Task::State::WaitTick;
                        return false;
                    },
                    [&](const CellNewReq& c) {
                        t.current = step.cont(v_int(cell_new(c.initial)));
                        return true;
                    },
                    [&](const CellReadReq& c) {
                        t.current = step.cont(cell_read(c.cell));
                        return true;
                    },
                    [&](const CellWriteReq& c) {
                        cell_write(c.cell, c.value);
                        t.current = step.cont(v_int(0));
                        return true;
                    },
                    [&](const SpawnReq& s) {
                        IVarId iv = static_cast<IVarId>(ivars_.size());
                        ivars_.push_back({});
                        auto cont = step.cont;  // copy before tasks_ may reallocate
                        add_task(s.task, iv);
                        Task& self = tasks_[static_cast<std::size_t>(id)];
                        self.current = cont(v_int(iv));
                        return true;
                    },
                    [&](const GetReq& g) {
                        if (g.ivar < 0 || static_cast<std::size_t>(g.ivar) >= ivars_.size())
                            throw EvalError("get of unknown ivar " + std::to_string(g.ivar));
                        const IVar& iv = ivars_[static_cast<std::size_t>(g.ivar)];
                        if (iv.filled) {
                            t.current = step.cont(iv.value);
                            return true;
                        }
                        t.pending = step.cont;
                        t.waiting_ivar = g.ivar;
                        t.state = Task::State::WaitIVar;
                        return false;
                    }},
                step.effect);
            if (!continue_stepping) return;
            // Spawn may have reallocated tasks_; re-check via the stored id.
            if (&t != &tasks_[static_cast<std::size_t>(id)]) {
                step_task(tasks_[static_cast<std::size_t>(id)]);
                return;
            }
        }
    }

    ParLayerResult finish_layer(int main_id, std::int64_t layer_start, std::size_t first_event) {
        ParLayerResult out;
        out.value = tasks_[static_cast<std::size_t>(main_id)].result;
        out.span = now_ - layer_start;
        std::vector<TimedEvent> slice(events_.begin() + static_cast<std::ptrdiff_t>(first_event),
                                      events_.end());
        std::stable_sort(slice.begin(), slice.end(), [](const TimedEvent& a, const TimedEvent& b) {
            return std::tie(a.tick, a.task) < std::tie(b.tick, b.task);
        });
        for (const TimedEvent& te : slice) out.trace.push_back(te.event);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Entry points

inline SeqResult run_seq(const Comp& m, const Config& cfg, FuelPtr fuel = nullptr) {
    RunContext ctx(cfg, std::move(fuel));
    return ctx.run_seq_layer(m);
}

inline std::pair<Value, Trace> run_seq_pair(const Comp& m, const Config& cfg,
                                            FuelPtr fuel = nullptr) {
    SeqResult r = run_seq(m, cfg, std::move(fuel));
    return {r.value, r.trace};
}

inline ParReport run_par(const Comp& m, const Config& cfg, FuelPtr fuel = nullptr) {
    RunContext ctx(cfg, std::move(fuel));
    RunContext::ParLayerResult layer = ctx.run_par_layer(m);
    return ParReport{layer.value, layer.trace, layer.span, ctx.work_total()};
}

struct FlattenResult {
    std::vector<Trace> layers;  // one trace per peeled layer, outermost first
    Value value;                // the final base value
};

// Runs `m`, expects its value to be a computation, runs that, and so on for
// `depth` layers total, all against one shared store/scheduler.  Layer k+1's
// computation is whatever value layer k produced.
inline FlattenResult flatten_nested(const Comp& m, const Config& cfg, int depth = 2,
                                    bool parallel = false, FuelPtr fuel = nullptr) {
    RunContext ctx(cfg, std::move(fuel));
    FlattenResult out;
    Comp current = m;
    for (int layer = 0; layer < depth; ++layer) {
        Value v;
        if (parallel) {
            RunContext::ParLayerResult r = ctx.run_par_layer(current);
            out.layers.push_back(std::move(r.trace));
            v = r.value;
        } else {
            SeqResult r = ctx.run_seq_layer(current);
            out.layers.push_back(std::move(r.trace));
            v = r.value;
        }
        if (layer == depth - 1) {
            out.value = v;
            break;
        }
        if (!v.is_comp()) throw NotAComputationError();
        current = v.as_comp();
    }
    return out;
}

}  // namespace malias
