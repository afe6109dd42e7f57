#include <doctest.h>

#include "malias/run.hpp"

using namespace malias;

namespace {

Comp read_comp(std::string key) {
    return comp_step(ReadReq{std::move(key)}, [](const Value& v) { return comp_pure(v); });
}

Comp tick_comp(std::string label) {
    return comp_step(TickReq{std::move(label)}, [](const Value& v) { return comp_pure(v); });
}

}  // namespace

TEST_CASE("config parsing") {
    Config cfg = parse_config("# sizes\nnew_size = 1024\nlegacy_size = 512\nneg = -3\n");
    CHECK(cfg.lookup("new_size") == 1024);
    CHECK(cfg.lookup("neg") == -3);
    CHECK_THROWS_AS(cfg.lookup("absent"), MissingKeyError);
    CHECK_THROWS_WITH_AS(cfg.lookup("absent"),
                         "MissingKey: configuration has no entry for \"absent\"",
                         MissingKeyError);

    CHECK(parse_config("").entries.empty());
    CHECK(parse_config("\"quoted key\" = 7").lookup("quoted key") == 7);
    CHECK_THROWS_WITH_AS(parse_config("a = b"), doctest::Contains("line 1"), ConfigError);
    CHECK_THROWS_AS(parse_config("just_a_key"), ConfigError);
    CHECK_THROWS_AS(parse_config("a = 1\na = 2"), ConfigError);
}

TEST_CASE("run_seq performs effects in order") {
    Config cfg = parse_config("a = 7\nb = 2");

    SeqResult r = run_seq(read_comp("a"), cfg);
    CHECK(r.value.as_int() == 7);
    CHECK(r.trace == Trace{ev_read("a", 7)});

    r = run_seq(comp_unit(v_int(3)), cfg);
    CHECK(r.value.as_int() == 3);
    CHECK(r.trace.empty());

    Comp both = comp_bind(read_comp("a"), [](const Value& a) {
        return comp_bind(tick_comp("t"), [a](const Value&) {
            return comp_bind(read_comp("b"),
                             [a](const Value& b) { return comp_pure(v_int(a.as_int() + b.as_int())); });
        });
    });
    r = run_seq(both, cfg);
    CHECK(r.value.as_int() == 9);
    CHECK(r.trace == Trace{ev_read("a", 7), ev_tick("t"), ev_read("b", 2)});

    CHECK_THROWS_AS(run_seq(read_comp("zzz"), cfg), MissingKeyError);
}

TEST_CASE("monad laws hold observationally") {
    Config cfg = parse_config("k = 5");
    auto same = [&](const Comp& a, const Comp& b) {
        SeqResult ra = run_seq(a, cfg), rb = run_seq(b, cfg);
        return value_equal(ra.value, rb.value) && ra.trace == rb.trace;
    };
    auto k1 = [](const Value& v) { return comp_pure(v_int(v.as_int() * 2)); };
    auto k2 = [](const Value& v) {
        return comp_bind(comp_step(TickReq{"t"}, [](const Value& u) { return comp_pure(u); }),
                         [v](const Value&) { return comp_pure(v_int(v.as_int() + 1)); });
    };

    // left identity: bind (unit x) k == k x
    CHECK(same(comp_bind(comp_unit(v_int(3)), k2), k2(v_int(3))));
    // right identity: bind m unit == m
    CHECK(same(comp_bind(read_comp("k"), [](const Value& v) { return comp_pure(v); }),
               read_comp("k")));
    // associativity: bind (bind m k1) k2 == bind m (x -> bind (k1 x) k2)
    Comp m = read_comp("k");
    CHECK(same(comp_bind(comp_bind(m, k1), k2),
               comp_bind(m, [&](const Value& v) { return comp_bind(k1(v), k2); })));
}

TEST_CASE("map and join derive from bind") {
    Config cfg = parse_config("k = 5");
    SeqResult r = run_seq(comp_map(read_comp("k"),
                                   [](const Value& v) { return v_int(v.as_int() + 1); }),
                          cfg);
    CHECK(r.value.as_int() == 6);
    CHECK(r.trace == Trace{ev_read("k", 5)});

    // join (unit m) == m
    r = run_seq(comp_join(comp_unit(v_comp(read_comp("k")))), cfg);
    CHECK(r.value.as_int() == 5);
    CHECK(r.trace == Trace{ev_read("k", 5)});
}

TEST_CASE("cells are invisible in traces") {
    Config cfg;
    RunContext ctx(cfg);
    Comp m = comp_step(CellNewReq{v_int(10)}, [](const Value& id) {
        CellId c = id.as_int();
        return comp_step(CellWriteReq{c, v_int(42)}, [c](const Value&) {
            return comp_step(CellReadReq{c}, [](const Value& v) { return comp_pure(v); });
        });
    });
    SeqResult r = ctx.run_seq_layer(m);
    CHECK(r.value.as_int() == 42);
    CHECK(r.trace.empty());
    CHECK(ctx.cells_allocated() == 1);
    CHECK(ctx.cell_write_count(0) == 1);
}

TEST_CASE("run_par: spawn then get overlaps with nothing") {
    Config cfg = parse_config("a = 7");
    Comp m = comp_step(SpawnReq{read_comp("a")}, [](const Value& iv) {
        return comp_step(GetReq{iv.as_int()}, [](const Value& v) { return comp_pure(v); });
    });
    ParReport r = run_par(m, cfg);
    CHECK(r.value.as_int() == 7);
    CHECK(r.span == 1);
    CHECK(r.work == 1);
    CHECK(r.trace == Trace{ev_read("a", 7)});
}

TEST_CASE("run_par: two spawned reads run in the same tick") {
    Config cfg = parse_config("a = 7\nb = 2");
    Comp m = comp_step(SpawnReq{read_comp("a")}, [](const Value& iva) {
        return comp_step(SpawnReq{read_comp("b")}, [iva](const Value& ivb) {
            return comp_step(GetReq{iva.as_int()}, [ivb](const Value& a) {
                return comp_step(GetReq{ivb.as_int()}, [a](const Value& b) {
                    return comp_pure(v_int(a.as_int() + b.as_int()));
                });
            });
        });
    });
    ParReport r = run_par(m, cfg);
    CHECK(r.value.as_int() == 9);
    CHECK(r.span == 1);  // both reads happen during the same tick
    CHECK(r.work == 2);  // ...but two units of work were consumed
    // Events are ordered by (tick, task id): task 1 read a, task 2 read b.
    CHECK(r.trace == Trace{ev_read("a", 7), ev_read("b", 2)});
}

TEST_CASE("run_par on a spawn-free computation matches run_seq with span == work") {
    Config cfg = parse_config("a = 7\nb = 2");
    Comp m = comp_bind(read_comp("a"), [](const Value& a) {
        return comp_bind(tick_comp("t"), [a](const Value&) {
            return comp_bind(read_comp("b"),
                             [a](const Value& b) { return comp_pure(v_int(a.as_int() * b.as_int())); });
        });
    });
    SeqResult s = run_seq(m, cfg);
    ParReport p = run_par(m, cfg);
    CHECK(value_equal(s.value, p.value));
    CHECK(s.trace == p.trace);
    CHECK(p.span == 3);
    CHECK(p.work == 3);
}

TEST_CASE("run_par stops when the main task finishes; abandoned work still counts") {
    Config cfg = parse_config("a = 7");
    // Spawn a read, then finish without ever waiting for it: the spawned task
    // never gets a slot, so no work is consumed.
    Comp drop = comp_step(SpawnReq{read_comp("a")},
                          [](const Value&) { return comp_pure(v_int(0)); });
    ParReport r = run_par(drop, cfg);
    CHECK(r.value.as_int() == 0);
    CHECK(r.span == 0);
    CHECK(r.work == 0);
    CHECK(r.trace.empty());

    // If the main task blocks for a tick, the abandoned read does run.
    Comp blocked = comp_step(SpawnReq{read_comp("a")}, [](const Value&) {
        return comp_bind(tick_comp("t"), [](const Value&) { return comp_pure(v_int(0)); });
    });
    r = run_par(blocked, cfg);
    CHECK(r.value.as_int() == 0);
    CHECK(r.span == 1);
    CHECK(r.work == 2);
    CHECK(trace_multiset_equal(r.trace, Trace{ev_read("a", 7), ev_tick("t")}));
}

TEST_CASE("run_par reports deadlock when every task waits on an unfilled ivar") {
    Config cfg;
    // The main task tells a helper (through a cell) the id of the helper's own
    // result ivar; the helper then waits on it, so neither task can finish.
    Comp m = comp_step(CellNewReq{v_int(-1)}, [](const Value& cid) {
        CellId c = cid.as_int();
        Comp helper = comp_step(CellReadReq{c}, [](const Value& iv) {
            return comp_step(GetReq{iv.as_int()}, [](const Value& v) { return comp_pure(v); });
        });
        return comp_step(SpawnReq{helper}, [c](const Value& iva) {
            return comp_step(CellWriteReq{c, iva}, [iva](const Value&) {
                return comp_step(GetReq{iva.as_int()},
                                 [](const Value& v) { return comp_pure(v); });
            });
        });
    });
    CHECK_THROWS_AS(run_par(m, cfg), DeadlockError);
}

TEST_CASE("fuel limits runaway computations") {
    Config cfg;
    // An infinite effect loop: construction is lazy (the continuation builds
    // the next iteration only when the runner resumes it).
    std::function<Comp()> loop = [&loop]() {
        return comp_step(TickReq{"t"}, [&loop](const Value&) { return loop(); });
    };
    CHECK_THROWS_AS(run_seq(loop(), cfg, make_fuel(1000)), FuelError);
    CHECK_THROWS_AS(run_par(loop(), cfg, make_fuel(1000)), FuelError);
}

TEST_CASE("flatten_nested separates layers") {
    Config cfg = parse_config("k = 2");

    // Outer layer reads, inner layer is pure.
    Comp outer_read = comp_bind(read_comp("k"), [](const Value& v) {
        return comp_pure(v_comp(comp_pure(v)));
    });
    FlattenResult f = flatten_nested(outer_read, cfg, 2);
    REQUIRE(f.layers.size() == 2);
    CHECK(f.layers[0] == Trace{ev_read("k", 2)});
    CHECK(f.layers[1].empty());
    CHECK(f.value.as_int() == 2);

    // Outer layer pure, inner layer reads.
    Comp inner_read = comp_pure(v_comp(read_comp("k")));
    f = flatten_nested(inner_read, cfg, 2);
    CHECK(f.layers[0].empty());
    CHECK(f.layers[1] == Trace{ev_read("k", 2)});
    CHECK(f.value.as_int() == 2);

    // Fully pure nesting.
    f = flatten_nested(comp_unit(v_comp(comp_unit(v_int(9)))), cfg, 2);
    CHECK(f.layers[0].empty());
    CHECK(f.layers[1].empty());
    CHECK(f.value.as_int() == 9);

    // Depth 1 is just run_seq.
    f = flatten_nested(read_comp("k"), cfg, 1);
    REQUIRE(f.layers.size() == 1);
    CHECK(f.layers[0] == Trace{ev_read("k", 2)});

    // A layer that does not produce a computation is an error at depth > 1.
    CHECK_THROWS_AS(flatten_nested(comp_unit(v_int(1)), cfg, 2), NotAComputationError);
}

TEST_CASE("flatten_nested shares one store across layers") {
    Config cfg;
    // Outer layer allocates and writes a cell; inner layer reads it back.
    Comp m = comp_step(CellNewReq{v_int(5)}, [](const Value& id) {
        CellId c = id.as_int();
        return comp_pure(v_comp(
            comp_step(CellReadReq{c}, [](const Value& v) { return comp_pure(v); })));
    });
    FlattenResult f = flatten_nested(m, cfg, 2);
    CHECK(f.value.as_int() == 5);
}

TEST_CASE("trace serialization") {
    Trace t{ev_read("k", 7), ev_tick("l")};
    json j = trace_to_json(t);
    CHECK(j.dump() ==
          R"({"events":[{"type":"read","key":"k","value":7},{"type":"tick","label":"l"}]})");

    ParReport r{v_int(1), t, 2, 3};
    json pj = par_report_to_json(r);
    CHECK(pj["span"] == 2);
    CHECK(pj["work"] == 3);
    CHECK(pj["events"].size() == 2);
}

TEST_CASE("event and trace helpers") {
    CHECK(show_event(ev_read("k", 7)) == "read k=7");
    CHECK(show_event(ev_tick("t")) == "tick t");
    CHECK(show_trace(Trace{}) == "[]");
    CHECK(show_trace(Trace{ev_read("k", 7), ev_tick("t")}) == "[read k=7, tick t]");

    CHECK(trace_multiset_equal(Trace{ev_tick("a"), ev_tick("b")},
                               Trace{ev_tick("b"), ev_tick("a")}));
    CHECK_FALSE(trace_multiset_equal(Trace{ev_tick("a")}, Trace{ev_tick("a"), ev_tick("a")}));
    CHECK(trace_sub_multiset(Trace{ev_tick("a")}, Trace{ev_tick("b"), ev_tick("a")}));
    CHECK_FALSE(trace_sub_multiset(Trace{ev_tick("a"), ev_tick("a")},
                                   Trace{ev_tick("a"), ev_tick("b")}));
    CHECK(trace_sub_multiset(Trace{}, Trace{}));
}
