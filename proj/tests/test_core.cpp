#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stride/memory.hpp"
#include "stride/numeric_ops.hpp"
#include "stride/session.hpp"
#include "stride/thought.hpp"
#include "stride/trace.hpp"
#include "stride/value.hpp"

using namespace stride;

TEST_CASE("value json round trip") {
    Vector v{1.0, -2.5, 3.25};
    Matrix m(2, 3);
    m.at(1, 2) = 0.125;
    Tensor3 t(2, 2, 2);
    t.at(1, 0, 1) = -7.0;

    CHECK(std::get<Vector>(value_from_json(value_to_json(Value{v}))) == v);
    CHECK(std::get<Matrix>(value_from_json(value_to_json(Value{m}))) == m);
    CHECK(std::get<Tensor3>(value_from_json(value_to_json(Value{t}))) == t);
    CHECK(std::get<double>(value_from_json(value_to_json(Value{3.5}))) == 3.5);
    CHECK(std::get<std::string>(value_from_json(value_to_json(Value{std::string("hi")}))) == "hi");
    CHECK(std::holds_alternative<std::monostate>(value_from_json(value_to_json(Value{}))));
}

TEST_CASE("memory rejects shape changes and missing keys") {
    WorkingMemory mem;
    mem.write("k", Vector{1.0, 2.0});
    CHECK_NOTHROW(mem.write("k", Vector{3.0, 4.0}));
    CHECK_THROWS_WITH_AS(mem.write("k", Vector{1.0, 2.0, 3.0}), doctest::Contains("shape-mismatch"),
                         OpError);
    CHECK_THROWS_WITH_AS(mem.write("k", Value{1.0}), doctest::Contains("shape-mismatch"), OpError);
    CHECK_THROWS_WITH_AS(mem.read("absent"), doctest::Contains("missing-key"), OpError);
    // Strings are shape-free: re-writing with a different length is legal.
    mem.write("s", std::string("short"));
    CHECK_NOTHROW(mem.write("s", std::string("a much longer replacement")));
}

TEST_CASE("registry schema validation") {
    Registry reg;
    register_numeric_ops(reg);
    WorkingMemory mem;

    CHECK_THROWS_WITH_AS(reg.invoke("NoSuchOp", Json::object(), mem),
                         doctest::Contains("unknown-op"), OpError);
    CHECK_THROWS_WITH_AS(reg.invoke("GetMax", Json::object(), mem),
                         doctest::Contains("schema-mismatch"), OpError);
    CHECK_THROWS_WITH_AS(reg.invoke("GetMax", Json{{"values", "nope"}}, mem),
                         doctest::Contains("schema-mismatch"), OpError);
    CHECK_THROWS_WITH_AS(reg.invoke("GetMax", Json{{"values", Json::array({1.0})}, {"extra", 1}},
                                    mem),
                         doctest::Contains("schema-mismatch"), OpError);
    Value out = reg.invoke("GetMax", Json{{"values", Json::array({1.0, 4.0, 2.0})}}, mem);
    CHECK(std::get<double>(out) == 4.0);
}

TEST_CASE("thought validation") {
    Registry reg;
    register_numeric_ops(reg);

    ThoughtUnit fine{"take the max", {"GetMax"}, false};
    CHECK(validate_thought(fine, reg).ok());

    ThoughtUnit premature{"done", {"GetMax"}, true};
    auto r1 = validate_thought(premature, reg);
    REQUIRE_FALSE(r1.ok());
    CHECK(r1.violations[0] == "premature-exit");

    ThoughtUnit bogus{"?", {"Nonsense", "GetMax", "AlsoNonsense"}, false};
    auto r2 = validate_thought(bogus, reg);
    REQUIRE(r2.violations.size() == 2);
    CHECK(r2.violations[0] == "unknown-op:Nonsense");
    CHECK(r2.violations[1] == "unknown-op:AlsoNonsense");

    ThoughtUnit exit_only{"finished", {}, true};
    CHECK(validate_thought(exit_only, reg).ok());

    CHECK(thought_from_json(thought_to_json(bogus)) == bogus);
}

TEST_CASE("argmax and max semantics") {
    CHECK(get_arg_max({1.0, 3.0, 3.0, 2.0}) == std::vector<int>{1, 2});
    CHECK(get_arg_max({5.0}) == std::vector<int>{0});
    // Values within 1e-9 of the max are ties.
    CHECK(get_arg_max({1.0, 1.0 - 5e-10}) == std::vector<int>{0, 1});
    CHECK(get_arg_max({1.0, 1.0 - 5e-9}) == std::vector<int>{0});
    CHECK(get_max({-3.0, -1.5, -2.0}) == -1.5);
    CHECK_THROWS_WITH_AS(get_arg_max({}), doctest::Contains("empty-list"), OpError);
    CHECK_THROWS_WITH_AS(get_max({}), doctest::Contains("empty-list"), OpError);
}

TEST_CASE("trace jsonl round trip") {
    Trace trace;
    TraceRecord rec;
    rec.question = "What now?";
    rec.thought = ThoughtUnit{"compute", {"GetMax"}, false};
    rec.calls.push_back(CallRecord{"GetMax", Json{{"values", Json::array({1.0, 2.0})}},
                                   Json(2.0)});
    trace.records.push_back(rec);
    TraceRecord done;
    done.thought = ThoughtUnit{"finished", {}, true};
    trace.records.push_back(done);

    std::string text = trace.to_jsonl();
    Trace back = Trace::from_jsonl(text);
    REQUIRE(back.records.size() == 2);
    CHECK(back.records[0].question == "What now?");
    CHECK(back.records[0].thought == rec.thought);
    REQUIRE(back.records[0].calls.size() == 1);
    CHECK(back.records[0].calls[0].op == "GetMax");
    CHECK(back.records[0].calls[0].args == rec.calls[0].args);
    CHECK(back.records[0].calls[0].result == Json(2.0));
    CHECK(back.records[1].thought.exit);
    CHECK(back.to_jsonl() == text);
}

TEST_CASE("session records and replays") {
    Session sess;
    register_numeric_ops(sess.registry);
    sess.begin_record("pick", ThoughtUnit{"argmax then max", {"GetArgMax", "GetMax"}, false});
    sess.invoke("GetArgMax", Json{{"values", Json::array({1.0, 9.0, 9.0})}});
    sess.invoke("GetMax", Json{{"values", Json::array({1.0, 9.0, 9.0})}});
    REQUIRE(sess.last_results.size() == 2);
    CHECK(std::get<Vector>(sess.last_results[0]) == Vector{1.0, 2.0});
    CHECK(std::get<double>(sess.last_results[1]) == 9.0);

    // begin_record clears the previous step's results.
    sess.begin_record("", ThoughtUnit{"done", {}, true});
    CHECK(sess.last_results.empty());

    Session replayed;
    register_numeric_ops(replayed.registry);
    replay_trace(sess.trace, replayed);
    CHECK(replayed.memory == sess.memory);
}
