#include <doctest.h>

#include "stride/controllers.hpp"
#include "stride/harness.hpp"

using namespace stride;

namespace {

void check_trace_validates(const Trace& trace, const Registry& registry) {
    for (const TraceRecord& rec : trace.records) {
        CHECK(validate_thought(rec.thought, registry).ok());
        CHECK(rec.thought.operations.size() == rec.calls.size());
    }
    REQUIRE_FALSE(trace.records.empty());
    CHECK(trace.records.back().thought.exit);
}

void check_replay_matches(const std::string& module, const Json& instance, const Session& ran) {
    Session fresh = make_session(module, instance);
    replay_trace(ran.trace, fresh);
    CHECK(fresh.memory == ran.memory);
}

}  // namespace

TEST_CASE("vi controller reproduces solve_known") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MdpInstance inst = generate_instance(3, 3, 4, seed);
        Session sess = make_session("mdp-known", inst.to_json());
        ViController ctl;
        run_controller(ctl, sess);
        check_trace_validates(sess.trace, sess.registry);

        auto [tables, policy] = solve_known(inst);
        (void)policy;
        WorkingMemory expected;
        init_mdp_memory(expected, inst, EnvMode::KnownModel);
        expected.write("mdp/Q", tables.Q);
        expected.write("mdp/V", tables.V);
        CHECK(sess.memory == expected);
        check_replay_matches("mdp-known", inst.to_json(), sess);
    }
}

TEST_CASE("ucbvi controller reproduces the direct learner") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MdpInstance inst = generate_instance(3, 2, 4, seed);
        const int K = 5;
        Json instance{{"mdp", inst.to_json()}, {"K", K}, {"env_seed", seed + 1000}};

        Session sess = make_session("mdp-unknown", instance);
        EnvSession env(inst, EnvMode::UnknownModel, seed + 1000);
        UcbviController ctl(env, K);
        run_controller(ctl, sess);
        check_trace_validates(sess.trace, sess.registry);

        EnvSession env2(inst, EnvMode::UnknownModel, seed + 1000);
        LearnerState learner(inst.S, inst.A, K);
        ValueTables tables(inst.H, inst.S, inst.A);
        std::vector<double> returns;
        for (int k = 0; k < K; ++k) returns.push_back(ucbvi_episode(env2, learner, tables));

        CHECK(ctl.episode_returns() == returns);
        CHECK(sess.memory.read_tensor("mdp/Q") == tables.Q);
        CHECK(sess.memory.read_matrix("mdp/V") == tables.V);
        CHECK(sess.memory.read_matrix("mdp/N_sa") == learner.N_sa);
        CHECK(sess.memory.read_tensor("mdp/N_sas") == learner.N_sas);
        CHECK(sess.memory.read_tensor("mdp/P_hat") == learner.P_hat);
        CHECK(sess.memory.read_matrix("mdp/R_hat") == learner.R_hat);
        // The observations were recorded in the trace, so the replay does
        // not need the environment.
        check_replay_matches("mdp-unknown", instance, sess);
    }
}

TEST_CASE("vcg controller reproduces compute_vcg") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MechanismInstance m = generate_mechanism_instance(3, 3, 2, 3, seed);
        Session sess = make_session("vcg", m.to_json());
        VcgController ctl;
        run_controller(ctl, sess);
        check_trace_validates(sess.trace, sess.registry);

        VcgOutcome out = compute_vcg(m);
        CHECK(ctl.prices() == out.prices);

        WorkingMemory expected;
        init_vcg_memory(expected, m);
        std::vector<std::optional<int>> exclusions{std::nullopt};
        for (int i = 0; i < m.N; ++i) exclusions.push_back(i);
        for (const auto& excl : exclusions) {
            MdpInstance social = m.base;
            social.R = summed_rewards(m, excl);
            auto [tables, policy] = solve_known(social);
            (void)policy;
            expected.write("vcg/Q/" + exclusion_key(excl), tables.Q);
            expected.write("vcg/V/" + exclusion_key(excl), tables.V);
        }
        CHECK(sess.memory == expected);
        check_replay_matches("vcg", m.to_json(), sess);
    }
}

TEST_CASE("spe controller reproduces compute_spe") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CompleteBargainInstance inst = sample_complete_bargain(3 + static_cast<int>(seed % 4),
                                                               seed);
        Session sess = make_session("bargain", inst.to_json());
        SpeController ctl;
        run_controller(ctl, sess);
        check_trace_validates(sess.trace, sess.registry);

        SpeSchedule sched = compute_spe(inst);
        CHECK(sess.memory.read_vector("bargain/prices") == sched.prices);

        // Backward induction takes exactly one BackwardOneStep per round.
        int backward_calls = 0;
        for (const TraceRecord& rec : sess.trace.records) {
            for (const CallRecord& call : rec.calls) {
                if (call.op == "BackwardOneStep") ++backward_calls;
            }
        }
        CHECK(backward_calls == inst.T);
        check_replay_matches("bargain", inst.to_json(), sess);
    }
}

TEST_CASE("se controller reproduces compute_se") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        IncompleteBargainInstance inst = sample_incomplete_bargain(3 + static_cast<int>(seed % 3),
                                                                   seed);
        Session sess = make_session("bargain-incomplete", inst.to_json());
        SeController ctl;
        run_controller(ctl, sess);
        check_trace_validates(sess.trace, sess.registry);

        SeSchedule sched = compute_se(inst);
        CHECK(ctl.iterations() == sched.bisection_iterations);
        CHECK(sess.memory.read_vector("bargain_inc/beliefs") == sched.beliefs);
        CHECK(sess.memory.read_vector("bargain_inc/prices") == sched.prices);
        CHECK(sess.memory.read_vector("bargain_inc/seller_values") == sched.seller_values);
        check_replay_matches("bargain-incomplete", inst.to_json(), sess);
    }
}

TEST_CASE("minimax controller reproduces the direct search") {
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
        GameNode node = random_position(GameVariant::TicTacToe, 3, 3, 3, rng);
        Session sess = make_session("boardgame", node_to_json(node));
        MinimaxController ctl;
        run_controller(ctl, sess);
        check_trace_validates(sess.trace, sess.registry);

        CHECK(ctl.chosen_move() == best_move(node, node.to_move));
        CHECK(sess.memory.read_string("game/scores") == search_scores(node).serialize());
        check_replay_matches("boardgame", node_to_json(node), sess);
    }
}

TEST_CASE("run_step rejects invalid thoughts") {
    Session sess = make_session("mdp-known", generate_instance(2, 2, 2, 0).to_json());
    ControllerStep bad;
    bad.thought = ThoughtUnit{"?", {"NoSuchOp"}, false};
    bad.calls = {{"NoSuchOp", Json::object()}};
    CHECK_THROWS_WITH_AS(run_step(sess, bad), doctest::Contains("invalid-thought"), OpError);

    ControllerStep mismatch;
    mismatch.thought = ThoughtUnit{"?", {"UpdateQbyR"}, false};
    mismatch.calls = {{"UpdateV", Json{{"time_step", 1}}}};
    CHECK_THROWS_WITH_AS(run_step(sess, mismatch), doctest::Contains("invalid-thought"), OpError);
}

TEST_CASE("demonstrations round trip and replay") {
    MdpInstance inst = generate_instance(2, 2, 3, 8);
    Demonstration demo = generate_demonstration("mdp-known", inst.to_json());
    Demonstration back = Demonstration::from_json(demo.to_json());
    CHECK(back.module == demo.module);
    CHECK(back.instance == demo.instance);
    CHECK(back.trace.to_jsonl() == demo.trace.to_jsonl());

    Session replayed = make_session(back.module, back.instance);
    replay_trace(back.trace, replayed);
    auto [tables, policy] = solve_known(inst);
    (void)policy;
    CHECK(replayed.memory.read_tensor("mdp/Q") == tables.Q);

    CHECK_THROWS_WITH_AS(generate_demonstration("nonsense", Json::object()),
                         doctest::Contains("unknown-module"), OpError);
}
