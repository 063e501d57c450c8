#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stride/mechanism_vcg.hpp"
#include "stride/session.hpp"

using namespace stride;

TEST_CASE("prices match brute-force policy enumeration") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MechanismInstance m = generate_mechanism_instance(2, 2, 2, 2, seed);
        VcgOutcome out = compute_vcg(m);
        oracles::VcgBrute brute = oracles::vcg_by_enumeration(m);
        CHECK(std::abs(out.social_value - brute.social_value) <= 1e-9);
        REQUIRE(out.prices.size() == brute.prices.size());
        for (std::size_t i = 0; i < out.prices.size(); ++i) {
            CHECK(std::abs(out.prices[i] - brute.prices[i]) <= 1e-9);
        }
    }
}

TEST_CASE("a lone agent pays nothing") {
    MechanismInstance m = generate_mechanism_instance(1, 3, 2, 3, 4);
    VcgOutcome out = compute_vcg(m);
    REQUIRE(out.prices.size() == 1);
    CHECK(std::abs(out.prices[0]) <= 1e-12);
}

TEST_CASE("prices are nonnegative externalities") {
    for (int N : {2, 4, 6}) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            MechanismInstance m = generate_mechanism_instance(N, 3, 3, 5, seed * 7 + N);
            VcgOutcome out = compute_vcg(m);
            for (double p : out.prices) CHECK(p >= -1e-12);
            // Utilities decompose as on-path value minus price.
            for (int i = 0; i < N; ++i) {
                Policy pi = out.pi_star;
                Matrix own(m.base.S, m.base.A);
                for (int s = 0; s < m.base.S; ++s) {
                    for (int a = 0; a < m.base.A; ++a) own.at(s, a) = m.R_agents.at(i, s, a);
                }
                double on_path = evaluate_policy(m.base.P, own, m.base.H, m.base.s1, pi);
                CHECK(out.utilities[i] ==
                      doctest::Approx(on_path - out.prices[i]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("excluding nobody reduces to plain value iteration") {
    MechanismInstance m = generate_mechanism_instance(3, 3, 2, 4, 9);
    Matrix sum = summed_rewards(m, std::nullopt);
    MdpInstance social = m.base;
    social.R = sum;
    auto [tables, policy] = solve_known(social);
    (void)policy;
    VcgOutcome out = compute_vcg(m);
    CHECK(out.social_value == tables.v(1, social.s1));
}

TEST_CASE("summed rewards drop exactly the excluded agent") {
    MechanismInstance m = generate_mechanism_instance(3, 2, 2, 2, 12);
    Matrix all = summed_rewards(m, std::nullopt);
    Matrix no1 = summed_rewards(m, 1);
    for (int s = 0; s < m.base.S; ++s) {
        for (int a = 0; a < m.base.A; ++a) {
            CHECK(all.at(s, a) - no1.at(s, a) ==
                  doctest::Approx(m.R_agents.at(1, s, a)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_WITH_AS(summed_rewards(m, 3), doctest::Contains("agent-out-of-range"), OpError);
}

TEST_CASE("op path reproduces compute_vcg tables bitwise") {
    MechanismInstance m = generate_mechanism_instance(2, 3, 2, 3, 15);
    Session sess;
    register_vcg_ops(sess.registry);
    init_vcg_memory(sess.memory, m);

    auto pass = [&](Json excluded) {
        for (int h = m.base.H; h >= 1; --h) {
            sess.begin_record("", ThoughtUnit{"", {"UpdateQbyRExcluding", "UpdateQbyPVExcluding",
                                                   "UpdateVExcluding"},
                                              false});
            Json args{{"time_step", h}, {"excluded_agent", excluded}};
            sess.invoke("UpdateQbyRExcluding", args);
            sess.invoke("UpdateQbyPVExcluding", args);
            sess.invoke("UpdateVExcluding", args);
        }
    };
    pass(nullptr);
    pass(0);
    pass(1);

    VcgOutcome out = compute_vcg(m);
    for (int i = 0; i < m.N; ++i) {
        sess.begin_record("", ThoughtUnit{"", {"GetQExcluding", "EvaluatePolicyExcluding"}, false});
        Value row = sess.invoke(
            "GetQExcluding", Json{{"time_step", 1}, {"cur_state", m.base.s1}, {"excluded_agent", i}});
        double excl_best = 0.0;
        bool first = true;
        for (double q : std::get<Vector>(row)) {
            if (first || q > excl_best) excl_best = q;
            first = false;
        }
        double on_path = std::get<double>(sess.invoke("EvaluatePolicyExcluding",
                                                      Json{{"excluded_agent", i}}));
        CHECK(excl_best - on_path == out.prices[i]);
    }
}
