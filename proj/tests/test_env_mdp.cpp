#include <doctest.h>

#include <cmath>

#include "stride/env_mdp.hpp"

using namespace stride;

TEST_CASE("generation is deterministic in the seed") {
    MdpInstance a = generate_instance(4, 3, 5, 42);
    MdpInstance b = generate_instance(4, 3, 5, 42);
    MdpInstance c = generate_instance(4, 3, 5, 43);
    CHECK(a.P == b.P);
    CHECK(a.R == b.R);
    CHECK(a.P.data != c.P.data);
}

TEST_CASE("generated instances are valid mdps") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MdpInstance inst = generate_instance(3, 3, 5, seed);
        CHECK_NOTHROW(inst.validate());
        for (int s = 0; s < inst.S; ++s) {
            for (int a = 0; a < inst.A; ++a) {
                double sum = 0.0;
                for (int sp = 0; sp < inst.S; ++sp) {
                    double p = inst.P.at(s, a, sp);
                    CHECK(p >= 0.0);
                    sum += p;
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(inst.R.at(s, a) >= 0.0);
                CHECK(inst.R.at(s, a) <= 1.0);
            }
        }
        CHECK(inst.s1 == 0);
    }
}

TEST_CASE("instance json round trip") {
    MdpInstance inst = generate_instance(3, 2, 4, 7);
    MdpInstance back = MdpInstance::from_json(inst.to_json());
    CHECK(back.S == inst.S);
    CHECK(back.A == inst.A);
    CHECK(back.H == inst.H);
    CHECK(back.P == inst.P);
    CHECK(back.R == inst.R);
    CHECK(back.s1 == inst.s1);
}

TEST_CASE("deterministic dynamics step one-hot") {
    // Two states, one action, deterministic swap. Rewards distinguish states.
    MdpInstance inst;
    inst.S = 2;
    inst.A = 1;
    inst.H = 4;
    inst.P = Tensor3(2, 1, 2);
    inst.P.at(0, 0, 1) = 1.0;
    inst.P.at(1, 0, 0) = 1.0;
    inst.R = Matrix(2, 1);
    inst.R.at(0, 0) = 0.25;
    inst.R.at(1, 0) = 0.75;
    inst.s1 = 0;

    EnvSession sess(inst, EnvMode::KnownModel, 0);
    CHECK(sess.current_state() == 0);
    auto [r1, s1] = sess.step(0);
    CHECK(r1 == 0.25);
    CHECK(s1 == 1);
    auto [r2, s2] = sess.step(0);
    CHECK(r2 == 0.75);
    CHECK(s2 == 0);
    sess.step(0);
    sess.step(0);
    CHECK(sess.done());
    CHECK_THROWS_WITH_AS(sess.step(0), doctest::Contains("episode-over"), OpError);
    CHECK(sess.reset() == 0);
    CHECK_FALSE(sess.done());
    CHECK(sess.episode_log().empty());
}

TEST_CASE("reward noise appears only in unknown mode") {
    MdpInstance inst = generate_instance(3, 2, 5, 11);

    EnvSession known(inst, EnvMode::KnownModel, 5);
    auto [r, s_next] = known.step(0);
    (void)s_next;
    CHECK(r == inst.R.at(inst.s1, 0));

    // With Gaussian noise the observation essentially never matches exactly.
    EnvSession unknown(inst, EnvMode::UnknownModel, 5);
    auto [rn, sn] = unknown.step(0);
    (void)sn;
    CHECK(rn != inst.R.at(inst.s1, 0));
    // But the step log keeps the noisy observation, reproducibly.
    EnvSession unknown2(inst, EnvMode::UnknownModel, 5);
    auto [rn2, sn2] = unknown2.step(0);
    CHECK(rn2 == rn);
    CHECK(sn2 == sn);
}

TEST_CASE("action bounds checked") {
    MdpInstance inst = generate_instance(2, 2, 3, 0);
    EnvSession sess(inst, EnvMode::KnownModel, 0);
    CHECK_THROWS_WITH_AS(sess.step(2), doctest::Contains("action-out-of-range"), OpError);
    CHECK_THROWS_WITH_AS(sess.step(-1), doctest::Contains("action-out-of-range"), OpError);
}

TEST_CASE("init_mdp_memory lays out the mdp namespace") {
    MdpInstance inst = generate_instance(3, 2, 4, 3);
    WorkingMemory mem;
    init_mdp_memory(mem, inst, EnvMode::KnownModel);
    CHECK(mem.read_int("mdp/S") == 3);
    CHECK(mem.read_int("mdp/A") == 2);
    CHECK(mem.read_int("mdp/H") == 4);
    CHECK(mem.read_tensor("mdp/P") == inst.P);
    CHECK(mem.read_matrix("mdp/R") == inst.R);
    const Tensor3& Q = mem.read_tensor("mdp/Q");
    CHECK(Q.d0 == 4);
    CHECK(Q.d1 == 3);
    CHECK(Q.d2 == 2);
    const Matrix& V = mem.read_matrix("mdp/V");
    CHECK(V.rows == 5);  // includes the terminal row
    CHECK(V.cols == 3);
}

TEST_CASE("rng helpers stay in range") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        double u = rng.uniform(0.5, 1.0);
        CHECK(u >= 0.5);
        CHECK(u < 1.0);
        int k = rng.uniform_int(2, 5);
        CHECK(k >= 2);
        CHECK(k <= 5);
    }
}
