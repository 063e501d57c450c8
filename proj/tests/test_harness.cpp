#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stride/harness.hpp"
#include "stride/numeric_ops.hpp"

using namespace stride;

TEST_CASE("samplers are deterministic and cover the documented ranges") {
    CHECK(sample_complete_bargain(3, 5).delta_b == sample_complete_bargain(3, 5).delta_b);
    CHECK(sample_incomplete_bargain(3, 5).buyer_value ==
          sample_incomplete_bargain(3, 5).buyer_value);

    double db_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        CompleteBargainInstance c = sample_complete_bargain(4, seed);
        CHECK(c.delta_b >= 0.5);
        CHECK(c.delta_b < 1.0);
        CHECK(c.delta_s >= 0.5);
        CHECK(c.delta_s < 1.0);
        db_sum += c.delta_b;
        IncompleteBargainInstance inc = sample_incomplete_bargain(4, seed);
        CHECK(inc.buyer_value >= 0.1);
        CHECK(inc.buyer_value < 0.9);
    }
    CHECK(std::abs(db_sum / 1000.0 - 0.75) < 0.02);
}

TEST_CASE("eval_optimal_action counts argmax hits") {
    MdpInstance inst = generate_instance(3, 3, 3, 2);
    auto [tables, policy] = solve_known(inst);
    std::vector<StepRecord> traj;
    for (int h = 1; h <= inst.H; ++h) {
        traj.push_back(StepRecord{h, 0, policy.at(h, 0), 0.0, 0});
    }
    CHECK(eval_optimal_action(traj, tables) == 1.0);
    // Perturb one action off the argmax set.
    auto optimal = [&](int h, int s) {
        std::vector<double> row(inst.A);
        for (int a = 0; a < inst.A; ++a) row[a] = tables.q(h, s, a);
        return get_arg_max(row);
    };
    std::vector<int> best_actions = optimal(1, 0);
    int bad = 0;
    while (std::find(best_actions.begin(), best_actions.end(), bad) != best_actions.end()) {
        ++bad;
    }
    traj[0].a = bad;
    CHECK(eval_optimal_action(traj, tables) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(eval_optimal_action({}, tables), doctest::Contains("length-mismatch"),
                         OpError);
}

TEST_CASE("eval_vcg enforces both the policy and the prices") {
    MechanismInstance m = generate_mechanism_instance(2, 2, 2, 2, 3);
    VcgOutcome oracle = compute_vcg(m);
    MdpInstance social = m.base;
    social.R = summed_rewards(m, std::nullopt);
    auto [tables, policy] = solve_known(social);
    (void)tables;

    std::vector<StepRecord> traj;
    int s = m.base.s1;
    for (int h = 1; h <= m.base.H; ++h) {
        traj.push_back(StepRecord{h, s, policy.at(h, s), 0.0, 0});
    }
    CHECK(eval_vcg(traj, oracle.prices, m, oracle));

    std::vector<double> off = oracle.prices;
    off[0] += 0.02;  // outside the 1e-2 price tolerance
    CHECK_FALSE(eval_vcg(traj, off, m, oracle));
    std::vector<double> near = oracle.prices;
    near[0] += 0.005;  // inside it
    CHECK(eval_vcg(traj, near, m, oracle));

    CHECK_THROWS_WITH_AS(eval_vcg(traj, {0.0}, m, oracle), doctest::Contains("dimension-mismatch"),
                         OpError);
}

TEST_CASE("bargain evaluators reject off-schedule play") {
    CompleteBargainInstance inst = sample_complete_bargain(3, 9);
    SpeSchedule sched = compute_spe(inst);
    std::vector<BargainEvent> good{{1, Role::Buyer, sched.price(1), Response::Accept}};
    CHECK(eval_bargain_complete(good, sched));
    std::vector<BargainEvent> wrong_price{
        {1, Role::Buyer, sched.price(1) + 0.01, Response::Accept}};
    CHECK_FALSE(eval_bargain_complete(wrong_price, sched));
    std::vector<BargainEvent> late{{2, Role::Seller, sched.price(2), Response::Accept}};
    CHECK_FALSE(eval_bargain_complete(late, sched));

    IncompleteBargainInstance inc = sample_incomplete_bargain(3, 9);
    SeSchedule se = compute_se(inc);
    auto transcript = play_incomplete_bargain(inc);
    CHECK(eval_bargain_incomplete(transcript, inc, se));
    auto off = transcript;
    off[0].price += 0.01;
    CHECK_FALSE(eval_bargain_incomplete(off, inc, se));
    std::vector<BargainEvent> shuffled{{2, Role::Seller, se.price(2), Response::Reject}};
    CHECK_THROWS_WITH_AS(eval_bargain_incomplete(shuffled, inc, se),
                         doctest::Contains("malformed-transcript"), OpError);
}

TEST_CASE("experiments aggregate per kind") {
    ExperimentConfig cfg;
    cfg.kind = "mdp-known";
    cfg.H = 3;
    cfg.S = 2;
    cfg.A = 2;
    cfg.instances = 3;
    MetricsReport known = run_experiment(cfg);
    REQUIRE(known.records.size() == 3);
    CHECK(known.aggregate.at("mean_success_rate").get<double>() == 1.0);

    cfg.kind = "bargain";
    cfg.T = 3;
    MetricsReport bargain = run_experiment(cfg);
    CHECK(bargain.aggregate.at("success_rate").get<double>() == 1.0);

    cfg.kind = "bargain-incomplete";
    MetricsReport inc = run_experiment(cfg);
    CHECK(inc.aggregate.at("success_rate").get<double>() == 1.0);

    cfg.kind = "vcg";
    cfg.N = 2;
    MetricsReport vcg = run_experiment(cfg);
    CHECK(vcg.aggregate.at("success_rate").get<double>() == 1.0);

    cfg.kind = "boardgame";
    cfg.instances = 2;
    MetricsReport board = run_experiment(cfg);
    CHECK(board.aggregate.at("draw_rate").get<double>() == 1.0);

    cfg.kind = "mdp-unknown";
    cfg.instances = 2;
    cfg.K = 8;
    MetricsReport unknown = run_experiment(cfg);
    CHECK(unknown.aggregate.at("mean_return_per_episode").size() == 8);
    CHECK(unknown.aggregate.at("mean_tail_ratio").get<double>() > 0.0);

    cfg.kind = "nonsense";
    CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("unknown-module"), OpError);
    cfg.kind = "mdp-known";
    cfg.instances = 0;
    CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("bad-config"), OpError);
}

TEST_CASE("identical configs produce byte-identical reports and files") {
    ExperimentConfig cfg;
    cfg.kind = "bargain";
    cfg.T = 4;
    cfg.instances = 5;
    cfg.seed = 123;

    MetricsReport a = run_experiment(cfg);
    MetricsReport b = run_experiment(cfg);
    CHECK(a.records_jsonl() == b.records_jsonl());
    CHECK(a.aggregate_csv() == b.aggregate_csv());

    auto out_dir = std::filesystem::temp_directory_path() / "stride_harness_test";
    std::filesystem::remove_all(out_dir);
    cfg.out_dir = out_dir.string();
    MetricsReport c = run_experiment(cfg);
    std::ifstream rec(out_dir / "records.jsonl");
    std::stringstream rec_text;
    rec_text << rec.rdbuf();
    CHECK(rec_text.str() == c.records_jsonl());
    std::ifstream agg(out_dir / "aggregate.csv");
    std::stringstream agg_text;
    agg_text << agg.rdbuf();
    CHECK(agg_text.str() == c.aggregate_csv());
    std::filesystem::remove_all(out_dir);
}
