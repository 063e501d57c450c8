#include "stride/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "stride/numeric_ops.hpp"

namespace stride {

namespace {

// Per-instance env seeds decorrelated from the instance-generation seed.
constexpr std::uint64_t kEnvSeedSalt = 0x5bd1e995u;

ControllerStep price_query(const std::string& op, int t) {
    ThoughtUnit thought;
    thought.text = "Retrieve the computed price for time step t=" + std::to_string(t) + ".";
    thought.operations = {op};
    return ControllerStep{"Which price should be offered?", thought, {{op, Json{{"t", t}}}}};
}

double run_price_query(Session& session, const std::string& op, int t) {
    run_step(session, price_query(op, t));
    return std::get<double>(session.last_results.at(0));
}

}  // namespace

void ExperimentConfig::validate() const {
    if (instances < 1 || H < 1 || S < 1 || A < 1 || N < 1 || T < 1 || K < 1) {
        throw OpError("bad-config", "all experiment counts must be >= 1");
    }
}

std::string MetricsReport::records_jsonl() const {
    std::string out;
    for (const auto& rec : records) {
        out += Json{{"seed", rec.seed}, {"data", rec.data}}.dump();
        out += '\n';
    }
    return out;
}

std::string MetricsReport::aggregate_csv() const {
    std::string out = "metric,value\n";
    for (const auto& [key, value] : aggregate.items()) {
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                out += key + "_" + std::to_string(i + 1) + "," + value.at(i).dump() + "\n";
            }
        } else {
            out += key + "," + value.dump() + "\n";
        }
    }
    return out;
}

CompleteBargainInstance sample_complete_bargain(int T, std::uint64_t seed) {
    Rng rng(seed);
    CompleteBargainInstance inst;
    inst.delta_b = rng.uniform(0.5, 1.0);
    inst.delta_s = rng.uniform(0.5, 1.0);
    inst.T = T;
    inst.validate();
    return inst;
}

IncompleteBargainInstance sample_incomplete_bargain(int T, std::uint64_t seed) {
    Rng rng(seed);
    IncompleteBargainInstance inst;
    inst.delta_b = rng.uniform(0.5, 1.0);
    inst.delta_s = rng.uniform(0.5, 1.0);
    inst.T = T;
    inst.buyer_value = rng.uniform(0.1, 0.9);
    inst.validate();
    return inst;
}

double eval_optimal_action(const std::vector<StepRecord>& trajectory, const ValueTables& oracle) {
    if (trajectory.empty()) throw OpError("length-mismatch", "empty trajectory");
    int hits = 0;
    for (const StepRecord& step : trajectory) {
        std::vector<double> row(oracle.Q.d2);
        for (std::size_t a = 0; a < oracle.Q.d2; ++a) row[a] = oracle.q(step.h, step.s, a);
        std::vector<int> optimal = get_arg_max(row);
        if (std::find(optimal.begin(), optimal.end(), step.a) != optimal.end()) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trajectory.size());
}

bool eval_vcg(const std::vector<StepRecord>& trajectory, const std::vector<double>& prices,
              const MechanismInstance& instance, const VcgOutcome& oracle) {
    if (prices.size() != oracle.prices.size() ||
        prices.size() != static_cast<std::size_t>(instance.N)) {
        throw OpError("dimension-mismatch", "price vector does not match the agent count");
    }
    MdpInstance social = instance.base;
    social.R = summed_rewards(instance, std::nullopt);
    if (eval_optimal_action(trajectory, solve_known(social).first) < 1.0) return false;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (std::abs(prices[i] - oracle.prices[i]) > 1e-2) return false;
    }
    return true;
}

bool eval_bargain_complete(const std::vector<BargainEvent>& transcript,
                           const SpeSchedule& schedule) {
    if (transcript.empty()) throw OpError("malformed-transcript", "no events");
    const BargainEvent& first = transcript.front();
    return first.t == 1 && first.response == Response::Accept &&
           std::abs(first.price - schedule.price(1)) <= kBargainPriceTolerance;
}

bool eval_bargain_incomplete(const std::vector<BargainEvent>& transcript,
                             const IncompleteBargainInstance& instance,
                             const SeSchedule& schedule) {
    if (transcript.empty()) throw OpError("malformed-transcript", "no events");
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        const BargainEvent& ev = transcript[i];
        if (ev.t != static_cast<int>(i) + 1 || ev.proposer != Role::Seller) {
            throw OpError("malformed-transcript", "seller must offer at t=1..T in order");
        }
        if (std::abs(ev.price - schedule.price(ev.t)) > kBargainPriceTolerance) return false;
        if (ev.response != buyer_respond(instance, ev.price, ev.t, schedule)) return false;
        if (ev.response == Response::Accept && i + 1 != transcript.size()) {
            throw OpError("malformed-transcript", "events after an acceptance");
        }
    }
    return true;
}

std::vector<BargainEvent> play_complete_bargain(const CompleteBargainInstance& instance) {
    Json instance_json = instance.to_json();
    Session buyer = make_session("bargain", instance_json);
    Session seller = make_session("bargain", instance_json);
    {
        SpeController c;
        run_controller(c, buyer);
    }
    {
        SpeController c;
        run_controller(c, seller);
    }
    std::vector<BargainEvent> transcript;
    for (int t = 1; t <= instance.T; ++t) {
        Role proposer = proposer_at(t);
        Session& offerer = proposer == Role::Buyer ? buyer : seller;
        Session& responder = proposer == Role::Buyer ? seller : buyer;
        double p = run_price_query(offerer, "GetSPEPrice", t);
        SpeSchedule responder_schedule;
        responder_schedule.prices = responder.memory.read_vector("bargain/prices");
        Role responder_role = proposer == Role::Buyer ? Role::Seller : Role::Buyer;
        Response resp = respond_to_offer(instance, responder_role, p, t, responder_schedule);
        transcript.push_back(BargainEvent{t, proposer, p, resp});
        if (resp == Response::Accept) break;
    }
    return transcript;
}

std::vector<BargainEvent> play_incomplete_bargain(const IncompleteBargainInstance& instance) {
    Session seller = make_session("bargain-incomplete", instance.to_json());
    {
        SeController c;
        run_controller(c, seller);
    }
    // The buyer best-responds against the public equilibrium schedule.
    SeSchedule schedule;
    schedule.prices = seller.memory.read_vector("bargain_inc/prices");
    std::vector<BargainEvent> transcript;
    for (int t = 1; t <= instance.T; ++t) {
        double p = run_price_query(seller, "GetSEPrice", t);
        Response resp = buyer_respond(instance, p, t, schedule);
        transcript.push_back(BargainEvent{t, Role::Seller, p, resp});
        if (resp == Response::Accept) break;
    }
    return transcript;
}

namespace {

void run_mdp_known(const ExperimentConfig& cfg, MetricsReport& report) {
    double total = 0.0;
    for (int i = 0; i < cfg.instances; ++i) {
        std::uint64_t iseed = cfg.seed + static_cast<std::uint64_t>(i);
        MdpInstance inst = generate_instance(cfg.S, cfg.A, cfg.H, iseed);
        Session session = make_session("mdp-known", inst.to_json());
        ViController controller;
        run_controller(controller, session);
        EnvSession env(inst, EnvMode::KnownModel, iseed ^ kEnvSeedSalt);
        for (int h = 1; h <= cfg.H; ++h) {
            env.step(act_greedy(session, h, env.current_state()));
        }
        double rate = eval_optimal_action(env.episode_log(), solve_known(inst).first);
        total += rate;
        report.records.push_back(InstanceRecord{iseed, Json{{"success_rate", rate}}});
    }
    report.aggregate["mean_success_rate"] = total / cfg.instances;
}

void run_mdp_unknown(const ExperimentConfig& cfg, MetricsReport& report) {
    double ratio_total = 0.0;
    std::vector<double> episode_means(cfg.K, 0.0);
    for (int i = 0; i < cfg.instances; ++i) {
        std::uint64_t iseed = cfg.seed + static_cast<std::uint64_t>(i);
        MdpInstance inst = generate_instance(cfg.S, cfg.A, cfg.H, iseed);
        Json instance_json{{"mdp", inst.to_json()}, {"K", cfg.K}, {"env_seed", iseed ^ kEnvSeedSalt}};
        Session session = make_session("mdp-unknown", instance_json);
        EnvSession env(inst, EnvMode::UnknownModel, iseed ^ kEnvSeedSalt);
        UcbviController controller(env, cfg.K);
        run_controller(controller, session);
        const std::vector<double>& returns = controller.episode_returns();
        for (int k = 0; k < cfg.K; ++k) episode_means[k] += returns[k] / cfg.instances;
        double v_star = solve_known(inst).first.v(1, inst.s1);
        int tail = std::min(10, cfg.K);
        double last = std::accumulate(returns.end() - tail, returns.end(), 0.0) / tail;
        double ratio = last / v_star;
        ratio_total += ratio;
        report.records.push_back(InstanceRecord{
            iseed, Json{{"returns", returns}, {"v_star", v_star}, {"tail_mean", last},
                        {"ratio", ratio}}});
    }
    report.aggregate["mean_tail_ratio"] = ratio_total / cfg.instances;
    report.aggregate["mean_return_per_episode"] = episode_means;
}

void run_vcg(const ExperimentConfig& cfg, MetricsReport& report) {
    int successes = 0;
    for (int i = 0; i < cfg.instances; ++i) {
        std::uint64_t iseed = cfg.seed + static_cast<std::uint64_t>(i);
        MechanismInstance m = generate_mechanism_instance(cfg.N, cfg.S, cfg.A, cfg.H, iseed);
        Session session = make_session("vcg", m.to_json());
        VcgController controller;
        run_controller(controller, session);
        VcgOutcome oracle = compute_vcg(m);
        EnvSession env(m.base, EnvMode::KnownModel, iseed ^ kEnvSeedSalt);
        for (int h = 1; h <= cfg.H; ++h) {
            env.step(vcg_greedy_action(session, h, env.current_state()));
        }
        bool success = eval_vcg(env.episode_log(), controller.prices(), m, oracle);
        successes += success ? 1 : 0;
        report.records.push_back(InstanceRecord{
            iseed, Json{{"success", success}, {"prices", controller.prices()},
                        {"oracle_prices", oracle.prices}}});
    }
    report.aggregate["success_rate"] = static_cast<double>(successes) / cfg.instances;
}

Json transcript_json(const std::vector<BargainEvent>& transcript) {
    Json arr = Json::array();
    for (const BargainEvent& ev : transcript) {
        arr.push_back(Json{{"t", ev.t},
                           {"proposer", role_name(ev.proposer)},
                           {"price", ev.price},
                           {"response", ev.response == Response::Accept ? "accept" : "reject"}});
    }
    return arr;
}

void run_bargain(const ExperimentConfig& cfg, MetricsReport& report, bool incomplete) {
    int successes = 0;
    for (int i = 0; i < cfg.instances; ++i) {
        std::uint64_t iseed = cfg.seed + static_cast<std::uint64_t>(i);
        bool success;
        Json record;
        if (incomplete) {
            IncompleteBargainInstance inst = sample_incomplete_bargain(cfg.T, iseed);
            std::vector<BargainEvent> transcript = play_incomplete_bargain(inst);
            success = eval_bargain_incomplete(transcript, inst, compute_se(inst));
            record = Json{{"instance", inst.to_json()}, {"transcript", transcript_json(transcript)},
                          {"success", success}};
        } else {
            CompleteBargainInstance inst = sample_complete_bargain(cfg.T, iseed);
            std::vector<BargainEvent> transcript = play_complete_bargain(inst);
            success = eval_bargain_complete(transcript, compute_spe(inst));
            record = Json{{"instance", inst.to_json()}, {"transcript", transcript_json(transcript)},
                          {"success", success}};
        }
        successes += success ? 1 : 0;
        report.records.push_back(InstanceRecord{iseed, std::move(record)});
    }
    report.aggregate["success_rate"] = static_cast<double>(successes) / cfg.instances;
}

void run_boardgame(const ExperimentConfig& cfg, MetricsReport& report) {
    int draws = 0;
    for (int i = 0; i < cfg.instances; ++i) {
        GameNode node = make_empty_node(GameVariant::TicTacToe, 3, 3, 3);
        int moves = 0;
        while (!terminal_utility(node)) {
            Session session = make_session("boardgame", node_to_json(node));
            MinimaxController controller;
            run_controller(controller, session);
            node = apply_move(node, controller.chosen_move());
            ++moves;
        }
        int result = *terminal_utility(node);
        draws += result == 0 ? 1 : 0;
        report.records.push_back(InstanceRecord{
            cfg.seed + static_cast<std::uint64_t>(i),
            Json{{"result", result}, {"moves", moves}, {"final", board_text(node)}}});
    }
    report.aggregate["draw_rate"] = static_cast<double>(draws) / cfg.instances;
}

}  // namespace

MetricsReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    MetricsReport report;
    report.config = config;
    report.aggregate = Json::object();

    if (config.kind == "mdp-known") {
        run_mdp_known(config, report);
    } else if (config.kind == "mdp-unknown") {
        run_mdp_unknown(config, report);
    } else if (config.kind == "vcg") {
        run_vcg(config, report);
    } else if (config.kind == "bargain") {
        run_bargain(config, report, false);
    } else if (config.kind == "bargain-incomplete") {
        run_bargain(config, report, true);
    } else if (config.kind == "boardgame") {
        run_boardgame(config, report);
    } else {
        throw OpError("unknown-module", config.kind);
    }

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        std::ofstream rec(std::filesystem::path(config.out_dir) / "records.jsonl");
        rec << report.records_jsonl();
        std::ofstream agg(std::filesystem::path(config.out_dir) / "aggregate.csv");
        agg << report.aggregate_csv();
    }
    return report;
}

}  // namespace stride
