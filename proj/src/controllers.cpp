#include "stride/controllers.hpp"

#include <cmath>

#include "stride/numeric_ops.hpp"

namespace stride {

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

ControllerStep exit_step(const std::string& question, const std::string& text) {
    return ControllerStep{question, ThoughtUnit{text, {}, true}, {}};
}

ControllerStep make_step(std::string question, std::string text, std::vector<PlannedCall> calls) {
    ThoughtUnit thought;
    thought.text = std::move(text);
    for (const auto& c : calls) thought.operations.push_back(c.op);
    return ControllerStep{std::move(question), std::move(thought), std::move(calls)};
}

double scalar_result(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw OpError("bad-result", "expected a scalar operation result");
}

const Vector& vector_result(const Value& v) {
    if (const auto* p = std::get_if<Vector>(&v)) return *p;
    throw OpError("bad-result", "expected a list operation result");
}

}  // namespace

void run_step(Session& session, const ControllerStep& step) {
    ValidationResult check = validate_thought(step.thought, session.registry);
    if (!check.ok()) throw OpError("invalid-thought", join(check.violations));
    if (step.calls.size() != step.thought.operations.size()) {
        throw OpError("invalid-thought", "planned calls do not match the operation list");
    }
    for (std::size_t i = 0; i < step.calls.size(); ++i) {
        if (step.calls[i].op != step.thought.operations[i]) {
            throw OpError("invalid-thought", "planned calls do not match the operation list");
        }
    }
    session.begin_record(step.question, step.thought);
    for (const auto& call : step.calls) session.invoke(call.op, call.args);
}

Trace run_controller(ScriptedController& controller, Session& session) {
    while (!controller.finished()) run_step(session, controller.next(session));
    return session.trace;
}

// ---------------------------------------------------------------- VI --

ControllerStep ViController::next(Session& session) {
    if (exited_) throw OpError("already-exited", "VI controller has finished");
    const std::string question = "Compute the Optimal Policy.";
    if (!started_) {
        started_ = true;
        h_ = session.memory.read_int("mdp/H");
    }
    if (h_ >= 1) {
        int h = h_--;
        std::string text =
            "Now we can continue to compute the Q-values for the current step h=" +
            std::to_string(h) +
            ". I should first call UpdateQbyR to add the immediate reward, then call UpdateQbyPV "
            "to add the one-step look-ahead value, and finally call UpdateV to take the maximum "
            "over actions.";
        Json args{{"time_step", h}};
        return make_step(question, std::move(text),
                         {{"UpdateQbyR", args}, {"UpdateQbyPV", args}, {"UpdateV", args}});
    }
    exited_ = true;
    return exit_step(question,
                     "The backward induction has reached step h=1, so the Q and V values for all "
                     "steps are computed and the optimal policy can be read off by taking the "
                     "argmax. Exit the reasoning process.");
}

// ------------------------------------------------------------ UCB-VI --

UcbviController::UcbviController(EnvSession& env, int episodes) : env_(env), K_(episodes) {
    if (episodes < 1) throw OpError("bad-config", "need at least one episode");
}

ControllerStep UcbviController::next(Session& session) {
    if (exited_) throw OpError("already-exited", "UCB-VI controller has finished");
    const MdpInstance& inst = env_.instance();

    switch (phase_) {
        case Phase::Reset: {
            phase_ = Phase::Plan;
            plan_h_ = inst.H;
            return make_step("Compute the Optimal Policy.",
                             "Episode " + std::to_string(k_) +
                                 ": before the optimistic planning pass I should reset the Q and "
                                 "V estimates to zero.",
                             {{"ResetTables", Json::object()}});
        }
        case Phase::Plan: {
            int h = plan_h_--;
            if (plan_h_ == 0) {
                phase_ = Phase::ActQuery;
                act_h_ = 1;
                env_.reset();
                returns_.push_back(0.0);
            }
            Json args{{"time_step", h}};
            return make_step(
                "Compute the Optimal Policy.",
                "Now we can continue to compute the Q-values for the current step h=" +
                    std::to_string(h) +
                    " using the estimated model. I should call UpdateQbyR and UpdateQbyPV on the "
                    "estimations, add the exploration bonus with UpdateQbyBonus, and then call "
                    "UpdateV which also clips the value at H-h+1.",
                {{"UpdateQbyR", args},
                 {"UpdateQbyPV", args},
                 {"UpdateQbyBonus", args},
                 {"UpdateV", args}});
        }
        case Phase::ActQuery: {
            pending_state_ = env_.current_state();
            phase_ = Phase::ActUpdate;
            return make_step(
                "Which action I should take?",
                "The current state is s=" + std::to_string(pending_state_) + " at step h=" +
                    std::to_string(act_h_) +
                    ". I should retrieve the Q values for all actions and act greedily.",
                {{"GetQ", Json{{"time_step", act_h_}, {"cur_state", pending_state_}}}});
        }
        case Phase::ActUpdate: {
            const Vector& row = vector_result(session.last_results.at(0));
            pending_action_ = get_arg_max(row).front();
            returns_.back() += inst.R.at(pending_state_, pending_action_);
            auto [r, s_next] = env_.step(pending_action_);
            pending_reward_ = r;
            pending_next_ = s_next;
            ++act_h_;
            if (act_h_ > inst.H) {
                ++k_;
                phase_ = k_ > K_ ? Phase::Done : Phase::Reset;
            } else {
                phase_ = Phase::ActQuery;
            }
            return make_step("Update estimations of P and R.",
                             "I took action a=" + std::to_string(pending_action_) +
                                 " and observed the next state and a noisy reward. I should call "
                                 "UpdateMDPModel to update the estimated transition and reward "
                                 "functions with this observation.",
                             {{"UpdateMDPModel", Json{{"s", pending_state_},
                                                      {"a", pending_action_},
                                                      {"s_prime", pending_next_},
                                                      {"r", pending_reward_}}}});
        }
        case Phase::Done:
            break;
    }
    exited_ = true;
    return exit_step("Update estimations of P and R.",
                     "All " + std::to_string(K_) +
                         " episodes are finished and the model estimates are up to date. Exit "
                         "the reasoning process.");
}

// --------------------------------------------------------------- VCG --

ControllerStep VcgController::next(Session& session) {
    if (exited_) throw OpError("already-exited", "VCG controller has finished");
    if (!started_) {
        started_ = true;
        N_ = session.memory.read_int("vcg/N");
        H_ = session.memory.read_int("mdp/H");
        pass_ = 0;
        plan_h_ = H_;
    }

    if (collecting_price_) {
        const Vector& row = vector_result(session.last_results.at(0));
        double v_excl = row[0];
        for (std::size_t a = 1; a < row.size(); ++a) v_excl = std::max(v_excl, row[a]);
        double evaluated = scalar_result(session.last_results.at(1));
        prices_.push_back(v_excl - evaluated);
        collecting_price_ = false;
        ++price_agent_;
    }

    if (pass_ <= N_) {
        Json excluded = pass_ == 0 ? Json(nullptr) : Json(pass_ - 1);
        std::string question = pass_ == 0
                                   ? "Compute the socially optimal policy."
                                   : "Compute the optimal policy excluding agent " +
                                         std::to_string(pass_ - 1) + ".";
        int h = plan_h_--;
        if (plan_h_ == 0) {
            ++pass_;
            plan_h_ = H_;
            if (pass_ > N_) price_agent_ = 0;
        }
        Json args{{"time_step", h}, {"excluded_agent", excluded}};
        std::string who = excluded.is_null() ? "all agents" : "all agents except agent " +
                                                                  excluded.dump();
        return make_step(question,
                         "Now we can continue to compute the Q-values for the current step h=" +
                             std::to_string(h) + " on the summed reported rewards of " + who +
                             ", then update the V values.",
                         {{"UpdateQbyRExcluding", args},
                          {"UpdateQbyPVExcluding", args},
                          {"UpdateVExcluding", args}});
    }

    if (price_agent_ < N_) {
        collecting_price_ = true;
        int i = price_agent_;
        int s1 = session.memory.read_int("mdp/s1");
        return make_step(
            "Now compute the VCG price for agent " + std::to_string(i) + ".",
            "The price of agent " + std::to_string(i) +
                " is the optimal social value without them minus the value the chosen policy "
                "gives the others. I should retrieve the excluded Q values at the initial state "
                "and evaluate the optimal policy on the excluded rewards.",
            {{"GetQExcluding",
              Json{{"time_step", 1}, {"cur_state", s1}, {"excluded_agent", i}}},
             {"EvaluatePolicyExcluding", Json{{"excluded_agent", i}}}});
    }

    exited_ = true;
    return exit_step("Now compute the VCG price for agent " + std::to_string(N_ - 1) + ".",
                     "The optimal policies and the VCG prices of all agents are computed. Exit "
                     "the reasoning process.");
}

// --------------------------------------------------------------- SPE --

ControllerStep SpeController::next(Session& session) {
    if (exited_) throw OpError("already-exited", "SPE controller has finished");
    const std::string question = "Compute the SPE Prices via Backward Induction.";
    if (!started_) {
        started_ = true;
        T_ = session.memory.read_int("bargain/T");
        t_ = T_;
    }

    if (price_pending_) {
        last_price_ = scalar_result(session.last_results.back());
        price_pending_ = false;
        --t_;
    }

    if (util_pending_) {
        util_pending_ = false;
        price_pending_ = true;
        double opp_u = scalar_result(session.last_results.at(0));
        Role proposer = proposer_at(t_);
        return make_step(
            question,
            "With the opponent's utility from rejecting, I can call BackwardOneStep to compute "
            "the SPE price the " +
                role_name(proposer) + " offers at time step " + std::to_string(t_) + ".",
            {{"BackwardOneStep",
              Json{{"agent", role_name(proposer)}, {"op_u", opp_u}, {"t", t_}}}});
    }

    if (t_ >= 1) {
        Role proposer = proposer_at(t_);
        if (t_ == T_) {
            price_pending_ = true;
            return make_step(
                question,
                "We start from the last time step t=" + std::to_string(t_) +
                    ". If the offer is rejected both players get 0, so the opponent's utility is "
                    "0 and the " +
                    role_name(proposer) + " can claim the whole surplus with BackwardOneStep.",
                {{"BackwardOneStep",
                  Json{{"agent", role_name(proposer)}, {"op_u", 0.0}, {"t", t_}}}});
        }
        util_pending_ = true;
        Role opponent = proposer == Role::Buyer ? Role::Seller : Role::Buyer;
        return make_step(
            question,
            "Moving to time step t=" + std::to_string(t_) + ". The " + role_name(opponent) +
                " can reject and propose at t+1, so I should call CalcUtil to compute their "
                "utility from the next price " +
                std::to_string(last_price_) + " at step " + std::to_string(t_ + 1) + ".",
            {{"CalcUtil",
              Json{{"agent", role_name(opponent)}, {"price", last_price_}, {"t", t_ + 1}}}});
    }

    exited_ = true;
    return exit_step(question,
                     "The backward induction has reached t=1, so the SPE prices for every time "
                     "step are stored. Exit the reasoning process.");
}

// ---------------------------------------------------------------- SE --

ControllerStep SeController::next(Session& session) {
    if (exited_) throw OpError("already-exited", "SE controller has finished");
    const std::string question = "Compute the SE Prices via Bisection Search and Backward Induction.";

    switch (phase_) {
        case Phase::Start: {
            T_ = session.memory.read_int("bargain_inc/T");
            if (T_ >= 2) {
                lo_ = 0.0;
                hi_ = 1.0;
                guess_ = 0.5;
                iterations_ = 1;
                phase_ = Phase::Bisect;
                return make_step(
                    question,
                    "To find the belief sequence I run a bisection search on b_{T-1}. Start from "
                    "the midpoint guess " +
                        std::to_string(guess_) +
                        " and run the belief recursion back to b_0 with ComputeBt.",
                    {{"ComputeBt", Json{{"time_step", 1}, {"b_last", guess_}}}});
            }
            guess_ = 1.0;
            phase_ = Phase::SolveLast;
            return make_step(question,
                             "With a single time step the seller screens nobody: the belief stays "
                             "at 1 and SolveLast gives the price and expected utility directly.",
                             {{"SolveLast", Json{{"b_last", guess_}}}});
        }
        case Phase::Bisect: {
            double b0 = scalar_result(session.last_results.at(0));
            if (std::abs(b0 - 1.0) < kBisectionTolerance) {
                phase_ = Phase::SolveLast;
                return make_step(
                    question,
                    "The recursion now gives b_0' within the tolerance of 1, so the belief "
                    "sequence is consistent. Start the backward pass with SolveLast at t=" +
                        std::to_string(T_) + ".",
                    {{"SolveLast", Json{{"b_last", guess_}}}});
            }
            if (iterations_ >= kBisectionMaxIterations) {
                throw OpError("bisection-failure", "no convergence; degenerate parameters");
            }
            if (b0 <= 1.0) {
                lo_ = guess_;
            } else {
                hi_ = guess_;
            }
            guess_ = (lo_ + hi_) / 2.0;
            ++iterations_;
            return make_step(question,
                             "b_0' = " + std::to_string(b0) +
                                 (b0 <= 1.0 ? " is below 1, so I raise the lower bracket"
                                            : " exceeds 1, so I lower the upper bracket") +
                                 " and try the new midpoint " + std::to_string(guess_) + ".",
                             {{"ComputeBt", Json{{"time_step", 1}, {"b_last", guess_}}}});
        }
        case Phase::SolveLast:
        case Phase::Solve: {
            const Vector& res = vector_result(session.last_results.at(0));
            u_next_ = res[0];
            p_next_ = res[1];
            t_ = phase_ == Phase::SolveLast ? T_ - 1 : t_ - 1;
            if (t_ >= 1) {
                phase_ = Phase::Solve;
                return make_step(
                    question,
                    "Continue the backward pass at t=" + std::to_string(t_) +
                        ": Solve combines the next price and utility with the belief cutoffs to "
                        "get the current price and the seller's expected utility.",
                    {{"Solve", Json{{"u", u_next_}, {"p", p_next_}, {"t", t_}}}});
            }
            phase_ = Phase::Done;
            break;
        }
        case Phase::Done:
            break;
    }
    exited_ = true;
    return exit_step(question,
                     "The backward pass has reached t=1, so the SE price schedule is stored. "
                     "Exit the reasoning process.");
}

// ----------------------------------------------------------- minimax --

ControllerStep MinimaxController::next(Session& session) {
    if (exited_) throw OpError("already-exited", "minimax controller has finished");
    const std::string question = "Which action I should take?";
    if (step_ == 0) {
        ++step_;
        return make_step(question,
                         "I should expand every action at each depth from the current board and "
                         "calculate the minimax scores with alpha-beta pruning.",
                         {{"CalculateScores", Json::object()}});
    }
    if (step_ == 1) {
        ++step_;
        return make_step(question,
                         "The scores are computed; retrieve the exact scores of the immediate "
                         "moves at depth 1.",
                         {{"GetScores", Json{{"depth", 1}}}});
    }
    const std::string* text = std::get_if<std::string>(&session.last_results.at(0));
    if (text == nullptr) throw OpError("bad-result", "expected GetScores output");
    Json layer = Json::parse(*text);
    bool maximizing = session.memory.read_string("game/to_move") == "X";
    std::map<int, int> scores;
    for (const auto& [key, entry] : layer.items()) {
        scores[std::stoi(key)] = entry.at("score").get<int>();
    }
    int best_score = maximizing ? -2 : 2;
    for (const auto& [m, sc] : scores) {
        bool better = maximizing ? sc > best_score : sc < best_score;
        if (better) {
            move_ = m;
            best_score = sc;
        }
    }
    exited_ = true;
    return exit_step(question, "The best score among the immediate moves is " +
                                   std::to_string(best_score) + ", achieved by move " +
                                   std::to_string(move_) + ". I will take that move and exit.");
}

int MinimaxController::chosen_move() const {
    if (move_ < 0) throw OpError("no-legal-moves", "controller has not chosen a move");
    return move_;
}

// ----------------------------------------------------------- helpers --

int act_greedy(Session& session, int h, int state) {
    ControllerStep step = make_step(
        "Which action I should take?",
        "The current state is s=" + std::to_string(state) + " at step h=" + std::to_string(h) +
            ". I should retrieve the Q values for all actions and act greedily.",
        {{"GetQ", Json{{"time_step", h}, {"cur_state", state}}}});
    run_step(session, step);
    return get_arg_max(vector_result(session.last_results.at(0))).front();
}

int vcg_greedy_action(Session& session, int h, int state) {
    ControllerStep step = make_step(
        "Which action I should take?",
        "The mechanism acts with the socially optimal policy: retrieve the Q values on the full "
        "reported rewards and take the greedy action.",
        {{"GetQExcluding",
          Json{{"time_step", h}, {"cur_state", state}, {"excluded_agent", nullptr}}}});
    run_step(session, step);
    return get_arg_max(vector_result(session.last_results.at(0))).front();
}

void register_all_ops(Registry& registry) {
    register_numeric_ops(registry);
    register_mdp_ops(registry);
    register_vcg_ops(registry);
    register_bargain_ops(registry);
    register_bargain_inc_ops(registry);
    register_game_ops(registry);
}

Session make_session(const std::string& module, const Json& instance) {
    Session session;
    register_all_ops(session.registry);
    if (module == "mdp-known") {
        init_mdp_memory(session.memory, MdpInstance::from_json(instance), EnvMode::KnownModel);
    } else if (module == "mdp-unknown") {
        MdpInstance inst = MdpInstance::from_json(instance.at("mdp"));
        init_mdp_memory(session.memory, inst, EnvMode::UnknownModel);
        init_learner_memory(session.memory, inst.S, inst.A, instance.at("K").get<int>());
    } else if (module == "vcg") {
        init_vcg_memory(session.memory, MechanismInstance::from_json(instance));
    } else if (module == "bargain") {
        init_bargain_memory(session.memory, CompleteBargainInstance::from_json(instance));
    } else if (module == "bargain-incomplete") {
        init_bargain_inc_memory(session.memory, IncompleteBargainInstance::from_json(instance));
    } else if (module == "boardgame") {
        init_game_memory(session.memory, node_from_json(instance));
    } else {
        throw OpError("unknown-module", module);
    }
    return session;
}

Json Demonstration::to_json() const {
    return Json{{"module", module}, {"instance", instance}, {"trace", trace.to_jsonl()}};
}

Demonstration Demonstration::from_json(const Json& j) {
    Demonstration d;
    d.module = j.at("module").get<std::string>();
    d.instance = j.at("instance");
    d.trace = Trace::from_jsonl(j.at("trace").get<std::string>());
    return d;
}

Demonstration generate_demonstration(const std::string& module, const Json& instance) {
    Session session = make_session(module, instance);
    if (module == "mdp-known") {
        ViController c;
        run_controller(c, session);
    } else if (module == "mdp-unknown") {
        MdpInstance inst = MdpInstance::from_json(instance.at("mdp"));
        EnvSession env(inst, EnvMode::UnknownModel,
                       instance.value("env_seed", static_cast<std::uint64_t>(0)));
        UcbviController c(env, instance.at("K").get<int>());
        run_controller(c, session);
    } else if (module == "vcg") {
        VcgController c;
        run_controller(c, session);
    } else if (module == "bargain") {
        SpeController c;
        run_controller(c, session);
    } else if (module == "bargain-incomplete") {
        SeController c;
        run_controller(c, session);
    } else if (module == "boardgame") {
        MinimaxController c;
        run_controller(c, session);
    } else {
        throw OpError("unknown-module", module);
    }
    return Demonstration{module, instance, session.trace};
}

}  // namespace stride
