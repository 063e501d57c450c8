#include "stride/planner_mdp.hpp"

#include <algorithm>
#include <cmath>

#include "stride/numeric_ops.hpp"

namespace stride {

LearnerState::LearnerState(int S, int A, int K_total)
    : N_sa(S, A),
      N_sas(S, A, S),
      P_hat(S, A, S, 1.0 / static_cast<double>(S)),
      R_hat(S, A),
      K(K_total) {}

void kernel_add_reward(Tensor3& Q, int h, const Matrix& R) {
    const int S = static_cast<int>(Q.d1);
    const int A = static_cast<int>(Q.d2);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) Q.at(h - 1, s, a) += R.at(s, a);
    }
}

void kernel_add_lookahead(Tensor3& Q, int h, const Tensor3& P, const Matrix& V) {
    const int S = static_cast<int>(Q.d1);
    const int A = static_cast<int>(Q.d2);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double acc = 0.0;
            for (int sp = 0; sp < S; ++sp) {
                acc += P.at(s, a, sp) * V.at(h, sp);  // row h is V_{h+1}
            }
            Q.at(h - 1, s, a) += acc;
        }
    }
}

void kernel_max_over_actions(Matrix& V, int h, const Tensor3& Q, std::optional<double> clip) {
    const int S = static_cast<int>(Q.d1);
    const int A = static_cast<int>(Q.d2);
    for (int s = 0; s < S; ++s) {
        double best = Q.at(h - 1, s, 0);
        for (int a = 1; a < A; ++a) best = std::max(best, Q.at(h - 1, s, a));
        if (clip) best = std::min(best, *clip);
        V.at(h - 1, s) = best;
    }
}

double exploration_bonus(double n, int h, int H, int S, int A, int K, double bonus_scale,
                         double confidence) {
    double log_term = std::log(static_cast<double>(S) * A * H * K / confidence);
    return bonus_scale * (H - h + 1) * std::sqrt(log_term / std::max(n, 1.0));
}

void kernel_add_bonus(Tensor3& Q, int h, const Matrix& N_sa, int H, int S, int A, int K,
                      double bonus_scale, double confidence) {
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double n = N_sa.at(s, a);
            if (n == 0.0) {
                // Never visited: maximal optimism instead of an infinite bonus.
                Q.at(h - 1, s, a) = static_cast<double>(H - h + 1);
            } else {
                Q.at(h - 1, s, a) += exploration_bonus(n, h, H, S, A, K, bonus_scale, confidence);
            }
        }
    }
}

void update_model(LearnerState& learner, int s, int a, int s_next, double r) {
    const int S = static_cast<int>(learner.P_hat.d2);
    learner.N_sa.at(s, a) += 1.0;
    learner.N_sas.at(s, a, s_next) += 1.0;
    double n = learner.N_sa.at(s, a);
    for (int sp = 0; sp < S; ++sp) {
        learner.P_hat.at(s, a, sp) = learner.N_sas.at(s, a, sp) / n;
    }
    learner.R_hat.at(s, a) = learner.R_hat.at(s, a) * (n - 1.0) / n + r / n;
}

std::pair<ValueTables, Policy> solve_known(const MdpInstance& instance) {
    instance.validate();
    const int H = instance.H, S = instance.S, A = instance.A;
    ValueTables tables(H, S, A);
    for (int h = H; h >= 1; --h) {
        kernel_add_reward(tables.Q, h, instance.R);
        kernel_add_lookahead(tables.Q, h, instance.P, tables.V);
        kernel_max_over_actions(tables.V, h, tables.Q, std::nullopt);
    }
    Policy pi(H, S);
    for (int h = 1; h <= H; ++h) {
        for (int s = 0; s < S; ++s) {
            std::vector<double> row(A);
            for (int a = 0; a < A; ++a) row[a] = tables.q(h, s, a);
            pi.at(h, s) = get_arg_max(row).front();
        }
    }
    return {std::move(tables), std::move(pi)};
}

double evaluate_policy(const Tensor3& P, const Matrix& R, int H, int s1, const Policy& pi) {
    const int S = static_cast<int>(P.d0);
    if (pi.H != H || pi.S != S) throw OpError("invalid-policy", "policy shape mismatch");
    for (int idx : pi.table) {
        if (idx < 0 || idx >= static_cast<int>(P.d1)) {
            throw OpError("invalid-policy", "action index out of range");
        }
    }
    std::vector<double> v(S, 0.0);
    for (int h = H; h >= 1; --h) {
        std::vector<double> v_prev(S, 0.0);
        for (int s = 0; s < S; ++s) {
            int a = pi.at(h, s);
            double acc = R.at(s, a);
            for (int sp = 0; sp < S; ++sp) acc += P.at(s, a, sp) * v[sp];
            v_prev[s] = acc;
        }
        v = std::move(v_prev);
    }
    return v[s1];
}

Policy greedy_policy(const ValueTables& tables, int H, int S, int A) {
    Policy pi(H, S);
    for (int h = 1; h <= H; ++h) {
        for (int s = 0; s < S; ++s) {
            std::vector<double> row(A);
            for (int a = 0; a < A; ++a) row[a] = tables.q(h, s, a);
            pi.at(h, s) = get_arg_max(row).front();
        }
    }
    return pi;
}

void ucbvi_plan(ValueTables& tables, const LearnerState& learner, int H, int S, int A) {
    tables.Q = Tensor3(H, S, A);
    tables.V = Matrix(H + 1, S);
    for (int h = H; h >= 1; --h) {
        kernel_add_reward(tables.Q, h, learner.R_hat);
        kernel_add_lookahead(tables.Q, h, learner.P_hat, tables.V);
        kernel_add_bonus(tables.Q, h, learner.N_sa, H, S, A, learner.K, learner.bonus_scale,
                         learner.confidence);
        kernel_max_over_actions(tables.V, h, tables.Q, static_cast<double>(H - h + 1));
    }
}

double ucbvi_episode(EnvSession& sess, LearnerState& learner, ValueTables& tables) {
    const MdpInstance& inst = sess.instance();
    ucbvi_plan(tables, learner, inst.H, inst.S, inst.A);
    sess.reset();
    double true_return = 0.0;
    for (int h = 1; h <= inst.H; ++h) {
        int s = sess.current_state();
        std::vector<double> row(inst.A);
        for (int a = 0; a < inst.A; ++a) row[a] = tables.q(h, s, a);
        int a = get_arg_max(row).front();
        true_return += inst.R.at(s, a);
        auto [r, s_next] = sess.step(a);
        update_model(learner, s, a, s_next, r);
    }
    return true_return;
}

namespace {

int check_step(const Json& args, const WorkingMemory& mem) {
    int h = args.at("time_step").get<int>();
    int H = mem.read_int("mdp/H");
    if (h < 1 || h > H) {
        throw OpError("out-of-horizon", "time_step " + std::to_string(h) + " with H=" +
                                            std::to_string(H));
    }
    return h;
}

bool unknown_mode(const WorkingMemory& mem) { return mem.read_string("mdp/mode") == "unknown"; }

}  // namespace

void register_mdp_ops(Registry& registry) {
    registry.register_op(
        OpDescriptor{"UpdateQbyR",
                     "add reward R(s,a) to Q_h(s,a) for all (s,a) pairs at the specified time step",
                     {{"time_step", ArgType::Int}},
                     "ack"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int h = check_step(args, mem);
            const Matrix& R = mem.read_matrix(unknown_mode(mem) ? "mdp/R_hat" : "mdp/R");
            kernel_add_reward(mem.mutable_tensor("mdp/Q"), h, R);
            return std::monostate{};
        });

    registry.register_op(
        OpDescriptor{"UpdateQbyPV",
                     "add the one-step look-ahead value to Q_h(s,a) for all (s,a) pairs",
                     {{"time_step", ArgType::Int}},
                     "ack"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int h = check_step(args, mem);
            const Tensor3& P = mem.read_tensor(unknown_mode(mem) ? "mdp/P_hat" : "mdp/P");
            kernel_add_lookahead(mem.mutable_tensor("mdp/Q"), h, P, mem.read_matrix("mdp/V"));
            return std::monostate{};
        });

    registry.register_op(
        OpDescriptor{"UpdateV",
                     "take maximum V_h(s) = max_a Q_h(s,a) for the specified time step",
                     {{"time_step", ArgType::Int}},
                     "ack"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int h = check_step(args, mem);
            int H = mem.read_int("mdp/H");
            std::optional<double> clip;
            if (unknown_mode(mem)) clip = static_cast<double>(H - h + 1);
            kernel_max_over_actions(mem.mutable_matrix("mdp/V"), h, mem.read_tensor("mdp/Q"), clip);
            return std::monostate{};
        });

    registry.register_op(
        OpDescriptor{"GetQ",
                     "retrieve the values of Q_h(s,a) for all actions at the given step and state",
                     {{"time_step", ArgType::Int}, {"cur_state", ArgType::Int}},
                     "list"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int h = check_step(args, mem);
            int s = args.at("cur_state").get<int>();
            int S = mem.read_int("mdp/S");
            if (s < 0 || s >= S) throw OpError("state-out-of-range", std::to_string(s));
            const Tensor3& Q = mem.read_tensor("mdp/Q");
            Vector row(Q.d2);
            for (std::size_t a = 0; a < Q.d2; ++a) row[a] = Q.at(h - 1, s, a);
            return row;
        });

    registry.register_op(
        OpDescriptor{"ResetTables",
                     "zero the Q and V tables before a fresh planning pass",
                     {},
                     "ack"},
        [](const Json&, WorkingMemory& mem) -> Value {
            Tensor3& Q = mem.mutable_tensor("mdp/Q");
            std::fill(Q.data.begin(), Q.data.end(), 0.0);
            Matrix& V = mem.mutable_matrix("mdp/V");
            std::fill(V.data.begin(), V.data.end(), 0.0);
            return std::monostate{};
        });

    registry.register_op(
        OpDescriptor{"UpdateQbyBonus",
                     "add exploration bonus to the Q values for all state-action pairs",
                     {{"time_step", ArgType::Int}},
                     "ack"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int h = check_step(args, mem);
            if (!mem.contains("mdp/N_sa")) {
                throw OpError("learner-missing", "no learner state in memory");
            }
            kernel_add_bonus(mem.mutable_tensor("mdp/Q"), h, mem.read_matrix("mdp/N_sa"),
                             mem.read_int("mdp/H"), mem.read_int("mdp/S"), mem.read_int("mdp/A"),
                             mem.read_int("mdp/K"), mem.read_scalar("mdp/c"),
                             mem.read_scalar("mdp/delta"));
            return std::monostate{};
        });

    registry.register_op(
        OpDescriptor{"UpdateMDPModel",
                     "update the estimated reward and transition functions from an observed "
                     "(s, a, s', r) quadruple",
                     {{"s", ArgType::Int},
                      {"a", ArgType::Int},
                      {"s_prime", ArgType::Int},
                      {"r", ArgType::Real}},
                     "ack"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            if (!mem.contains("mdp/N_sa")) {
                throw OpError("learner-missing", "no learner state in memory");
            }
            int S = mem.read_int("mdp/S");
            int A = mem.read_int("mdp/A");
            int s = args.at("s").get<int>();
            int a = args.at("a").get<int>();
            int sp = args.at("s_prime").get<int>();
            double r = args.at("r").get<double>();
            if (s < 0 || s >= S || sp < 0 || sp >= S || a < 0 || a >= A) {
                throw OpError("index-out-of-range", "bad (s, a, s') indices");
            }
            Matrix& N_sa = mem.mutable_matrix("mdp/N_sa");
            Tensor3& N_sas = mem.mutable_tensor("mdp/N_sas");
            Tensor3& P_hat = mem.mutable_tensor("mdp/P_hat");
            Matrix& R_hat = mem.mutable_matrix("mdp/R_hat");
            N_sa.at(s, a) += 1.0;
            N_sas.at(s, a, sp) += 1.0;
            double n = N_sa.at(s, a);
            for (int k = 0; k < S; ++k) P_hat.at(s, a, k) = N_sas.at(s, a, k) / n;
            R_hat.at(s, a) = R_hat.at(s, a) * (n - 1.0) / n + r / n;
            return std::monostate{};
        });
}

void init_learner_memory(WorkingMemory& mem, int S, int A, int K_total) {
    LearnerState learner(S, A, K_total);
    mem.write("mdp/N_sa", learner.N_sa);
    mem.write("mdp/N_sas", learner.N_sas);
    mem.write("mdp/P_hat", learner.P_hat);
    mem.write("mdp/R_hat", learner.R_hat);
    mem.write("mdp/K", static_cast<double>(K_total));
    mem.write("mdp/c", learner.bonus_scale);
    mem.write("mdp/delta", learner.confidence);
}

}  // namespace stride
