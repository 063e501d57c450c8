#pragma once

#include <optional>
#include <vector>

#include "stride/env_mdp.hpp"
#include "stride/registry.hpp"

namespace stride {

/// Per-step Q/V tables, 1-based step index h = 1..H (V has an extra
/// all-zero terminal row V_{H+1}).
struct ValueTables {
    Tensor3 Q;  // [H][S][A]
    Matrix V;   // [H+1][S]

    ValueTables() = default;
    ValueTables(int H, int S, int A) : Q(H, S, A), V(H + 1, S) {}

    double q(int h, int s, int a) const { return Q.at(h - 1, s, a); }
    double v(int h, int s) const { return V.at(h - 1, s); }
};

struct Policy {
    int H = 0;
    int S = 0;
    std::vector<int> table;  // [H][S] -> action

    Policy() = default;
    Policy(int h, int s) : H(h), S(s), table(h * s, 0) {}

    int& at(int h, int s) { return table[(h - 1) * S + s]; }
    int at(int h, int s) const { return table[(h - 1) * S + s]; }
};

struct LearnerState {
    Matrix N_sa;    // visit counts
    Tensor3 N_sas;  // transition counts
    Tensor3 P_hat;  // uniform rows until the pair is visited
    Matrix R_hat;   // running mean of observed rewards
    int K = 0;  // total planned episodes (enters the bonus)
    // Default scale chosen so the bonus decays below typical action gaps
    // within the K = 40 episode budget; at c = 1 the Hoeffding term still
    // dominates rewards in [0, 1] after 40 episodes and the greedy policy
    // never settles.
    double bonus_scale = 0.02;
    double confidence = 0.1;

    LearnerState() = default;
    LearnerState(int S, int A, int K_total);
};

// Backward-pass kernels, shared verbatim between the registered
// operations (memory path) and the direct solvers so both produce
// bit-identical tables.
void kernel_add_reward(Tensor3& Q, int h, const Matrix& R);
void kernel_add_lookahead(Tensor3& Q, int h, const Tensor3& P, const Matrix& V);
void kernel_max_over_actions(Matrix& V, int h, const Tensor3& Q, std::optional<double> clip);
void kernel_add_bonus(Tensor3& Q, int h, const Matrix& N_sa, int H, int S, int A, int K,
                      double bonus_scale, double confidence);

double exploration_bonus(double n, int h, int H, int S, int A, int K, double bonus_scale,
                         double confidence);

void update_model(LearnerState& learner, int s, int a, int s_next, double r);

/// Full backward pass of value iteration on the true model; the policy
/// takes the first (lowest-index) argmax everywhere.
std::pair<ValueTables, Policy> solve_known(const MdpInstance& instance);

/// Exact expected value of a deterministic policy from (h=1, s1).
double evaluate_policy(const Tensor3& P, const Matrix& R, int H, int s1, const Policy& pi);

/// The lowest-index greedy policy of a Q table; matches the action rule
/// used when acting inside ucbvi_episode.
Policy greedy_policy(const ValueTables& tables, int H, int S, int A);

/// One optimistic planning pass over the learner's model estimates.
void ucbvi_plan(ValueTables& tables, const LearnerState& learner, int H, int S, int A);

/// Plans, acts greedily for H steps (updating the model after each
/// step), and returns the episode's true expected return sum_h R[s,a].
double ucbvi_episode(EnvSession& sess, LearnerState& learner, ValueTables& tables);

/// Registers UpdateQbyR, UpdateQbyPV, UpdateV, GetQ, UpdateQbyBonus,
/// UpdateMDPModel (all operating on the "mdp/" memory namespace).
void register_mdp_ops(Registry& registry);

/// Adds learner-state entries to memory for unknown-model sessions.
void init_learner_memory(WorkingMemory& mem, int S, int A, int K_total);

}  // namespace stride
