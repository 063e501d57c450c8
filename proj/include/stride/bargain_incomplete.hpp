#pragma once

#include <vector>

#include "stride/bargain_complete.hpp"

namespace stride {

/// Seller-offers bargaining with a privately known buyer value and a
/// uniform prior F(v) = v on [0, 1].
struct IncompleteBargainInstance {
    double delta_b = 0.5;
    double delta_s = 0.5;
    int T = 1;
    double buyer_value = 0.5;  // b, known to the buyer only

    void validate() const;
    Json to_json() const;
    static IncompleteBargainInstance from_json(const Json& j);
};

/// Sequential-equilibrium schedule: declining belief cutoffs, the
/// screening price path, and the seller's expected continuation values.
struct SeSchedule {
    std::vector<double> beliefs;        // b_0..b_{T-1}, b_0 ~ 1 after bisection
    std::vector<double> constants;      // c_2..c_T (empty for T = 1)
    std::vector<double> prices;         // p_1..p_T
    std::vector<double> seller_values;  // u_1..u_T
    int bisection_iterations = 0;

    double price(int t) const;
    Json to_json() const;
};

/// Eq-6 utilities: buyer surplus (b - p) delta_b^{t-1}, seller revenue
/// p delta_s^{t-1}, both 0 past the deadline.
double calc_util_b(const IncompleteBargainInstance& instance, Role role, double p, int t,
                   double b);

/// Belief-chain constants c_T..c_2.
std::vector<double> belief_constants(double delta_b, double delta_s, int T);

/// Runs the belief recursion from tau = T-1 down to t given a guess of
/// b_{T-1}; returns b_{t-1}.
double compute_bt(double delta_b, double delta_s, int T, int t, double b_last);

/// Terminal step: p_T = b_{T-1}/2, u_T = b_{T-1}/4.
std::pair<double, double> solve_last(double b_last);  // (u_T, p_T)

/// One backward step: p_t = (1 - delta_b) b_t + delta_b p_{t+1},
/// u_t = ((b_{t-1} - b_t)/b_{t-1}) p_t + (b_t/b_{t-1}) u_{t+1}.
std::pair<double, double> solve_step(double u_next, double p_next, double b_prev, double b_cur,
                                     double delta_b);  // (u_t, p_t)

inline constexpr double kBisectionTolerance = 1e-3;
inline constexpr int kBisectionMaxIterations = 200;

/// Bisection on b_{T-1} until |b_0' - 1| < 1e-3, then the backward pass.
SeSchedule compute_se(const IncompleteBargainInstance& instance);

/// Accept iff the current offer beats waiting for the next scheduled
/// price (0 continuation at t = T); indifference accepts.
Response buyer_respond(const IncompleteBargainInstance& instance, double p, int t,
                       const SeSchedule& schedule);

/// Registers CalcUtilB, ComputeBt, SolveLast, Solve, GetSEPrice over the
/// "bargain_inc/" memory namespace.
void register_bargain_inc_ops(Registry& registry);

/// Seller-side memory init (the buyer's private value is not stored).
void init_bargain_inc_memory(WorkingMemory& mem, const IncompleteBargainInstance& instance);

}  // namespace stride
