#pragma once

#include <string>
#include <vector>

#include "stride/registry.hpp"

namespace stride {

enum class Role { Buyer, Seller };

std::string role_name(Role r);
Role role_from_string(const std::string& s);

/// Alternating-offer bargaining, buyer's value 1, seller's cost 0,
/// buyer proposes at odd t.
struct CompleteBargainInstance {
    double delta_b = 0.5;
    double delta_s = 0.5;
    int T = 1;

    void validate() const;
    Json to_json() const;
    static CompleteBargainInstance from_json(const Json& j);
};

/// The proposer at step t (buyer opens).
Role proposer_at(int t);

struct SpeSchedule {
    std::vector<double> prices;   // prices[t-1] = p_t
    std::vector<double> u_buyer;  // u_b(p_t, t)
    std::vector<double> u_seller;

    double price(int t) const;
};

enum class Response { Accept, Reject };

/// Indifference margin for accept/reject decisions. Equilibrium prices
/// are produced by divisions, so the responder's recomputed utility can
/// sit one ulp below the continuation value; without a margin the
/// on-path offer would be rejected.
inline constexpr double kIndifferenceTolerance = 1e-9;

/// Eq-5 utilities: (1-p) delta_b^{t-1} / p delta_s^{t-1} for t <= T,
/// 0 past the deadline.
double calc_util(const CompleteBargainInstance& instance, Role role, double p, int t);

/// One step of backward induction. At t = T the proposer extracts the
/// whole surplus (buyer -> 0, seller -> 1); earlier the binding
/// participation constraint is solved in closed form.
double backward_one_step(const CompleteBargainInstance& instance, Role proposer, double opp_util,
                         int t);

/// Full schedule p_T..p_1 plus on-path utilities.
SpeSchedule compute_spe(const CompleteBargainInstance& instance);

/// Accept iff the offer is at least as good as rejecting and continuing
/// at the next SPE price (0 continuation at t = T); indifference accepts.
Response respond_to_offer(const CompleteBargainInstance& instance, Role role, double p, int t,
                          const SpeSchedule& schedule);

/// Registers CalcUtil, BackwardOneStep, GetSPEPrice over the "bargain/"
/// memory namespace. BackwardOneStep records its result into the price
/// schedule entry for the step.
void register_bargain_ops(Registry& registry);

void init_bargain_memory(WorkingMemory& mem, const CompleteBargainInstance& instance);

}  // namespace stride
