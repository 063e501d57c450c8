#pragma once

#include <optional>
#include <vector>

#include "stride/planner_mdp.hpp"

namespace stride {

struct MechanismInstance {
    int N = 0;            // agent count
    MdpInstance base;     // shared S, A, H, P (base.R is unused)
    Tensor3 R_agents;     // [N][S][A] reported rewards

    void validate() const;

    Json to_json() const;
    static MechanismInstance from_json(const Json& j);
};

/// Dense random mechanism instance: base dynamics from generate_instance,
/// agent reward matrices i.i.d. uniform on [0,1].
MechanismInstance generate_mechanism_instance(int N, int S, int A, int H, std::uint64_t seed);

struct VcgOutcome {
    Policy pi_star;
    std::vector<Policy> pi_minus;    // per-agent excluded-optimal policies
    std::vector<double> prices;      // externality payments, >= 0
    double social_value = 0.0;       // V^{pi*} on the summed rewards
    std::vector<double> utilities;   // u_i = V^{pi*}(P, R_i) - p_i
};

/// Sum of reported reward matrices with one agent excluded
/// (excluded = nullopt sums all agents).
Matrix summed_rewards(const MechanismInstance& instance, std::optional<int> excluded);

/// pi* on the full sum, then for each i the excluded-optimal value and
/// the price V^{pi*_{-i}} - V^{pi*} on the excluded objective.
VcgOutcome compute_vcg(const MechanismInstance& instance);

/// Action pi*[h][s_h] for the session's current state.
int mechanism_act(const EnvSession& sess, const VcgOutcome& outcome, int h);

/// Registers the excluding-agent tool family: UpdateQbyRExcluding,
/// UpdateQbyPVExcluding, UpdateVExcluding, GetQExcluding,
/// EvaluatePolicyExcluding. Exclusion-keyed tables live under
/// "vcg/Q/<excluded>" and "vcg/V/<excluded>".
void register_vcg_ops(Registry& registry);

/// Loads a mechanism instance into memory under "vcg/" (plus the shared
/// "mdp/" dynamics) and allocates the excluded=none tables.
void init_vcg_memory(WorkingMemory& mem, const MechanismInstance& instance);

/// Memory key suffix for an exclusion index ("none" or the index).
std::string exclusion_key(std::optional<int> excluded);

}  // namespace stride
