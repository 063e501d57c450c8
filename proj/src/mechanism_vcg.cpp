#include "stride/mechanism_vcg.hpp"

#include "stride/numeric_ops.hpp"

namespace stride {

void MechanismInstance::validate() const {
    if (N < 1) throw OpError("bad-instance", "need at least one agent");
    base.validate();
    if (R_agents.d0 != static_cast<std::size_t>(N) ||
        R_agents.d1 != static_cast<std::size_t>(base.S) ||
        R_agents.d2 != static_cast<std::size_t>(base.A)) {
        throw OpError("bad-instance", "R_agents has wrong shape");
    }
}

Json MechanismInstance::to_json() const {
    Json j = base.to_json();
    j["N"] = N;
    Json agents = Json::array();
    for (int i = 0; i < N; ++i) {
        Json mat = Json::array();
        for (int s = 0; s < base.S; ++s) {
            Json row = Json::array();
            for (int a = 0; a < base.A; ++a) row.push_back(R_agents.at(i, s, a));
            mat.push_back(row);
        }
        agents.push_back(mat);
    }
    j["R_agents"] = agents;
    return j;
}

MechanismInstance MechanismInstance::from_json(const Json& j) {
    MechanismInstance m;
    m.base = MdpInstance::from_json(j);
    m.N = j.at("N").get<int>();
    m.R_agents = Tensor3(m.N, m.base.S, m.base.A);
    const Json& agents = j.at("R_agents");
    for (int i = 0; i < m.N; ++i) {
        for (int s = 0; s < m.base.S; ++s) {
            for (int a = 0; a < m.base.A; ++a) {
                m.R_agents.at(i, s, a) = agents.at(i).at(s).at(a).get<double>();
            }
        }
    }
    m.validate();
    return m;
}

MechanismInstance generate_mechanism_instance(int N, int S, int A, int H, std::uint64_t seed) {
    MechanismInstance m;
    m.N = N;
    m.base = generate_instance(S, A, H, seed);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    m.R_agents = Tensor3(N, S, A);
    for (int i = 0; i < N; ++i) {
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) m.R_agents.at(i, s, a) = rng.uniform();
        }
    }
    m.validate();
    return m;
}

Matrix summed_rewards(const MechanismInstance& instance, std::optional<int> excluded) {
    if (excluded && (*excluded < 0 || *excluded >= instance.N)) {
        throw OpError("agent-out-of-range", std::to_string(*excluded));
    }
    Matrix sum(instance.base.S, instance.base.A);
    for (int i = 0; i < instance.N; ++i) {
        if (excluded && *excluded == i) continue;
        for (int s = 0; s < instance.base.S; ++s) {
            for (int a = 0; a < instance.base.A; ++a) sum.at(s, a) += instance.R_agents.at(i, s, a);
        }
    }
    return sum;
}

namespace {

std::pair<ValueTables, Policy> solve_on_rewards(const MdpInstance& base, const Matrix& rewards) {
    const int H = base.H, S = base.S, A = base.A;
    ValueTables tables(H, S, A);
    for (int h = H; h >= 1; --h) {
        kernel_add_reward(tables.Q, h, rewards);
        kernel_add_lookahead(tables.Q, h, base.P, tables.V);
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

}  // namespace

VcgOutcome compute_vcg(const MechanismInstance& instance) {
    instance.validate();
    const MdpInstance& base = instance.base;
    VcgOutcome out;

    Matrix sum_all = summed_rewards(instance, std::nullopt);
    auto [tables_all, pi_star] = solve_on_rewards(base, sum_all);
    out.pi_star = pi_star;
    out.social_value = tables_all.v(1, base.s1);

    for (int i = 0; i < instance.N; ++i) {
        Matrix sum_excl = summed_rewards(instance, i);
        auto [tables_i, pi_i] = solve_on_rewards(base, sum_excl);
        double excluded_opt = tables_i.v(1, base.s1);
        double pi_star_on_excl = evaluate_policy(base.P, sum_excl, base.H, base.s1, out.pi_star);
        out.pi_minus.push_back(std::move(pi_i));
        out.prices.push_back(excluded_opt - pi_star_on_excl);

        Matrix own(base.S, base.A);
        for (int s = 0; s < base.S; ++s) {
            for (int a = 0; a < base.A; ++a) own.at(s, a) = instance.R_agents.at(i, s, a);
        }
        double own_value = evaluate_policy(base.P, own, base.H, base.s1, out.pi_star);
        out.utilities.push_back(own_value - out.prices.back());
    }
    return out;
}

int mechanism_act(const EnvSession& sess, const VcgOutcome& outcome, int h) {
    const MdpInstance& inst = sess.instance();
    if (h < 1 || h > inst.H) throw OpError("out-of-horizon", std::to_string(h));
    if (outcome.pi_star.H != inst.H || outcome.pi_star.S != inst.S) {
        throw OpError("outcome-mismatch", "policy does not match session instance");
    }
    return outcome.pi_star.at(h, sess.current_state());
}

std::string exclusion_key(std::optional<int> excluded) {
    return excluded ? std::to_string(*excluded) : std::string("none");
}

namespace {

std::optional<int> parse_excluded(const Json& args, const WorkingMemory& mem) {
    const Json& v = args.at("excluded_agent");
    if (v.is_null()) return std::nullopt;
    int i = v.get<int>();
    int N = mem.read_int("vcg/N");
    if (i < 0 || i >= N) throw OpError("agent-out-of-range", std::to_string(i));
    return i;
}

int check_step_vcg(const Json& args, const WorkingMemory& mem) {
    int h = args.at("time_step").get<int>();
    int H = mem.read_int("mdp/H");
    if (h < 1 || h > H) throw OpError("out-of-horizon", std::to_string(h));
    return h;
}

/// Summed reported rewards with one agent left out, from memory.
Matrix summed_rewards_mem(const WorkingMemory& mem, std::optional<int> excluded) {
    const Tensor3& R_agents = mem.read_tensor("vcg/R_agents");
    Matrix sum(R_agents.d1, R_agents.d2);
    for (std::size_t i = 0; i < R_agents.d0; ++i) {
        if (excluded && static_cast<std::size_t>(*excluded) == i) continue;
        for (std::size_t s = 0; s < R_agents.d1; ++s) {
            for (std::size_t a = 0; a < R_agents.d2; ++a) sum.at(s, a) += R_agents.at(i, s, a);
        }
    }
    return sum;
}

void ensure_tables(WorkingMemory& mem, const std::string& key) {
    if (!mem.contains("vcg/Q/" + key)) {
        int H = mem.read_int("mdp/H");
        int S = mem.read_int("mdp/S");
        int A = mem.read_int("mdp/A");
        mem.write("vcg/Q/" + key, Tensor3(H, S, A));
        mem.write("vcg/V/" + key, Matrix(H + 1, S));
    }
}

}  // namespace

void register_vcg_ops(Registry& registry) {
    const std::vector<ArgSpec> step_args = {{"time_step", ArgType::Int},
                                            {"excluded_agent", ArgType::IntOrNull}};

    registry.register_op(
        OpDescriptor{"UpdateQbyRExcluding",
                     "add immediate rewards, excluding the reward of excluded_agent, to the Q "
                     "values at the given time step",
                     step_args,
                     "ack"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int h = check_step_vcg(args, mem);
            auto excluded = parse_excluded(args, mem);
            std::string key = exclusion_key(excluded);
            ensure_tables(mem, key);
            kernel_add_reward(mem.mutable_tensor("vcg/Q/" + key), h,
                              summed_rewards_mem(mem, excluded));
            return std::monostate{};
        });

    registry.register_op(
        OpDescriptor{"UpdateQbyPVExcluding",
                     "add the one-step look-ahead value to the exclusion-keyed Q values",
                     step_args,
                     "ack"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int h = check_step_vcg(args, mem);
            std::string key = exclusion_key(parse_excluded(args, mem));
            ensure_tables(mem, key);
            kernel_add_lookahead(mem.mutable_tensor("vcg/Q/" + key), h, mem.read_tensor("mdp/P"),
                                 mem.read_matrix("vcg/V/" + key));
            return std::monostate{};
        });

    registry.register_op(
        OpDescriptor{"UpdateVExcluding",
                     "update the exclusion-keyed V values from the computed Q values",
                     step_args,
                     "ack"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int h = check_step_vcg(args, mem);
            std::string key = exclusion_key(parse_excluded(args, mem));
            ensure_tables(mem, key);
            kernel_max_over_actions(mem.mutable_matrix("vcg/V/" + key), h,
                                    mem.read_tensor("vcg/Q/" + key), std::nullopt);
            return std::monostate{};
        });

    registry.register_op(
        OpDescriptor{"GetQExcluding",
                     "retrieve exclusion-keyed Q values for all actions at the given state and "
                     "time step",
                     {{"time_step", ArgType::Int},
                      {"cur_state", ArgType::Int},
                      {"excluded_agent", ArgType::IntOrNull}},
                     "list"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int h = check_step_vcg(args, mem);
            std::string key = exclusion_key(parse_excluded(args, mem));
            int s = args.at("cur_state").get<int>();
            int S = mem.read_int("mdp/S");
            if (s < 0 || s >= S) throw OpError("state-out-of-range", std::to_string(s));
            const Tensor3& Q = mem.read_tensor("vcg/Q/" + key);
            Vector row(Q.d2);
            for (std::size_t a = 0; a < Q.d2; ++a) row[a] = Q.at(h - 1, s, a);
            return row;
        });

    registry.register_op(
        OpDescriptor{"EvaluatePolicyExcluding",
                     "evaluate the optimal policy on a fictitious MDP that excludes the reward "
                     "function of excluded_agent",
                     {{"excluded_agent", ArgType::IntOrNull}},
                     "scalar"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            auto excluded = parse_excluded(args, mem);
            int H = mem.read_int("mdp/H");
            int S = mem.read_int("mdp/S");
            int A = mem.read_int("mdp/A");
            int s1 = mem.read_int("mdp/s1");
            // pi* is implicit: greedy (first argmax) on the excluded=none tables.
            const Tensor3& Q = mem.read_tensor("vcg/Q/none");
            Policy pi(H, S);
            for (int h = 1; h <= H; ++h) {
                for (int s = 0; s < S; ++s) {
                    std::vector<double> row(A);
                    for (int a = 0; a < A; ++a) row[a] = Q.at(h - 1, s, a);
                    pi.at(h, s) = get_arg_max(row).front();
                }
            }
            return evaluate_policy(mem.read_tensor("mdp/P"), summed_rewards_mem(mem, excluded), H,
                                   s1, pi);
        });
}

void init_vcg_memory(WorkingMemory& mem, const MechanismInstance& instance) {
    instance.validate();
    mem.write("mdp/S", static_cast<double>(instance.base.S));
    mem.write("mdp/A", static_cast<double>(instance.base.A));
    mem.write("mdp/H", static_cast<double>(instance.base.H));
    mem.write("mdp/s1", static_cast<double>(instance.base.s1));
    mem.write("mdp/P", instance.base.P);
    mem.write("vcg/N", static_cast<double>(instance.N));
    mem.write("vcg/R_agents", instance.R_agents);
}

}  // namespace stride
