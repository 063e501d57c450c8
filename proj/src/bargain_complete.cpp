#include "stride/bargain_complete.hpp"

#include <cmath>

namespace stride {

std::string role_name(Role r) { return r == Role::Buyer ? "buyer" : "seller"; }

Role role_from_string(const std::string& s) {
    if (s == "buyer") return Role::Buyer;
    if (s == "seller") return Role::Seller;
    throw OpError("bad-role", "'" + s + "' is neither buyer nor seller");
}

void CompleteBargainInstance::validate() const {
    if (!(delta_b > 0.0 && delta_b < 1.0 && delta_s > 0.0 && delta_s < 1.0)) {
        throw OpError("bad-instance", "discount factors must lie in (0, 1)");
    }
    if (T < 1) throw OpError("bad-instance", "deadline must be >= 1");
}

Json CompleteBargainInstance::to_json() const {
    return Json{{"delta_b", delta_b}, {"delta_s", delta_s}, {"T", T}};
}

CompleteBargainInstance CompleteBargainInstance::from_json(const Json& j) {
    CompleteBargainInstance inst;
    inst.delta_b = j.at("delta_b").get<double>();
    inst.delta_s = j.at("delta_s").get<double>();
    inst.T = j.at("T").get<int>();
    inst.validate();
    return inst;
}

Role proposer_at(int t) { return (t % 2 == 1) ? Role::Buyer : Role::Seller; }

double SpeSchedule::price(int t) const {
    if (t < 1 || t > static_cast<int>(prices.size())) {
        throw OpError("schedule-missing", "no SPE price for t=" + std::to_string(t));
    }
    return prices[t - 1];
}

double calc_util(const CompleteBargainInstance& instance, Role role, double p, int t) {
    if (p < 0.0 || p > 1.0) throw OpError("price-out-of-range", std::to_string(p));
    if (t < 1) throw OpError("bad-step", std::to_string(t));
    if (t > instance.T) return 0.0;
    if (role == Role::Buyer) return (1.0 - p) * std::pow(instance.delta_b, t - 1);
    return p * std::pow(instance.delta_s, t - 1);
}

double backward_one_step(const CompleteBargainInstance& instance, Role proposer, double opp_util,
                         int t) {
    if (t < 1 || t > instance.T) throw OpError("bad-step", std::to_string(t));
    if (opp_util < 0.0) throw OpError("bad-utility", "opponent utility must be >= 0");
    if (t == instance.T) {
        // Terminal step: rejection leaves the responder with nothing.
        return proposer == Role::Buyer ? 0.0 : 1.0;
    }
    double p;
    if (proposer == Role::Buyer) {
        // Smallest p with u_s(p, t) >= opp_util.
        p = opp_util / std::pow(instance.delta_s, t - 1);
    } else {
        // Largest p with u_b(p, t) >= opp_util.
        p = 1.0 - opp_util / std::pow(instance.delta_b, t - 1);
    }
    if (p < -1e-9 || p > 1.0 + 1e-9) {
        throw OpError("infeasible", "required price " + std::to_string(p) + " outside [0, 1]");
    }
    return std::min(1.0, std::max(0.0, p));
}

SpeSchedule compute_spe(const CompleteBargainInstance& instance) {
    instance.validate();
    SpeSchedule schedule;
    schedule.prices.assign(instance.T, 0.0);
    schedule.u_buyer.assign(instance.T, 0.0);
    schedule.u_seller.assign(instance.T, 0.0);
    for (int t = instance.T; t >= 1; --t) {
        Role proposer = proposer_at(t);
        double opp_util = 0.0;
        if (t < instance.T) {
            Role opponent = proposer == Role::Buyer ? Role::Seller : Role::Buyer;
            opp_util = calc_util(instance, opponent, schedule.prices[t], t + 1);
        }
        double p = backward_one_step(instance, proposer, opp_util, t);
        schedule.prices[t - 1] = p;
        schedule.u_buyer[t - 1] = calc_util(instance, Role::Buyer, p, t);
        schedule.u_seller[t - 1] = calc_util(instance, Role::Seller, p, t);
    }
    return schedule;
}

Response respond_to_offer(const CompleteBargainInstance& instance, Role role, double p, int t,
                          const SpeSchedule& schedule) {
    if (t < 1 || t > instance.T) throw OpError("bad-step", std::to_string(t));
    double accept_util = calc_util(instance, role, p, t);
    double reject_util = 0.0;
    if (t < instance.T) reject_util = calc_util(instance, role, schedule.price(t + 1), t + 1);
    return accept_util >= reject_util - kIndifferenceTolerance ? Response::Accept
                                                               : Response::Reject;
}

namespace {

CompleteBargainInstance instance_from_memory(const WorkingMemory& mem) {
    CompleteBargainInstance inst;
    inst.delta_b = mem.read_scalar("bargain/delta_b");
    inst.delta_s = mem.read_scalar("bargain/delta_s");
    inst.T = mem.read_int("bargain/T");
    return inst;
}

}  // namespace

void register_bargain_ops(Registry& registry) {
    registry.register_op(
        OpDescriptor{"CalcUtil",
                     "calculate buyer or seller's utility for a price at a time step",
                     {{"agent", ArgType::String}, {"price", ArgType::Real}, {"t", ArgType::Int}},
                     "scalar"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            CompleteBargainInstance inst = instance_from_memory(mem);
            return calc_util(inst, role_from_string(args.at("agent").get<std::string>()),
                             args.at("price").get<double>(), args.at("t").get<int>());
        });

    registry.register_op(
        OpDescriptor{"BackwardOneStep",
                     "compute the SPE price for the current step from the opponent's rejection "
                     "utility, and record it in the schedule",
                     {{"agent", ArgType::String}, {"op_u", ArgType::Real}, {"t", ArgType::Int}},
                     "scalar"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            CompleteBargainInstance inst = instance_from_memory(mem);
            int t = args.at("t").get<int>();
            double p = backward_one_step(inst, role_from_string(args.at("agent").get<std::string>()),
                                         args.at("op_u").get<double>(), t);
            mem.mutable_vector("bargain/prices")[t - 1] = p;
            return p;
        });

    registry.register_op(
        OpDescriptor{"GetSPEPrice",
                     "retrieve the previously computed SPE price for the specified time step",
                     {{"t", ArgType::Int}},
                     "scalar"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int t = args.at("t").get<int>();
            int T = mem.read_int("bargain/T");
            // Past the deadline any price yields utility 0; return the
            // no-deal sentinel so Alg-style responders can still chain
            // GetSPEPrice -> CalcUtil at t = T.
            if (t == T + 1) return 0.0;
            if (t < 1 || t > T) throw OpError("schedule-missing", std::to_string(t));
            return mem.read_vector("bargain/prices")[t - 1];
        });
}

void init_bargain_memory(WorkingMemory& mem, const CompleteBargainInstance& instance) {
    instance.validate();
    mem.write("bargain/delta_b", instance.delta_b);
    mem.write("bargain/delta_s", instance.delta_s);
    mem.write("bargain/T", static_cast<double>(instance.T));
    mem.write("bargain/prices", Vector(instance.T, 0.0));
}

}  // namespace stride
