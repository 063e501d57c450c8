#include "stride/bargain_incomplete.hpp"

#include <cmath>

namespace stride {

void IncompleteBargainInstance::validate() const {
    if (!(delta_b >= 0.0 && delta_b < 1.0 && delta_s >= 0.0 && delta_s < 1.0)) {
        throw OpError("bad-instance", "discount factors must lie in [0, 1)");
    }
    if (T < 1) throw OpError("bad-instance", "deadline must be >= 1");
    if (buyer_value < 0.0 || buyer_value > 1.0) {
        throw OpError("bad-instance", "buyer value must lie in [0, 1]");
    }
}

Json IncompleteBargainInstance::to_json() const {
    return Json{{"delta_b", delta_b}, {"delta_s", delta_s}, {"T", T}, {"b", buyer_value}};
}

IncompleteBargainInstance IncompleteBargainInstance::from_json(const Json& j) {
    IncompleteBargainInstance inst;
    inst.delta_b = j.at("delta_b").get<double>();
    inst.delta_s = j.at("delta_s").get<double>();
    inst.T = j.at("T").get<int>();
    inst.buyer_value = j.at("b").get<double>();
    inst.validate();
    return inst;
}

double SeSchedule::price(int t) const {
    if (t < 1 || t > static_cast<int>(prices.size())) {
        throw OpError("schedule-missing", "no SE price for t=" + std::to_string(t));
    }
    return prices[t - 1];
}

Json SeSchedule::to_json() const {
    return Json{{"beliefs", beliefs},
                {"prices", prices},
                {"seller_values", seller_values},
                {"constants", constants}};
}

double calc_util_b(const IncompleteBargainInstance& instance, Role role, double p, int t,
                   double b) {
    if (p < 0.0 || p > 1.0) throw OpError("price-out-of-range", std::to_string(p));
    if (t < 1) throw OpError("bad-step", std::to_string(t));
    if (t > instance.T) return 0.0;
    if (role == Role::Buyer) return (b - p) * std::pow(instance.delta_b, t - 1);
    return p * std::pow(instance.delta_s, t - 1);
}

std::vector<double> belief_constants(double delta_b, double delta_s, int T) {
    // c[tau] for tau = 2..T, stored at index tau - 2.
    if (T < 2) return {};
    std::vector<double> c(T - 1, 0.0);
    c[T - 2] = 0.5;
    for (int tau = T - 1; tau >= 2; --tau) {
        double c_next = c[tau - 1];
        double x = 1.0 - delta_b + delta_b * c_next;
        double denom = 2.0 * x - delta_s * c_next;
        if (std::abs(denom) < 1e-15) throw OpError("division-by-zero", "degenerate constants");
        c[tau - 2] = x * x / denom;
    }
    return c;
}

namespace {

/// Full chain b_0..b_{T-1} from a guess of b_{T-1}.
std::vector<double> belief_chain(double delta_b, double delta_s, int T, double b_last) {
    std::vector<double> b(T, 0.0);
    b[T - 1] = b_last;
    if (T == 1) return b;
    std::vector<double> c = belief_constants(delta_b, delta_s, T);
    for (int tau = T - 1; tau >= 1; --tau) {
        double c_next = c[tau - 1];  // c_{tau+1}
        double x = 1.0 - delta_b + delta_b * c_next;
        if (std::abs(x) < 1e-15) throw OpError("division-by-zero", "degenerate belief factor");
        b[tau - 1] = (2.0 * x - delta_s * c_next) / x * b[tau];
    }
    return b;
}

}  // namespace

double compute_bt(double delta_b, double delta_s, int T, int t, double b_last) {
    if (T < 2) throw OpError("bad-step", "belief recursion needs T >= 2");
    if (t < 1 || t > T - 1) throw OpError("bad-step", std::to_string(t));
    if (b_last < 0.0 || b_last > 1.0) throw OpError("bad-belief", std::to_string(b_last));
    return belief_chain(delta_b, delta_s, T, b_last)[t - 1];
}

std::pair<double, double> solve_last(double b_last) {
    if (b_last <= 0.0) throw OpError("nonpositive-belief", std::to_string(b_last));
    return {b_last / 4.0, b_last / 2.0};
}

std::pair<double, double> solve_step(double u_next, double p_next, double b_prev, double b_cur,
                                     double delta_b) {
    if (b_prev <= 0.0) throw OpError("zero-belief-denominator", std::to_string(b_prev));
    double p = (1.0 - delta_b) * b_cur + delta_b * p_next;
    double u = (b_prev - b_cur) / b_prev * p + b_cur / b_prev * u_next;
    return {u, p};
}

SeSchedule compute_se(const IncompleteBargainInstance& instance) {
    instance.validate();
    const int T = instance.T;
    SeSchedule schedule;
    schedule.prices.assign(T, 0.0);
    schedule.seller_values.assign(T, 0.0);
    schedule.constants = belief_constants(instance.delta_b, instance.delta_s, T);

    double b_last = 1.0;
    if (T >= 2) {
        double lo = 0.0, hi = 1.0;
        b_last = 0.5;
        double b0 = compute_bt(instance.delta_b, instance.delta_s, T, 1, b_last);
        schedule.bisection_iterations = 1;
        while (std::abs(b0 - 1.0) >= kBisectionTolerance) {
            if (schedule.bisection_iterations >= kBisectionMaxIterations) {
                throw OpError("bisection-failure", "no convergence; degenerate parameters");
            }
            if (b0 <= 1.0) {
                lo = b_last;
            } else {
                hi = b_last;
            }
            b_last = (lo + hi) / 2.0;
            b0 = compute_bt(instance.delta_b, instance.delta_s, T, 1, b_last);
            ++schedule.bisection_iterations;
        }
    }
    schedule.beliefs = belief_chain(instance.delta_b, instance.delta_s, T, b_last);

    auto [u_T, p_T] = solve_last(b_last);
    schedule.seller_values[T - 1] = u_T;
    schedule.prices[T - 1] = p_T;
    for (int t = T - 1; t >= 1; --t) {
        auto [u_t, p_t] = solve_step(schedule.seller_values[t], schedule.prices[t],
                                     schedule.beliefs[t - 1], schedule.beliefs[t],
                                     instance.delta_b);
        schedule.seller_values[t - 1] = u_t;
        schedule.prices[t - 1] = p_t;
    }
    return schedule;
}

Response buyer_respond(const IncompleteBargainInstance& instance, double p, int t,
                       const SeSchedule& schedule) {
    if (t < 1 || t > instance.T) throw OpError("bad-step", std::to_string(t));
    double accept_util = calc_util_b(instance, Role::Buyer, p, t, instance.buyer_value);
    double reject_util = 0.0;
    if (t < instance.T) {
        reject_util =
            calc_util_b(instance, Role::Buyer, schedule.price(t + 1), t + 1, instance.buyer_value);
    }
    return accept_util >= reject_util ? Response::Accept : Response::Reject;
}

namespace {

IncompleteBargainInstance seller_view(const WorkingMemory& mem) {
    IncompleteBargainInstance inst;
    inst.delta_b = mem.read_scalar("bargain_inc/delta_b");
    inst.delta_s = mem.read_scalar("bargain_inc/delta_s");
    inst.T = mem.read_int("bargain_inc/T");
    return inst;
}

}  // namespace

void register_bargain_inc_ops(Registry& registry) {
    registry.register_op(
        OpDescriptor{"CalcUtilB",
                     "calculate buyer or seller's utility for a price at a time step, given the "
                     "buyer value",
                     {{"agent", ArgType::String},
                      {"price", ArgType::Real},
                      {"t", ArgType::Int},
                      {"b", ArgType::Real}},
                     "scalar"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            IncompleteBargainInstance inst = seller_view(mem);
            return calc_util_b(inst, role_from_string(args.at("agent").get<std::string>()),
                               args.at("price").get<double>(), args.at("t").get<int>(),
                               args.at("b").get<double>());
        });

    registry.register_op(
        OpDescriptor{"ComputeBt",
                     "run the belief recursion from a guess of b_{T-1} and return b_{t-1}; the "
                     "full chain and constants are recorded in memory",
                     {{"time_step", ArgType::Int}, {"b_last", ArgType::Real}},
                     "scalar"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            IncompleteBargainInstance inst = seller_view(mem);
            int t = args.at("time_step").get<int>();
            double b_last = args.at("b_last").get<double>();
            double result = compute_bt(inst.delta_b, inst.delta_s, inst.T, t, b_last);
            mem.write("bargain_inc/beliefs",
                      belief_chain(inst.delta_b, inst.delta_s, inst.T, b_last));
            if (inst.T >= 2) {
                mem.write("bargain_inc/constants",
                          belief_constants(inst.delta_b, inst.delta_s, inst.T));
            }
            return result;
        });

    registry.register_op(
        OpDescriptor{"SolveLast",
                     "seller's expected utility and price at the last time step",
                     {{"b_last", ArgType::Real}},
                     "list"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int T = mem.read_int("bargain_inc/T");
            auto [u, p] = solve_last(args.at("b_last").get<double>());
            mem.mutable_vector("bargain_inc/seller_values")[T - 1] = u;
            mem.mutable_vector("bargain_inc/prices")[T - 1] = p;
            return Vector{u, p};
        });

    registry.register_op(
        OpDescriptor{"Solve",
                     "expected utility and price at the current step from the next step's results",
                     {{"u", ArgType::Real}, {"p", ArgType::Real}, {"t", ArgType::Int}},
                     "list"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            IncompleteBargainInstance inst = seller_view(mem);
            int t = args.at("t").get<int>();
            if (t < 1 || t >= inst.T) throw OpError("bad-step", std::to_string(t));
            const Vector& beliefs = mem.read_vector("bargain_inc/beliefs");
            auto [u, p] = solve_step(args.at("u").get<double>(), args.at("p").get<double>(),
                                     beliefs[t - 1], beliefs[t], inst.delta_b);
            mem.mutable_vector("bargain_inc/seller_values")[t - 1] = u;
            mem.mutable_vector("bargain_inc/prices")[t - 1] = p;
            return Vector{u, p};
        });

    registry.register_op(
        OpDescriptor{"GetSEPrice",
                     "retrieve the previously computed SE price for the specified time step",
                     {{"t", ArgType::Int}},
                     "scalar"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            int t = args.at("t").get<int>();
            int T = mem.read_int("bargain_inc/T");
            if (t == T + 1) return 0.0;  // no-deal continuation
            if (t < 1 || t > T) throw OpError("schedule-missing", std::to_string(t));
            return mem.read_vector("bargain_inc/prices")[t - 1];
        });
}

void init_bargain_inc_memory(WorkingMemory& mem, const IncompleteBargainInstance& instance) {
    instance.validate();
    mem.write("bargain_inc/delta_b", instance.delta_b);
    mem.write("bargain_inc/delta_s", instance.delta_s);
    mem.write("bargain_inc/T", static_cast<double>(instance.T));
    mem.write("bargain_inc/prices", Vector(instance.T, 0.0));
    mem.write("bargain_inc/seller_values", Vector(instance.T, 0.0));
}

}  // namespace stride
