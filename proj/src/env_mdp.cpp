#include "stride/env_mdp.hpp"

#include <cmath>

namespace stride {

double Rng::normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * M_PI * u2);
}

int Rng::uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
}

void MdpInstance::validate() const {
    if (S < 1 || A < 1 || H < 1) throw OpError("bad-instance", "S, A, H must be >= 1");
    if (P.d0 != static_cast<std::size_t>(S) || P.d1 != static_cast<std::size_t>(A) ||
        P.d2 != static_cast<std::size_t>(S)) {
        throw OpError("bad-instance", "P has wrong shape");
    }
    if (R.rows != static_cast<std::size_t>(S) || R.cols != static_cast<std::size_t>(A)) {
        throw OpError("bad-instance", "R has wrong shape");
    }
    if (s1 < 0 || s1 >= S) throw OpError("bad-instance", "s1 out of range");
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double sum = 0.0;
            for (int sp = 0; sp < S; ++sp) {
                double p = P.at(s, a, sp);
                if (p < 0.0) throw OpError("bad-instance", "negative transition probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9) {
                throw OpError("bad-instance", "transition row does not sum to 1");
            }
        }
    }
}

Json MdpInstance::to_json() const {
    Json p = Json::array();
    for (int s = 0; s < S; ++s) {
        Json row = Json::array();
        for (int a = 0; a < A; ++a) {
            Json inner = Json::array();
            for (int sp = 0; sp < S; ++sp) inner.push_back(P.at(s, a, sp));
            row.push_back(inner);
        }
        p.push_back(row);
    }
    Json r = Json::array();
    for (int s = 0; s < S; ++s) {
        Json row = Json::array();
        for (int a = 0; a < A; ++a) row.push_back(R.at(s, a));
        r.push_back(row);
    }
    return Json{{"S", S}, {"A", A}, {"H", H}, {"P", p}, {"R", r}, {"s1", s1}};
}

MdpInstance MdpInstance::from_json(const Json& j) {
    MdpInstance m;
    m.S = j.at("S").get<int>();
    m.A = j.at("A").get<int>();
    m.H = j.at("H").get<int>();
    m.s1 = j.at("s1").get<int>();
    m.P = Tensor3(m.S, m.A, m.S);
    m.R = Matrix(m.S, m.A);
    const Json& p = j.at("P");
    const Json& r = j.at("R");
    for (int s = 0; s < m.S; ++s) {
        for (int a = 0; a < m.A; ++a) {
            for (int sp = 0; sp < m.S; ++sp) {
                m.P.at(s, a, sp) = p.at(s).at(a).at(sp).get<double>();
            }
            m.R.at(s, a) = r.at(s).at(a).get<double>();
        }
    }
    m.validate();
    return m;
}

MdpInstance generate_instance(int S, int A, int H, std::uint64_t seed) {
    if (S < 1 || A < 1 || H < 1) throw OpError("bad-instance", "S, A, H must be >= 1");
    Rng rng(seed);
    MdpInstance m;
    m.S = S;
    m.A = A;
    m.H = H;
    m.s1 = 0;
    m.P = Tensor3(S, A, S);
    m.R = Matrix(S, A);
    // Flat Dirichlet rows via normalized Exp(1) draws.
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double sum = 0.0;
            for (int sp = 0; sp < S; ++sp) {
                double e = -std::log1p(-rng.uniform());
                m.P.at(s, a, sp) = e;
                sum += e;
            }
            for (int sp = 0; sp < S; ++sp) m.P.at(s, a, sp) /= sum;
        }
    }
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) m.R.at(s, a) = rng.uniform();
    }
    return m;
}

EnvSession::EnvSession(MdpInstance instance, EnvMode mode, std::uint64_t seed)
    : instance_(std::move(instance)), mode_(mode), rng_(seed) {
    instance_.validate();
    s_ = instance_.s1;
}

std::pair<double, int> EnvSession::step(int a) {
    if (done()) throw OpError("episode-over", "call reset() before stepping again");
    if (a < 0 || a >= instance_.A) {
        throw OpError("action-out-of-range", "action " + std::to_string(a));
    }
    double u = rng_.uniform();
    int s_next = instance_.S - 1;
    double acc = 0.0;
    for (int sp = 0; sp < instance_.S; ++sp) {
        acc += instance_.P.at(s_, a, sp);
        if (u < acc) {
            s_next = sp;
            break;
        }
    }
    double r = instance_.R.at(s_, a);
    if (mode_ == EnvMode::UnknownModel) r += kRewardNoiseStd * rng_.normal();
    log_.push_back(StepRecord{h_, s_, a, r, s_next});
    s_ = s_next;
    ++h_;
    return {r, s_next};
}

int EnvSession::reset() {
    h_ = 1;
    s_ = instance_.s1;
    log_.clear();
    return s_;
}

void init_mdp_memory(WorkingMemory& mem, const MdpInstance& instance, EnvMode mode) {
    instance.validate();
    mem.write("mdp/S", static_cast<double>(instance.S));
    mem.write("mdp/A", static_cast<double>(instance.A));
    mem.write("mdp/H", static_cast<double>(instance.H));
    mem.write("mdp/s1", static_cast<double>(instance.s1));
    mem.write("mdp/mode", std::string(mode == EnvMode::KnownModel ? "known" : "unknown"));
    if (mode == EnvMode::KnownModel) {
        mem.write("mdp/P", instance.P);
        mem.write("mdp/R", instance.R);
    }
    mem.write("mdp/Q", Tensor3(instance.H, instance.S, instance.A));
    mem.write("mdp/V", Matrix(instance.H + 1, instance.S));
}

}  // namespace stride
