#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "stride/memory.hpp"
#include "stride/value.hpp"

namespace stride {

/// Deterministic RNG used everywhere. Distributions are hand-rolled on
/// top of mt19937_64 so that generated instances and trajectories are
/// stable across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal();

    int uniform_int(int lo, int hi);  // inclusive bounds

private:
    std::mt19937_64 gen_;
};

struct MdpInstance {
    int S = 0;
    int A = 0;
    int H = 0;
    Tensor3 P;  // [S][A][S], rows sum to 1
    Matrix R;   // [S][A], entries in [0, 1]
    int s1 = 0;

    void validate() const;

    Json to_json() const;
    static MdpInstance from_json(const Json& j);
};

/// P rows drawn from a flat Dirichlet, R i.i.d. uniform on [0,1],
/// s1 = 0; deterministic in seed.
MdpInstance generate_instance(int S, int A, int H, std::uint64_t seed);

struct StepRecord {
    int h = 0;
    int s = 0;
    int a = 0;
    double r = 0.0;
    int s_next = 0;
};

enum class EnvMode { KnownModel, UnknownModel };

/// Std of the Gaussian observation noise added to rewards in
/// unknown-model play. Mean rewards live in [0, 1], so unit-variance
/// noise would drown every action gap at the episode budgets we run
/// (K = 40); this scale keeps estimation honest while letting UCB-VI
/// lock onto the optimal policy inside the budget.
inline constexpr double kRewardNoiseStd = 0.1;

/// Finite-horizon episode loop over one MdpInstance. Known-model play
/// observes noiseless rewards; unknown-model play adds Gaussian noise
/// of std kRewardNoiseStd.
class EnvSession {
public:
    EnvSession(MdpInstance instance, EnvMode mode, std::uint64_t seed);

    /// Samples the next state, records the step. Returns (reward, s_next).
    std::pair<double, int> step(int a);

    int reset();

    bool done() const { return h_ > instance_.H; }
    int current_step() const { return h_; }
    int current_state() const { return s_; }
    EnvMode mode() const { return mode_; }
    const MdpInstance& instance() const { return instance_; }
    const std::vector<StepRecord>& episode_log() const { return log_; }

private:
    MdpInstance instance_;
    EnvMode mode_;
    Rng rng_;
    int h_ = 1;
    int s_ = 0;
    std::vector<StepRecord> log_;
};

/// Loads instance parameters into memory under the "mdp/" namespace and
/// allocates zeroed Q/V tables.
void init_mdp_memory(WorkingMemory& mem, const MdpInstance& instance, EnvMode mode);

}  // namespace stride
