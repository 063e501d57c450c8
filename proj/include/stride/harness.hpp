#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stride/controllers.hpp"

namespace stride {

/// One experiment: a problem kind, its size parameters, and explicit
/// seeding. Field relevance depends on the kind (N only for vcg, T only
/// for bargaining, K only for mdp-unknown, ...).
struct ExperimentConfig {
    std::string kind;  // mdp-known | mdp-unknown | vcg | bargain | bargain-incomplete | boardgame
    int H = 5;
    int S = 3;
    int A = 3;
    int N = 2;
    int T = 3;
    int K = 40;
    int instances = 20;
    std::uint64_t seed = 0;
    std::string out_dir;  // empty: no files written

    void validate() const;
};

struct InstanceRecord {
    std::uint64_t seed = 0;
    Json data;
};

struct MetricsReport {
    ExperimentConfig config;
    std::vector<InstanceRecord> records;
    Json aggregate;

    std::string records_jsonl() const;
    std::string aggregate_csv() const;
};

/// Discount factors uniform on (0.5, 1.0).
CompleteBargainInstance sample_complete_bargain(int T, std::uint64_t seed);

/// Additionally samples the buyer's private value uniform on (0.1, 0.9).
IncompleteBargainInstance sample_incomplete_bargain(int T, std::uint64_t seed);

/// Fraction of trajectory steps whose action attains max_a Q*_h(s, a)
/// within the argmax tie tolerance.
double eval_optimal_action(const std::vector<StepRecord>& trajectory, const ValueTables& oracle);

/// All actions optimal for the summed reported rewards AND every price
/// within 1e-2 of the oracle prices.
bool eval_vcg(const std::vector<StepRecord>& trajectory, const std::vector<double>& prices,
              const MechanismInstance& instance, const VcgOutcome& oracle);

struct BargainEvent {
    int t = 0;
    Role proposer = Role::Buyer;
    double price = 0.0;
    Response response = Response::Reject;
};

inline constexpr double kBargainPriceTolerance = 1e-4;

/// Agreement at t=1 at the schedule price.
bool eval_bargain_complete(const std::vector<BargainEvent>& transcript,
                           const SpeSchedule& schedule);

/// Every seller offer on the SE schedule and every buyer response equal
/// to buyer_respond's output.
bool eval_bargain_incomplete(const std::vector<BargainEvent>& transcript,
                             const IncompleteBargainInstance& instance,
                             const SeSchedule& schedule);

/// Scripted-vs-scripted play of one complete-information game; the
/// transcript stops at the first acceptance.
std::vector<BargainEvent> play_complete_bargain(const CompleteBargainInstance& instance);
std::vector<BargainEvent> play_incomplete_bargain(const IncompleteBargainInstance& instance);

/// Generates instances, runs the scripted agents, computes the matching
/// metric and (when out_dir is set) writes records.jsonl/aggregate.csv.
MetricsReport run_experiment(const ExperimentConfig& config);

}  // namespace stride
