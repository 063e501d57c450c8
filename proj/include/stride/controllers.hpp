#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stride/bargain_complete.hpp"
#include "stride/bargain_incomplete.hpp"
#include "stride/boardgames.hpp"
#include "stride/mechanism_vcg.hpp"
#include "stride/planner_mdp.hpp"
#include "stride/session.hpp"

namespace stride {

/// One operation call with its arguments fully decided. The arguments of
/// every call in a step are fixed before the step executes; decisions
/// that depend on results go into the following step.
struct PlannedCall {
    std::string op;
    Json args;
};

struct ControllerStep {
    std::string question;
    ThoughtUnit thought;
    std::vector<PlannedCall> calls;  // one per thought.operations entry
};

/// Deterministic emulation of a reference algorithm as a Thought
/// sequence. next() may inspect session memory and the results of the
/// previously executed step (session.last_results).
class ScriptedController {
public:
    virtual ~ScriptedController() = default;
    virtual bool finished() const = 0;
    virtual ControllerStep next(Session& session) = 0;
};

/// Validates the thought, opens a trace record and runs the calls.
void run_step(Session& session, const ControllerStep& step);

/// Drives the controller to completion; returns the captured trace.
Trace run_controller(ScriptedController& controller, Session& session);

/// Value iteration backward pass (known model).
class ViController : public ScriptedController {
public:
    bool finished() const override { return exited_; }
    ControllerStep next(Session& session) override;

private:
    int h_ = 0;  // 0 = not started; counts H..1, then exit
    bool started_ = false;
    bool exited_ = false;
};

/// K episodes of optimistic planning, greedy acting and model updates.
/// The true instance is used only to report evaluation returns.
class UcbviController : public ScriptedController {
public:
    UcbviController(EnvSession& env, int episodes);

    bool finished() const override { return exited_; }
    ControllerStep next(Session& session) override;

    const std::vector<double>& episode_returns() const { return returns_; }

private:
    enum class Phase { Reset, Plan, ActQuery, ActUpdate, Done };

    EnvSession& env_;
    int K_;
    int k_ = 1;
    int plan_h_ = 0;
    int act_h_ = 0;
    int pending_state_ = 0;
    int pending_action_ = 0;
    double pending_reward_ = 0.0;
    int pending_next_ = 0;
    Phase phase_ = Phase::Reset;
    bool exited_ = false;
    std::vector<double> returns_;
};

/// Backward passes for the grand coalition and each exclusion, then the
/// Eq.-4 price of every agent. Prices are controller results, not memory.
class VcgController : public ScriptedController {
public:
    bool finished() const override { return exited_; }
    ControllerStep next(Session& session) override;

    const std::vector<double>& prices() const { return prices_; }

private:
    int N_ = 0, H_ = 0;
    bool started_ = false;
    int pass_ = 0;    // 0 = none, 1..N = excluding agent pass_-1
    int plan_h_ = 0;  // H..1 within a pass; 0 = pass done
    int price_agent_ = 0;
    bool collecting_price_ = false;
    bool exited_ = false;
    std::vector<double> prices_;
};

/// Alternating-offer backward induction (complete information).
class SpeController : public ScriptedController {
public:
    bool finished() const override { return exited_; }
    ControllerStep next(Session& session) override;

private:
    int T_ = 0;
    int t_ = 0;
    bool started_ = false;
    bool util_pending_ = false;  // CalcUtil executed, BackwardOneStep next
    bool price_pending_ = false;
    double last_price_ = 0.0;
    bool exited_ = false;
};

/// Bisection on the last belief followed by the backward pass
/// (one-sided incomplete information).
class SeController : public ScriptedController {
public:
    bool finished() const override { return exited_; }
    ControllerStep next(Session& session) override;

    int iterations() const { return iterations_; }

private:
    enum class Phase { Start, Bisect, SolveLast, Solve, Done };

    Phase phase_ = Phase::Start;
    int T_ = 0;
    int t_ = 0;
    double lo_ = 0.0, hi_ = 1.0, guess_ = 0.5;
    double u_next_ = 0.0, p_next_ = 0.0;
    int iterations_ = 0;
    bool exited_ = false;
};

/// CalculateScores + GetScores(depth 1), then a greedy pick.
class MinimaxController : public ScriptedController {
public:
    bool finished() const override { return exited_; }
    ControllerStep next(Session& session) override;

    int chosen_move() const;

private:
    int step_ = 0;
    int move_ = -1;
    bool exited_ = false;
};

/// One GetQ thought at (h, s); returns the lowest-index argmax action.
int act_greedy(Session& session, int h, int state);

/// Same via GetQExcluding with no exclusion (mechanism acting).
int vcg_greedy_action(Session& session, int h, int state);

/// Registers every module's operations on one registry.
void register_all_ops(Registry& registry);

/// Module names: mdp-known, mdp-unknown, vcg, bargain,
/// bargain-incomplete, boardgame.
Session make_session(const std::string& module, const Json& instance);

struct Demonstration {
    std::string module;
    Json instance;
    Trace trace;

    Json to_json() const;
    static Demonstration from_json(const Json& j);
};

/// Runs the module's scripted controller on the instance and captures
/// the trace for reuse as a few-shot exemplar.
Demonstration generate_demonstration(const std::string& module, const Json& instance);

}  // namespace stride
