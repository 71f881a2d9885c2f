#include "mptcs/mdp.hpp"

#include <cmath>

#include "mptcs/errors.hpp"
#include "mptcs/policy.hpp"

namespace mptcs {

void EnvSpec::check() const {
    if (action_count < 2) throw ConfigError("action_count must be >= 2");
    if (max_steps < 1) throw ConfigError("max_steps must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
    if (schema.fields().empty()) throw ConfigError("state schema must not be empty");
}

Environment::Environment(EnvSpec spec) : spec_(std::move(spec)) { spec_.check(); }

std::vector<double> Environment::observe(const EnvState& state) const {
    std::vector<double> out(static_cast<size_t>(observation_size()));
    observe(state, out);
    return out;
}

bool Environment::validate_state(const EnvState& state) const {
    return spec_.schema.validate(state);
}

double discounted_return(const Trajectory& trajectory, double gamma) {
    double acc = 0.0;
    double weight = 1.0;
    for (const auto& step : trajectory.steps) {
        acc += weight * step.reward;
        weight *= gamma;
    }
    return acc;
}

Trajectory execute(const TestCase& test_case, const Policy& policy, const Environment& env,
                   int step_cap) {
    if (!env.validate_state(test_case.state))
        throw SchemaMismatchError("test case state invalid for " + env.spec().id + ": " +
                                  env.spec().schema.validate_message(test_case.state));
    if (policy.observation_size() != env.observation_size())
        throw DimensionMismatchError("policy " + policy.id() + " expects obs size " +
                                     std::to_string(policy.observation_size()) + ", env provides " +
                                     std::to_string(env.observation_size()));

    int cap = step_cap < 0 ? env.spec().max_steps : std::min(step_cap, env.spec().max_steps);

    Trajectory trajectory;
    trajectory.steps.reserve(static_cast<size_t>(cap));
    EnvState state = test_case.state;

    for (int step = 0; step < cap; ++step) {
        TrajectoryStep rec;
        rec.observation = env.observe(state);
        rec.action_distribution = policy.act_distribution(rec.observation);
        if (static_cast<int>(rec.action_distribution.size()) != env.spec().action_count)
            throw ActionOutOfRangeError("policy " + policy.id() + " emitted " +
                                        std::to_string(rec.action_distribution.size()) +
                                        " action probabilities, env has " +
                                        std::to_string(env.spec().action_count));
        rec.action = argmax_action(rec.action_distribution);
        StepOutcome outcome = env.transition(state, rec.action, test_case.key, step);
        rec.state = std::move(state);
        rec.reward = outcome.reward;
        trajectory.return_sum += outcome.reward;
        trajectory.steps.push_back(std::move(rec));

        if (outcome.event != TerminalEvent::None) {
            trajectory.terminated_at = step;
            trajectory.terminal_event = outcome.event;
            return trajectory;
        }
        state = std::move(outcome.state);
    }
    return trajectory;
}

OracleVerdict oracle_verdict(const Trajectory& trajectory, const OracleConfig& config) {
    OracleVerdict verdict;
    if (!trajectory.terminated_at.has_value()) return verdict;
    bool relevant = trajectory.terminal_event == TerminalEvent::Defeat ||
                    (config.win_counts_as_failure && trajectory.terminal_event == TerminalEvent::Win);
    if (relevant && *trajectory.terminated_at < config.horizon) {
        verdict.failed = true;
        verdict.failing_step = trajectory.terminated_at;
    }
    return verdict;
}

OracleVerdict oracle(const TestCase& test_case, const Policy& policy, const Environment& env,
                     const OracleConfig& config) {
    if (config.horizon > env.spec().max_steps)
        throw ConfigError("oracle horizon exceeds environment max_steps");
    // The verdict only depends on the trajectory prefix up to the horizon.
    Trajectory trajectory = execute(test_case, policy, env, config.horizon);
    return oracle_verdict(trajectory, config);
}

}  // namespace mptcs
