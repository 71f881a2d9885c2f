#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mptcs/errors.hpp"
#include "mptcs/mutation.hpp"
#include "mptcs/schema.hpp"

namespace mptcs {

class Policy;

struct EnvSpec {
    std::string id;
    StateSchema schema;
    int action_count = 0;
    int max_steps = 0;
    double gamma = 0.99;  // metadata; only discounted-return helpers read it
    std::string init_sampler_id;

    void check() const;  // throws ConfigError on invariant violations
};

// The unit under selection: an initial state plus the key fixing all
// transition pseudorandomness. (state, key) fully determines execution
// under any deterministic policy.
struct TestCase {
    EnvState state;
    uint64_t key = 0;

    bool operator==(const TestCase&) const = default;
};

enum class TerminalEvent { None, Defeat, Win };

struct TrajectoryStep {
    EnvState state;  // state the action was chosen in
    std::vector<double> observation;
    std::vector<double> action_distribution;
    int action = 0;
    double reward = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    std::optional<int> terminated_at;
    TerminalEvent terminal_event = TerminalEvent::None;
    double return_sum = 0.0;
};

double discounted_return(const Trajectory& trajectory, double gamma);

struct OracleVerdict {
    bool failed = false;
    std::optional<int> failing_step;
};

struct OracleConfig {
    int horizon = 10;
    bool win_counts_as_failure = false;
};

struct StepOutcome {
    EnvState state;
    double reward = 0.0;
    TerminalEvent event = TerminalEvent::None;
};

class Environment {
public:
    virtual ~Environment() = default;

    const EnvSpec& spec() const { return spec_; }

    // Pure in (state, action, key, step): replaying the same inputs yields
    // a bit-identical outcome.
    virtual StepOutcome transition(const EnvState& state, int action, uint64_t key,
                                   int step) const = 0;

    virtual TestCase sample_initial(uint64_t key) const = 0;

    // Normalized [0,1] encoding, injective on reachable states modulo the
    // step counter. Fixed dimensionality per environment.
    virtual void observe(const EnvState& state, std::span<double> out) const = 0;
    virtual int observation_size() const = 0;
    std::vector<double> observe(const EnvState& state) const;

    virtual const MutationOperatorSet& mutation_ops() const = 0;

    // Schema validation plus environment-specific structural rules.
    virtual bool validate_state(const EnvState& state) const;

protected:
    explicit Environment(EnvSpec spec);
    EnvSpec spec_;
};

// Runs the policy from the test case until a terminal event or the step cap.
// step_cap < 0 means the environment's max_steps.
Trajectory execute(const TestCase& test_case, const Policy& policy, const Environment& env,
                   int step_cap = -1);

// Pure function of the trajectory: failure iff an oracle-relevant terminal
// event occurred at a step index below the horizon.
OracleVerdict oracle_verdict(const Trajectory& trajectory, const OracleConfig& config);

OracleVerdict oracle(const TestCase& test_case, const Policy& policy, const Environment& env,
                     const OracleConfig& config);

}  // namespace mptcs
