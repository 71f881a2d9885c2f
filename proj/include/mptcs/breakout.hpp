#pragma once

#include "mptcs/mdp.hpp"

namespace mptcs {

struct MiniBreakoutConfig {
    int width = 10;
    int height = 10;
    int brick_rows = 3;
    int brick_y0 = 1;  // top row of the brick band
    int max_steps = 50;
    double gamma = 0.99;
    double mutation_probability = 0.10;
    bool mutate_key = true;
};

// Deterministic paddle-and-bricks environment on a WxH grid. Actions:
// 0 = left, 1 = no-op, 2 = right. The transition ignores the key entirely;
// all randomness in a test case comes from its initial state.
class MiniBreakoutEnv : public Environment {
public:
    explicit MiniBreakoutEnv(MiniBreakoutConfig config = {});

    const MiniBreakoutConfig& config() const { return config_; }

    StepOutcome transition(const EnvState& state, int action, uint64_t key,
                           int step) const override;
    TestCase sample_initial(uint64_t key) const override;
    using Environment::observe;
    void observe(const EnvState& state, std::span<double> out) const override;
    int observation_size() const override;
    const MutationOperatorSet& mutation_ops() const override { return ops_; }

    // Slot offsets for direct state access.
    struct Layout {
        int paddle_x, ball_x, ball_y, ball_dx, ball_dy, bricks, steps_elapsed;
    };
    const Layout& layout() const { return layout_; }

private:
    static EnvSpec make_spec(const MiniBreakoutConfig& config);

    MiniBreakoutConfig config_;
    Layout layout_{};
    MutationOperatorSet ops_;
};

}  // namespace mptcs
