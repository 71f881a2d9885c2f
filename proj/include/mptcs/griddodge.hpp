#pragma once

#include "mptcs/mdp.hpp"

namespace mptcs {

struct GridDodgeConfig {
    int width = 10;
    int height = 10;
    int entity_capacity = 8;
    int spawn_interval = 3;        // steps between spawn attempts
    double gold_probability = 0.3; // chance a spawned entity is gold
    int initial_entities_min = 2;
    int initial_entities_max = 4;
    int max_steps = 50;
    double gamma = 0.99;
    double mutation_probability = 0.10;
    bool mutate_key = true;
};

// Collect gold, dodge enemies. Entities stream horizontally across the grid;
// new ones spawn from the side walls on a timer. All spawn randomness is
// drawn from the test-case key keyed by the step index, so identical
// (state, action, key, step) inputs always produce the same successor.
// Actions: 0 = up, 1 = down, 2 = left, 3 = right, 4 = no-op.
class GridDodgeEnv : public Environment {
public:
    explicit GridDodgeEnv(GridDodgeConfig config = {});

    const GridDodgeConfig& config() const { return config_; }

    StepOutcome transition(const EnvState& state, int action, uint64_t key,
                           int step) const override;
    TestCase sample_initial(uint64_t key) const override;
    using Environment::observe;
    void observe(const EnvState& state, std::span<double> out) const override;
    int observation_size() const override;
    const MutationOperatorSet& mutation_ops() const override { return ops_; }
    bool validate_state(const EnvState& state) const override;

    struct Layout {
        int player_x, player_y, spawn_timer, steps_elapsed;
        int entities;  // base offset; each slot is [x, y, dir, gold, active]
    };
    static constexpr int kSlotStride = 5;
    const Layout& layout() const { return layout_; }

    int entity_offset(int slot) const { return layout_.entities + slot * kSlotStride; }

private:
    static EnvSpec make_spec(const GridDodgeConfig& config);

    GridDodgeConfig config_;
    Layout layout_{};
    MutationOperatorSet ops_;
};

}  // namespace mptcs
