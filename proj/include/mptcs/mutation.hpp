#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mptcs/schema.hpp"

namespace mptcs {

class Environment;
struct TestCase;

enum class MutationKind {
    RedrawInt,        // uniform redraw excluding the current value
    ToggleBool,
    ToggleSign,
    ToggleGridCell,   // flip one uniformly chosen cell
    ToggleEntitySlot, // activate with fresh draws / deactivate and zero the group
    RedrawKey,        // re-draw the test case key
};

// One per-field operator. Guarded operators apply only while the guard slot
// is nonzero (entity fields gated on their slot's active flag).
struct FieldMutation {
    std::string field;  // empty for RedrawKey
    MutationKind kind = MutationKind::RedrawInt;
    int offset = -1;          // slot offset of the mutated value
    int32_t lo = 0, hi = 0;   // RedrawInt domain
    int rows = 0, cols = 0;   // ToggleGridCell
    int guard_offset = -1;    // -1: unconditional

    // ToggleEntitySlot group: offsets and draw domains for the fields
    // activated or zeroed together with this slot.
    int group_x = -1, group_y = -1, group_dir = -1, group_gold = -1;
    int32_t x_hi = 0, y_hi = 0;
    double gold_probability = 0.5;
};

struct MutationOperatorSet {
    std::vector<FieldMutation> ops;
    double mutation_probability = 0.10;
    bool mutate_key = true;  // whether the RedrawKey operator participates
};

// Applies each operator independently with `ops.mutation_probability`.
// The output always validates against the environment's schema.
TestCase mutate(const TestCase& test_case, uint64_t rng_key, const MutationOperatorSet& ops,
                const Environment& env);

}  // namespace mptcs
