#include "mptcs/mutation.hpp"

#include "mptcs/errors.hpp"
#include "mptcs/mdp.hpp"
#include "mptcs/rng.hpp"

namespace mptcs {

namespace {

// Uniform redraw over [lo, hi] excluding the current value, so a triggered
// mutation is always visible. Degenerate one-point domains are left alone.
int32_t redraw_excluding(KeyedRng& rng, int32_t lo, int32_t hi, int32_t current) {
    if (hi <= lo) return current;
    int32_t v = lo + static_cast<int32_t>(rng.next_u64() % static_cast<uint64_t>(hi - lo));
    return v >= current ? v + 1 : v;
}

}  // namespace

TestCase mutate(const TestCase& test_case, uint64_t rng_key, const MutationOperatorSet& ops,
                const Environment& env) {
    if (!env.validate_state(test_case.state))
        throw SchemaMismatchError("mutate input state invalid: " +
                                  env.spec().schema.validate_message(test_case.state));

    KeyedRng rng(rng_key, streams::kMutation);
    TestCase out = test_case;
    auto& s = out.state.slots;

    for (const auto& op : ops.ops) {
        if (op.kind == MutationKind::RedrawKey && !ops.mutate_key) continue;
        if (!rng.next_bool(ops.mutation_probability)) continue;
        if (op.guard_offset >= 0 && s[static_cast<size_t>(op.guard_offset)] == 0) continue;

        switch (op.kind) {
            case MutationKind::RedrawInt:
                s[op.offset] = redraw_excluding(rng, op.lo, op.hi, s[op.offset]);
                break;
            case MutationKind::ToggleBool:
                s[op.offset] = 1 - s[op.offset];
                break;
            case MutationKind::ToggleSign:
                s[op.offset] = -s[op.offset];
                break;
            case MutationKind::ToggleGridCell: {
                int cell = rng.next_int(0, op.rows * op.cols - 1);
                s[op.offset + cell] = 1 - s[op.offset + cell];
                break;
            }
            case MutationKind::ToggleEntitySlot:
                if (s[op.offset] == 1) {
                    s[op.offset] = 0;
                    s[op.group_x] = 0;
                    s[op.group_y] = 0;
                    s[op.group_dir] = -1;
                    s[op.group_gold] = 0;
                } else {
                    s[op.offset] = 1;
                    s[op.group_x] = rng.next_int(0, op.x_hi);
                    s[op.group_y] = rng.next_int(0, op.y_hi);
                    s[op.group_dir] = rng.next_bool(0.5) ? 1 : -1;
                    s[op.group_gold] = rng.next_bool(op.gold_probability) ? 1 : 0;
                }
                break;
            case MutationKind::RedrawKey:
                out.key = rng.next_u64();
                break;
        }
    }
    return out;
}

}  // namespace mptcs
