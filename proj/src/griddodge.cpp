#include "mptcs/griddodge.hpp"

#include "mptcs/errors.hpp"
#include "mptcs/rng.hpp"

namespace mptcs {

namespace {
// Entity slot layout relative to the slot base offset.
constexpr int kEntX = 0;
constexpr int kEntY = 1;
constexpr int kEntDir = 2;
constexpr int kEntGold = 3;
constexpr int kEntActive = 4;
}  // namespace

EnvSpec GridDodgeEnv::make_spec(const GridDodgeConfig& c) {
    if (c.width < 3 || c.height < 3) throw ConfigError("griddodge grid too small");
    if (c.entity_capacity < 1) throw ConfigError("entity capacity must be positive");
    if (c.initial_entities_min < 0 || c.initial_entities_max > c.entity_capacity ||
        c.initial_entities_min > c.initial_entities_max)
        throw ConfigError("initial entity range invalid");
    EnvSpec spec;
    spec.id = "griddodge";
    spec.action_count = 5;
    spec.max_steps = c.max_steps;
    spec.gamma = c.gamma;
    spec.init_sampler_id = "griddodge-init-v1";

    std::vector<FieldSpec> fields = {
        {.name = "player_x", .kind = FieldKind::Int, .lo = 0, .hi = c.width - 1},
        {.name = "player_y", .kind = FieldKind::Int, .lo = 0, .hi = c.height - 1},
        {.name = "spawn_timer", .kind = FieldKind::Int, .lo = 0, .hi = c.spawn_interval},
        {.name = "steps_elapsed", .kind = FieldKind::Int, .lo = 0, .hi = 1 << 24},
    };
    for (int i = 0; i < c.entity_capacity; ++i) {
        std::string base = "ent" + std::to_string(i) + "_";
        fields.push_back({.name = base + "x", .kind = FieldKind::Int, .lo = 0, .hi = c.width - 1});
        fields.push_back({.name = base + "y", .kind = FieldKind::Int, .lo = 0, .hi = c.height - 1});
        fields.push_back({.name = base + "dir", .kind = FieldKind::Sign});
        fields.push_back({.name = base + "gold", .kind = FieldKind::Bool});
        fields.push_back({.name = base + "active", .kind = FieldKind::Bool});
    }
    spec.schema = StateSchema(std::move(fields));
    return spec;
}

GridDodgeEnv::GridDodgeEnv(GridDodgeConfig config)
    : Environment(make_spec(config)), config_(config) {
    const auto& schema = spec_.schema;
    layout_.player_x = schema.field("player_x").offset;
    layout_.player_y = schema.field("player_y").offset;
    layout_.spawn_timer = schema.field("spawn_timer").offset;
    layout_.steps_elapsed = schema.field("steps_elapsed").offset;
    layout_.entities = schema.field("ent0_x").offset;

    ops_.mutation_probability = config_.mutation_probability;
    ops_.mutate_key = config_.mutate_key;
    ops_.ops = {
        {.field = "player_x", .kind = MutationKind::RedrawInt, .offset = layout_.player_x,
         .lo = 0, .hi = config_.width - 1},
        {.field = "player_y", .kind = MutationKind::RedrawInt, .offset = layout_.player_y,
         .lo = 0, .hi = config_.height - 1},
        {.field = "spawn_timer", .kind = MutationKind::RedrawInt, .offset = layout_.spawn_timer,
         .lo = 0, .hi = config_.spawn_interval},
        {.field = "steps_elapsed", .kind = MutationKind::RedrawInt,
         .offset = layout_.steps_elapsed, .lo = 0, .hi = config_.max_steps},
    };
    for (int i = 0; i < config_.entity_capacity; ++i) {
        std::string base = "ent" + std::to_string(i) + "_";
        int off = entity_offset(i);
        // The activation operator leads its slot so the field operators see
        // the slot's final active flag.
        ops_.ops.push_back({.field = base + "active", .kind = MutationKind::ToggleEntitySlot,
                            .offset = off + kEntActive,
                            .group_x = off + kEntX, .group_y = off + kEntY,
                            .group_dir = off + kEntDir, .group_gold = off + kEntGold,
                            .x_hi = config_.width - 1, .y_hi = config_.height - 1,
                            .gold_probability = config_.gold_probability});
        ops_.ops.push_back({.field = base + "x", .kind = MutationKind::RedrawInt,
                            .offset = off + kEntX, .lo = 0, .hi = config_.width - 1,
                            .guard_offset = off + kEntActive});
        ops_.ops.push_back({.field = base + "y", .kind = MutationKind::RedrawInt,
                            .offset = off + kEntY, .lo = 0, .hi = config_.height - 1,
                            .guard_offset = off + kEntActive});
        ops_.ops.push_back({.field = base + "dir", .kind = MutationKind::ToggleSign,
                            .offset = off + kEntDir, .guard_offset = off + kEntActive});
        ops_.ops.push_back({.field = base + "gold", .kind = MutationKind::ToggleBool,
                            .offset = off + kEntGold, .guard_offset = off + kEntActive});
    }
    if (ops_.mutate_key) ops_.ops.push_back({.field = "", .kind = MutationKind::RedrawKey});
}

int GridDodgeEnv::observation_size() const {
    return 3 + config_.entity_capacity * kSlotStride;
}

void GridDodgeEnv::observe(const EnvState& s, std::span<double> out) const {
    const auto& L = layout_;
    out[0] = static_cast<double>(s.slots[L.player_x]) / (config_.width - 1);
    out[1] = static_cast<double>(s.slots[L.player_y]) / (config_.height - 1);
    out[2] = static_cast<double>(s.slots[L.spawn_timer]) / config_.spawn_interval;
    for (int i = 0; i < config_.entity_capacity; ++i) {
        int off = entity_offset(i);
        int o = 3 + i * kSlotStride;
        out[o + 0] = static_cast<double>(s.slots[off + kEntActive]);
        out[o + 1] = static_cast<double>(s.slots[off + kEntX]) / (config_.width - 1);
        out[o + 2] = static_cast<double>(s.slots[off + kEntY]) / (config_.height - 1);
        out[o + 3] = (s.slots[off + kEntDir] + 1) * 0.5;
        out[o + 4] = static_cast<double>(s.slots[off + kEntGold]);
    }
}

bool GridDodgeEnv::validate_state(const EnvState& state) const {
    if (!spec_.schema.validate(state)) return false;
    // Inactive slots are kept in canonical zeroed form.
    for (int i = 0; i < config_.entity_capacity; ++i) {
        int off = entity_offset(i);
        if (state.slots[off + kEntActive] == 0) {
            if (state.slots[off + kEntX] != 0 || state.slots[off + kEntY] != 0 ||
                state.slots[off + kEntDir] != -1 || state.slots[off + kEntGold] != 0)
                return false;
        }
    }
    return true;
}

StepOutcome GridDodgeEnv::transition(const EnvState& state, int action, uint64_t key,
                                     int step) const {
    if (action < 0 || action >= spec_.action_count)
        throw ActionOutOfRangeError("griddodge action " + std::to_string(action));

    const auto& L = layout_;
    const int W = config_.width;
    const int H = config_.height;

    StepOutcome out;
    out.state = state;
    auto& s = out.state.slots;

    int px = s[L.player_x];
    int py = s[L.player_y];
    switch (action) {
        case 0: py = std::max(0, py - 1); break;
        case 1: py = std::min(H - 1, py + 1); break;
        case 2: px = std::max(0, px - 1); break;
        case 3: px = std::min(W - 1, px + 1); break;
        default: break;
    }
    s[L.player_x] = px;
    s[L.player_y] = py;

    auto zero_slot = [&](int off) {
        s[off + kEntX] = 0;
        s[off + kEntY] = 0;
        s[off + kEntDir] = -1;
        s[off + kEntGold] = 0;
        s[off + kEntActive] = 0;
    };

    // Overlap resolution: enemies first, then gold pickups.
    auto resolve_overlaps = [&]() -> bool {
        for (int i = 0; i < config_.entity_capacity; ++i) {
            int off = entity_offset(i);
            if (s[off + kEntActive] == 1 && s[off + kEntGold] == 0 &&
                s[off + kEntX] == px && s[off + kEntY] == py)
                return true;  // enemy contact
        }
        for (int i = 0; i < config_.entity_capacity; ++i) {
            int off = entity_offset(i);
            if (s[off + kEntActive] == 1 && s[off + kEntGold] == 1 &&
                s[off + kEntX] == px && s[off + kEntY] == py) {
                out.reward += 1.0;
                zero_slot(off);
            }
        }
        return false;
    };

    bool defeat = resolve_overlaps();

    if (!defeat) {
        for (int i = 0; i < config_.entity_capacity; ++i) {
            int off = entity_offset(i);
            if (s[off + kEntActive] == 0) continue;
            int nx = s[off + kEntX] + s[off + kEntDir];
            if (nx < 0 || nx >= W) {
                zero_slot(off);
            } else {
                s[off + kEntX] = nx;
            }
        }
        defeat = resolve_overlaps();
    }

    if (!defeat) {
        // Spawn draws come from the keyed stream for this step only.
        if (s[L.spawn_timer] == 0) {
            KeyedRng rng(key, streams::kTransition + static_cast<uint64_t>(step));
            int slot = -1;
            for (int i = 0; i < config_.entity_capacity; ++i) {
                if (s[entity_offset(i) + kEntActive] == 0) {
                    slot = i;
                    break;
                }
            }
            if (slot >= 0) {
                int off = entity_offset(slot);
                bool from_left = rng.next_bool(0.5);
                s[off + kEntX] = from_left ? 0 : W - 1;
                s[off + kEntDir] = from_left ? 1 : -1;
                s[off + kEntY] = rng.next_int(0, H - 1);
                s[off + kEntGold] = rng.next_bool(config_.gold_probability) ? 1 : 0;
                s[off + kEntActive] = 1;
            }
            s[L.spawn_timer] = config_.spawn_interval;
        } else {
            s[L.spawn_timer] -= 1;
        }
    }

    s[L.steps_elapsed] = std::min(s[L.steps_elapsed] + 1, 1 << 24);

    if (defeat) {
        out.event = TerminalEvent::Defeat;
        out.reward = 0.0;
    }
    return out;
}

TestCase GridDodgeEnv::sample_initial(uint64_t key) const {
    KeyedRng rng(key, streams::kInitialState);
    const auto& L = layout_;
    const int W = config_.width;
    const int H = config_.height;

    TestCase tc;
    tc.key = key;
    tc.state = spec_.schema.zero_state();
    auto& s = tc.state.slots;
    // zero_state leaves Sign fields at -1, the canonical inactive value.
    int px = rng.next_int(0, W - 1);
    int py = rng.next_int(0, H - 1);
    s[L.player_x] = px;
    s[L.player_y] = py;
    s[L.spawn_timer] = rng.next_int(0, config_.spawn_interval);
    s[L.steps_elapsed] = 0;

    int count = rng.next_int(config_.initial_entities_min, config_.initial_entities_max);
    for (int i = 0; i < count; ++i) {
        int off = entity_offset(i);
        int x = rng.next_int(0, W - 1);
        int y = rng.next_int(0, H - 1);
        if (x == px && y == py) x = (x + 1) % W;  // keep the start cell clear
        s[off + kEntX] = x;
        s[off + kEntY] = y;
        s[off + kEntDir] = rng.next_bool(0.5) ? 1 : -1;
        s[off + kEntGold] = rng.next_bool(config_.gold_probability) ? 1 : 0;
        s[off + kEntActive] = 1;
    }
    return tc;
}

}  // namespace mptcs
