#include "mptcs/breakout.hpp"

#include "mptcs/errors.hpp"
#include "mptcs/rng.hpp"

namespace mptcs {

EnvSpec MiniBreakoutEnv::make_spec(const MiniBreakoutConfig& c) {
    if (c.width < 3 || c.height < 4) throw ConfigError("minibreakout grid too small");
    if (c.brick_rows < 1 || c.brick_y0 < 0 || c.brick_y0 + c.brick_rows > c.height - 2)
        throw ConfigError("brick band must leave a free row above the paddle row");
    EnvSpec spec;
    spec.id = "minibreakout";
    spec.action_count = 3;
    spec.max_steps = c.max_steps;
    spec.gamma = c.gamma;
    spec.init_sampler_id = "minibreakout-init-v1";
    spec.schema = StateSchema({
        {.name = "paddle_x", .kind = FieldKind::Int, .lo = 0, .hi = c.width - 1},
        {.name = "ball_x", .kind = FieldKind::Int, .lo = 0, .hi = c.width - 1},
        {.name = "ball_y", .kind = FieldKind::Int, .lo = 0, .hi = c.height - 1},
        {.name = "ball_dx", .kind = FieldKind::Sign},
        {.name = "ball_dy", .kind = FieldKind::Sign},
        {.name = "bricks", .kind = FieldKind::Grid, .rows = c.brick_rows, .cols = c.width},
        {.name = "steps_elapsed", .kind = FieldKind::Int, .lo = 0, .hi = 1 << 24},
    });
    return spec;
}

MiniBreakoutEnv::MiniBreakoutEnv(MiniBreakoutConfig config)
    : Environment(make_spec(config)), config_(config) {
    const auto& schema = spec_.schema;
    layout_.paddle_x = schema.field("paddle_x").offset;
    layout_.ball_x = schema.field("ball_x").offset;
    layout_.ball_y = schema.field("ball_y").offset;
    layout_.ball_dx = schema.field("ball_dx").offset;
    layout_.ball_dy = schema.field("ball_dy").offset;
    layout_.bricks = schema.field("bricks").offset;
    layout_.steps_elapsed = schema.field("steps_elapsed").offset;

    ops_.mutation_probability = config_.mutation_probability;
    ops_.mutate_key = config_.mutate_key;
    ops_.ops = {
        {.field = "paddle_x", .kind = MutationKind::RedrawInt, .offset = layout_.paddle_x,
         .lo = 0, .hi = config_.width - 1},
        {.field = "ball_x", .kind = MutationKind::RedrawInt, .offset = layout_.ball_x,
         .lo = 0, .hi = config_.width - 1},
        {.field = "ball_y", .kind = MutationKind::RedrawInt, .offset = layout_.ball_y,
         .lo = 0, .hi = config_.height - 1},
        {.field = "ball_dx", .kind = MutationKind::ToggleSign, .offset = layout_.ball_dx},
        {.field = "ball_dy", .kind = MutationKind::ToggleSign, .offset = layout_.ball_dy},
        {.field = "bricks", .kind = MutationKind::ToggleGridCell, .offset = layout_.bricks,
         .rows = config_.brick_rows, .cols = config_.width},
        {.field = "steps_elapsed", .kind = MutationKind::RedrawInt,
         .offset = layout_.steps_elapsed, .lo = 0, .hi = config_.max_steps},
    };
    if (ops_.mutate_key) ops_.ops.push_back({.field = "", .kind = MutationKind::RedrawKey});
}

int MiniBreakoutEnv::observation_size() const {
    return 5 + config_.brick_rows * config_.width;
}

void MiniBreakoutEnv::observe(const EnvState& s, std::span<double> out) const {
    const auto& L = layout_;
    out[0] = static_cast<double>(s.slots[L.paddle_x]) / (config_.width - 1);
    out[1] = static_cast<double>(s.slots[L.ball_x]) / (config_.width - 1);
    out[2] = static_cast<double>(s.slots[L.ball_y]) / (config_.height - 1);
    out[3] = (s.slots[L.ball_dx] + 1) * 0.5;
    out[4] = (s.slots[L.ball_dy] + 1) * 0.5;
    int cells = config_.brick_rows * config_.width;
    for (int i = 0; i < cells; ++i) out[5 + i] = static_cast<double>(s.slots[L.bricks + i]);
}

StepOutcome MiniBreakoutEnv::transition(const EnvState& state, int action, uint64_t /*key*/,
                                        int /*step*/) const {
    if (action < 0 || action >= spec_.action_count)
        throw ActionOutOfRangeError("minibreakout action " + std::to_string(action));

    const auto& L = layout_;
    const int W = config_.width;
    const int H = config_.height;

    StepOutcome out;
    out.state = state;
    auto& s = out.state.slots;

    if (action == 0) s[L.paddle_x] = std::max(0, s[L.paddle_x] - 1);
    if (action == 2) s[L.paddle_x] = std::min(W - 1, s[L.paddle_x] + 1);

    int dx = s[L.ball_dx];
    int dy = s[L.ball_dy];
    int nx = s[L.ball_x] + dx;
    if (nx < 0 || nx >= W) {
        dx = -dx;
        nx = s[L.ball_x] + dx;
    }
    int ny = s[L.ball_y] + dy;
    if (ny < 0) {
        dy = 1;
        ny = s[L.ball_y] + dy;
    }

    int band_lo = config_.brick_y0;
    int band_hi = config_.brick_y0 + config_.brick_rows;  // exclusive
    if (ny >= band_lo && ny < band_hi && s[L.bricks + (ny - band_lo) * W + nx] == 1) {
        s[L.bricks + (ny - band_lo) * W + nx] = 0;
        out.reward = 1.0;
        dy = -dy;
    } else if (ny >= H - 1) {
        ny = H - 1;
        if (nx == s[L.paddle_x]) {
            dy = -1;  // paddle bounce
        } else {
            out.event = TerminalEvent::Defeat;
        }
    }

    s[L.ball_x] = nx;
    s[L.ball_y] = ny;
    s[L.ball_dx] = dx;
    s[L.ball_dy] = dy;
    s[L.steps_elapsed] = std::min(s[L.steps_elapsed] + 1, 1 << 24);

    if (out.event == TerminalEvent::Defeat) {
        out.reward = 0.0;
        return out;
    }

    bool any_brick = false;
    int cells = config_.brick_rows * W;
    for (int i = 0; i < cells && !any_brick; ++i) any_brick = s[L.bricks + i] == 1;
    if (!any_brick) out.event = TerminalEvent::Win;
    return out;
}

TestCase MiniBreakoutEnv::sample_initial(uint64_t key) const {
    KeyedRng rng(key, streams::kInitialState);
    const auto& L = layout_;
    const int W = config_.width;
    const int H = config_.height;

    TestCase tc;
    tc.key = key;
    tc.state = spec_.schema.zero_state();
    auto& s = tc.state.slots;
    s[L.paddle_x] = rng.next_int(0, W - 1);
    s[L.ball_x] = rng.next_int(0, W - 1);
    // Free zone between the brick band and the paddle row.
    s[L.ball_y] = rng.next_int(config_.brick_y0 + config_.brick_rows, H - 2);
    s[L.ball_dx] = rng.next_bool(0.5) ? 1 : -1;
    s[L.ball_dy] = rng.next_bool(0.5) ? 1 : -1;
    int cells = config_.brick_rows * W;
    for (int i = 0; i < cells; ++i) s[L.bricks + i] = 1;
    s[L.steps_elapsed] = 0;
    return tc;
}

}  // namespace mptcs
