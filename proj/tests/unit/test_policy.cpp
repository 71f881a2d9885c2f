#include <doctest.h>

#include "mptcs/errors.hpp"
#include "mptcs/rng.hpp"
#include "test_util.hpp"

using namespace mptcs;

TEST_CASE("argmax breaks ties toward the lowest index") {
    std::vector<double> d{0.4, 0.4, 0.2};
    CHECK(argmax_action(d) == 0);
    std::vector<double> e{0.1, 0.45, 0.45};
    CHECK(argmax_action(e) == 1);
}

TEST_CASE("zero temperature collapses a heuristic to a one-hot vector") {
    MiniBreakoutEnv env;
    BreakoutTrackerParams p;
    p.temperature = 0.0;
    BreakoutTrackerPolicy policy("bt", env.observation_size(), p);
    auto obs = env.observe(env.sample_initial(1).state);
    auto dist = policy.act_distribution(obs);
    int ones = 0;
    for (double v : dist) {
        CHECK((v == 0.0 || v == 1.0));
        if (v == 1.0) ++ones;
    }
    CHECK(ones == 1);
}

TEST_CASE("random-weight networks emit strictly interior distributions") {
    MiniBreakoutEnv env;
    auto net = NetworkPolicy::random("n", {env.observation_size(), 64, 64, 3}, 11);
    for (uint64_t key = 0; key < 20; ++key) {
        auto obs = env.observe(env.sample_initial(key).state);
        auto dist = net.act_distribution(obs);
        double sum = 0.0;
        for (double v : dist) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("fixed weights and observation give identical vectors every call") {
    GridDodgeEnv env;
    auto net = NetworkPolicy::random("n", {env.observation_size(), 32, 32, 5}, 4);
    auto obs = env.observe(env.sample_initial(9).state);
    auto first = net.act_distribution(obs);
    for (int i = 0; i < 5; ++i) CHECK(net.act_distribution(obs) == first);
}

TEST_CASE("heuristic distributions are valid across sampled states") {
    GridDodgeEnv env;
    KeyedRng rng(1, 0);
    for (int trial = 0; trial < 10; ++trial) {
        DodgeGreedyParams p;
        p.danger_radius = rng.next_int(0, 3);
        p.flee_weight = rng.next_unit() * 2;
        p.gold_weight = rng.next_unit();
        p.temperature = 0.05 + rng.next_unit();
        DodgeGreedyPolicy policy("dg", env.observation_size(), p);
        for (uint64_t key = 0; key < 30; ++key) {
            auto dist = policy.act_distribution(env.observe(env.sample_initial(key).state));
            double sum = 0.0;
            for (double v : dist) {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("dimension mismatches are rejected") {
    MiniBreakoutEnv env;
    BreakoutTrackerPolicy policy("bt", env.observation_size(), {});
    std::vector<double> short_obs(5, 0.0);
    CHECK_THROWS_AS((void)policy.act_distribution(short_obs), DimensionMismatchError);
}

TEST_CASE("tracking heuristic chases the ball once triggered") {
    MiniBreakoutEnv env;
    BreakoutTrackerParams p;
    p.temperature = 0.0;
    p.dead_zone = 0;
    p.trigger_y = 0;
    BreakoutTrackerPolicy policy("bt", env.observation_size(), p);

    auto obs = env.observe(test::breakout_state(env, 2, 7, 5, 1, 1));
    CHECK(policy.act(obs) == 2);  // ball to the right: move right
    obs = env.observe(test::breakout_state(env, 8, 3, 5, 1, 1));
    CHECK(policy.act(obs) == 0);
    obs = env.observe(test::breakout_state(env, 3, 3, 5, 1, 1));
    CHECK(policy.act(obs) == 1);
}
