#include <doctest.h>

#include <cmath>

#include "mptcs/errors.hpp"
#include "mptcs/evaluation.hpp"
#include "mptcs/rng.hpp"
#include "test_util.hpp"

using namespace mptcs;
using namespace mptcs::test;

namespace {

PoolEntry entry_with(const MiniBreakoutEnv& env, int numerator, int m, uint64_t sequence,
                     PassFailVector verdicts = {}) {
    PoolEntry e;
    e.test_case = env.sample_initial(sequence);
    e.sequence = sequence;
    e.generator = "ga";
    e.has_score = true;
    e.score = {numerator, m};
    if (verdicts.empty()) {
        verdicts.assign(static_cast<size_t>(m), 0);
        for (int i = 0; i < numerator; ++i) verdicts[static_cast<size_t>(i)] = 1;
    }
    e.verdicts = std::move(verdicts);
    return e;
}

// A state that defeats every policy: the ball lands two columns away from a
// paddle pinned at the far wall, one step from the bottom row.
TestCase hopeless_case(const MiniBreakoutEnv& env) {
    return {breakout_state(env, 0, 4, 8, 1, 1), 0};
}

// Only an immediate move right saves this one: the ball lands on column 6
// with the paddle starting at 5.
TestCase right_only_case(const MiniBreakoutEnv& env) {
    return {breakout_state(env, 5, 5, 8, 1, 1), 0};
}

}  // namespace

TEST_CASE("pass entropy over counts matches a direct computation") {
    KeyedRng rng(3, 0);
    for (int trial = 0; trial < 200; ++trial) {
        int p = rng.next_int(2, 12);
        std::vector<int> counts(static_cast<size_t>(p));
        long total = 0;
        for (auto& c : counts) {
            c = rng.next_int(0, 20);
            total += c;
        }
        double expected = 0.0;
        if (total > 0) {
            for (int c : counts) {
                if (c == 0) continue;
                double q = static_cast<double>(c) / static_cast<double>(total);
                expected -= q * std::log(q);
            }
        }
        CHECK(pass_entropy_of_counts(counts) == expected);
        CHECK(pass_entropy_of_counts(counts) <= std::log(static_cast<double>(p)) + 1e-9);
    }
}

TEST_CASE("pass entropy peaks exactly at uniform counts") {
    std::vector<int> uniform(20, 7);
    CHECK(pass_entropy_of_counts(uniform) == doctest::Approx(std::log(20.0)).epsilon(1e-12));
    std::vector<int> skewed(20, 7);
    skewed[0] = 8;
    CHECK(pass_entropy_of_counts(skewed) < std::log(20.0));
    std::vector<int> zero(20, 0);
    CHECK(pass_entropy_of_counts(zero) == 0.0);
}

TEST_CASE("a suite that fails everything has unit failure rate and zero entropy") {
    MiniBreakoutEnv env;
    PolicySet eval{{fixed_action(env, 1, "N1"), fixed_action(env, 1, "N2"),
                    fixed_action(env, 0, "L")},
                   "evaluation"};
    std::vector<TestCase> suite{hopeless_case(env), hopeless_case(env)};
    SuiteEvaluation e = evaluate_suite(suite, eval, env, {});
    CHECK(e.mean_failure_rate == 1.0);
    CHECK(e.cstc == 0.0);
    CHECK(e.pass_entropy == 0.0);
    for (int c : e.per_policy_pass_counts) CHECK(c == 0);
}

TEST_CASE("one pass among twenty policies gives the 95 percent rate") {
    MiniBreakoutEnv env;
    PolicySet eval{{}, "evaluation"};
    eval.members.push_back(fixed_action(env, 2, "right"));  // the only survivor
    for (int i = 0; i < 19; ++i)
        eval.members.push_back(fixed_action(env, 1, "noop-" + std::to_string(i)));

    std::vector<TestCase> suite{right_only_case(env)};
    SuiteEvaluation e = evaluate_suite(suite, eval, env, {});
    CHECK(e.mean_failure_rate == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(e.cstc == 1.0);
    CHECK(e.per_policy_pass_counts[0] == 1);
}

TEST_CASE("evaluation is deterministic and worker-count independent") {
    GridDodgeEnv env;
    PolicySet eval{{fixed_action(env, 4, "N"), fixed_action(env, 2, "L"), fixed_action(env, 3, "R"),
                    fixed_action(env, 0, "U")},
                   "evaluation"};
    std::vector<TestCase> suite;
    for (uint64_t key = 0; key < 12; ++key) suite.push_back(env.sample_initial(key));

    SuiteEvaluation serial = evaluate_suite(suite, eval, env, {}, 1);
    SuiteEvaluation parallel = evaluate_suite(suite, eval, env, {}, 8);
    CHECK(serial.mean_failure_rate == parallel.mean_failure_rate);
    CHECK(serial.cstc == parallel.cstc);
    CHECK(serial.unique_obs_per_case == parallel.unique_obs_per_case);
    CHECK(serial.pass_entropy == parallel.pass_entropy);
    CHECK(serial.per_policy_pass_counts == parallel.per_policy_pass_counts);
    CHECK(serial.policy_executions == 12 * 4);
}

TEST_CASE("empty suites are rejected") {
    MiniBreakoutEnv env;
    PolicySet eval{{fixed_action(env, 1, "N")}, "evaluation"};
    CHECK_THROWS_AS(evaluate_suite({}, eval, env, {}), EmptySuiteError);
}

TEST_CASE("top-k keeps the highest scores and favors earlier candidates on ties") {
    MiniBreakoutEnv env;
    std::vector<PoolEntry> pool;
    pool.push_back(entry_with(env, 1, 5, 0));  // 0.2
    pool.push_back(entry_with(env, 4, 5, 1));  // 0.8
    pool.push_back(entry_with(env, 2, 5, 2));  // 0.4

    TopKSelection sel = select_top_k(pool, 2);
    REQUIRE(sel.suite.size() == 2);
    CHECK_FALSE(sel.pool_too_small);
    CHECK(sel.suite[0] == pool[1].test_case);
    CHECK(sel.suite[1] == pool[2].test_case);

    TopKSelection all = select_top_k(pool, 10);
    CHECK(all.pool_too_small);
    CHECK(all.suite.size() == 3);

    std::vector<PoolEntry> ties;
    ties.push_back(entry_with(env, 3, 5, 7));
    ties.push_back(entry_with(env, 3, 5, 4));
    ties.push_back(entry_with(env, 3, 5, 9));
    TopKSelection tied = select_top_k(ties, 2);
    CHECK(tied.suite[0] == ties[1].test_case);  // sequence 4 first
    CHECK(tied.suite[1] == ties[0].test_case);

    std::vector<PoolEntry> unscored(1);
    unscored[0].test_case = env.sample_initial(0);
    CHECK_THROWS_AS(select_top_k(unscored, 1), std::invalid_argument);
}

TEST_CASE("the single-policy baseline keeps recent confirmed-solvable failures") {
    MiniBreakoutEnv env;
    std::vector<PoolEntry> pool;
    pool.push_back(entry_with(env, 2, 3, 0, {1, 1, 0}));  // tracked policy fails, confirmed
    pool.push_back(entry_with(env, 1, 3, 1, {0, 1, 0}));  // tracked policy passes: excluded
    pool.push_back(entry_with(env, 0, 3, 2, {1, 1, 1}));  // nobody passes: excluded
    pool.push_back(entry_with(env, 1, 3, 3, {1, 0, 0}));  // eligible, most recent

    auto suite = select_single_policy(pool, 10);
    REQUIRE(suite.size() == 2);
    CHECK(suite[0] == pool[3].test_case);  // recency first
    CHECK(suite[1] == pool[0].test_case);

    auto capped = select_single_policy(pool, 1);
    REQUIRE(capped.size() == 1);
    CHECK(capped[0] == pool[3].test_case);
}

TEST_CASE("the single-policy archive keeps the first eligible case per niche") {
    MiniBreakoutEnv env;
    Archive reference({0.0, 1.0, 0.0, 1.0}, 10, 10);

    std::vector<PoolEntry> pool;
    auto with_descriptor = [&](PoolEntry e, double variance) {
        e.descriptor = {variance, 0.5};
        return e;
    };
    // Two eligible entries in the same niche: the earlier one must hold it.
    pool.push_back(with_descriptor(entry_with(env, 2, 3, 0, {1, 1, 0}), 0.15));
    pool.push_back(with_descriptor(entry_with(env, 1, 3, 1, {1, 0, 0}), 0.16));
    // Different niche, eligible.
    pool.push_back(with_descriptor(entry_with(env, 1, 3, 2, {1, 0, 1}), 0.55));
    // Ineligible: tracked policy passes / nobody else passes.
    pool.push_back(with_descriptor(entry_with(env, 1, 3, 3, {0, 1, 0}), 0.75));
    pool.push_back(with_descriptor(entry_with(env, 0, 3, 4, {1, 1, 1}), 0.85));

    auto suite = select_single_policy_archive(pool, reference);
    REQUIRE(suite.size() == 2);
    CHECK(suite[0] == pool[0].test_case);
    CHECK(suite[1] == pool[2].test_case);
}

TEST_CASE("archived suites stay solvable for the selection set") {
    MiniBreakoutEnv env;
    PolicySet sel{{fixed_action(env, 0, "L"), fixed_action(env, 1, "N"), fixed_action(env, 2, "R")},
                  "selection"};
    Archive archive({0.0, 0.05, 0.0, 1.2}, 10, 10);
    CampaignConfig cfg;
    cfg.ga.iterations = 4;
    cfg.ga.samples_per_iteration = 50;
    cfg.ga.bootstrap_min_archive = 5;
    cfg.seed = 3;
    run_generation_campaign(archive, env, sel, cfg);
    REQUIRE(archive.size() > 0);

    SuiteEvaluation on_selection = evaluate_suite(archive.suite(), sel, env, cfg.oracle);
    CHECK(on_selection.cstc == 1.0);
    CHECK(on_selection.mean_failure_rate < 1.0);
}
