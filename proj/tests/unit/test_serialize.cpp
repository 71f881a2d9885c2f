#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "mptcs/rng.hpp"
#include "mptcs/serialize.hpp"
#include "test_util.hpp"

using namespace mptcs;
using namespace mptcs::test;

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mptcs-test-" + std::to_string(KeyedRng(reinterpret_cast<uintptr_t>(this), 0)
                                                   .next_u64()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("states and test cases round-trip through json") {
    GridDodgeEnv env;
    KeyedRng rng(1, 0);
    for (int i = 0; i < 50; ++i) {
        TestCase tc = env.sample_initial(rng.next_u64());
        tc = mutate(tc, rng.next_u64(), env.mutation_ops(), env);
        json j = test_case_to_json(env.spec().schema, tc);
        TestCase back = test_case_from_json(env.spec().schema, j);
        CHECK(back == tc);
    }
}

TEST_CASE("deserialization rejects out-of-domain states") {
    MiniBreakoutEnv env;
    json j = state_to_json(env.spec().schema, env.sample_initial(0).state);
    j["ball_x"] = 99;
    CHECK_THROWS_AS(state_from_json(env.spec().schema, j), SchemaMismatchError);
    j.erase("ball_x");
    CHECK_THROWS_AS(state_from_json(env.spec().schema, j), SchemaMismatchError);
}

TEST_CASE("trajectory dumps carry the terminal record") {
    MiniBreakoutEnv env;
    TestCase tc{breakout_state(env, 0, 4, 8, 1, 1), 0};
    Trajectory traj = execute(tc, *fixed_action(env, 1), env);
    json j = trajectory_to_json(env.spec().schema, traj);
    CHECK(j.at("terminated_at") == 0);
    CHECK(j.at("terminal_event") == "defeat");
    CHECK(j.at("steps").size() == traj.steps.size());
}

TEST_CASE("environment configs rebuild identical dynamics") {
    GridDodgeConfig cfg;
    cfg.width = 8;
    cfg.spawn_interval = 2;
    cfg.gold_probability = 0.5;
    GridDodgeEnv env(cfg);
    json j = environment_config_to_json(env);
    auto rebuilt = make_environment(j);
    TestCase tc = env.sample_initial(12);
    CHECK(rebuilt->sample_initial(12).state == tc.state);
    StepOutcome a = env.transition(tc.state, 3, tc.key, 0);
    StepOutcome b = rebuilt->transition(tc.state, 3, tc.key, 0);
    CHECK(a.state == b.state);

    json bad = j;
    bad["id"] = "unknown-env";
    CHECK_THROWS_AS(make_environment(bad), ConfigError);
}

TEST_CASE("archives serialize to stable bytes and reload exactly") {
    TempDir dir;
    MiniBreakoutEnv env;
    PolicySet sel{{fixed_action(env, 0, "L"), fixed_action(env, 1, "N"), fixed_action(env, 2, "R")},
                  "selection"};
    Archive archive({0.0, 0.05, 0.0, 1.2}, 10, 10);
    KeyedRng rng(8, 0);
    for (int i = 0; i < 100; ++i)
        mptcs_insert(archive, env.sample_initial(rng.next_u64()), sel, env, {});
    REQUIRE(archive.size() > 0);

    fs::path file = dir.path / "archive.json";
    save_archive(archive, env, file);
    Archive loaded = load_archive(env, file);
    CHECK(loaded.size() == archive.size());

    fs::path file2 = dir.path / "archive2.json";
    save_archive(loaded, env, file2);
    CHECK(read_text_file(file) == read_text_file(file2));
}

TEST_CASE("pools round-trip through the jsonl format") {
    TempDir dir;
    GridDodgeEnv env;
    std::vector<PoolEntry> pool;
    KeyedRng rng(4, 0);
    for (int i = 0; i < 20; ++i) {
        PoolEntry e;
        e.test_case = env.sample_initial(rng.next_u64());
        e.sequence = static_cast<uint64_t>(i);
        e.iteration = i / 5;
        e.parent_sequence = i % 3 == 0 ? -1 : i - 1;
        e.generator = i % 2 ? "ga" : "mdpfuzz";
        if (i % 2) {
            e.has_score = true;
            e.score = {2, 5};
            e.descriptor = {0.01 * i, 0.5};
            e.verdicts = {1, 1, 0, 0, 0};
        }
        pool.push_back(std::move(e));
    }
    fs::path file = dir.path / "pool.jsonl";
    save_pool(pool, env.spec().schema, file);
    auto loaded = load_pool(env.spec().schema, file);
    REQUIRE(loaded.size() == pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
        CHECK(loaded[i].test_case == pool[i].test_case);
        CHECK(loaded[i].sequence == pool[i].sequence);
        CHECK(loaded[i].parent_sequence == pool[i].parent_sequence);
        CHECK(loaded[i].generator == pool[i].generator);
        CHECK(loaded[i].has_score == pool[i].has_score);
        if (pool[i].has_score) {
            CHECK(loaded[i].score == pool[i].score);
            CHECK(loaded[i].descriptor.obs_variance == pool[i].descriptor.obs_variance);
            CHECK(loaded[i].verdicts == pool[i].verdicts);
        }
    }
}

TEST_CASE("policies reload with exact behavior") {
    TempDir dir;
    MiniBreakoutEnv env;

    auto net = NetworkPolicy::random("net-000", {env.observation_size(), 16, 16, 3}, 9);
    fs::path net_file = dir.path / "net-000.bin";
    save_policy(net, net_file);
    PolicyPtr net_back = load_policy(net_file, env);
    CHECK(net_back->kind() == "network");
    CHECK(net_back->id() == "net-000");

    BreakoutTrackerParams params;
    params.dead_zone = 1;
    params.trigger_y = 4;
    params.temperature = 0.123456789;
    BreakoutTrackerPolicy heur("heur-bt-000", env.observation_size(), params);
    fs::path heur_file = dir.path / "heur-bt-000.json";
    save_policy(heur, heur_file);
    PolicyPtr heur_back = load_policy(heur_file, env);
    CHECK(heur_back->kind() == "heuristic");

    for (uint64_t key = 0; key < 25; ++key) {
        auto obs = env.observe(env.sample_initial(key).state);
        CHECK(net.act_distribution(obs) == net_back->act_distribution(obs));
        CHECK(heur.act_distribution(obs) == heur_back->act_distribution(obs));
    }
}

TEST_CASE("manifests round-trip") {
    TempDir dir;
    PolicyManifest m;
    m.env_id = "minibreakout";
    m.seed = 42;
    m.rank_episodes = 200;
    m.policies = {{"a", "heuristic", "policies/a.json", 12.5, 1},
                  {"b", "network", "policies/b.bin", 3.25, 2}};
    m.sel_ids = {"a"};
    m.eval_ids = {"b"};
    fs::path file = dir.path / "manifest.json";
    save_manifest(m, file);
    PolicyManifest back = load_manifest(file);
    CHECK(back.env_id == m.env_id);
    CHECK(back.seed == m.seed);
    CHECK(back.policies.size() == 2);
    CHECK(back.policies[1].mean_return == 3.25);
    CHECK(back.sel_ids == m.sel_ids);
    CHECK(back.eval_ids == m.eval_ids);
}

TEST_CASE("comparison csv has one row per method and repetition") {
    TempDir dir;
    ComparisonReport report;
    for (int rep = 0; rep < 2; ++rep) {
        for (const char* method : {"mptcs", "sp", "topk"}) {
            MethodRow row;
            row.method = method;
            row.repetition = rep;
            row.seed = 7;
            row.evaluation.suite_size = 10;
            row.evaluation.mean_failure_rate = 0.5 + 0.01 * rep;
            report.rows.push_back(std::move(row));
        }
    }
    fs::path file = dir.path / "comparison.csv";
    write_comparison_csv(report, file);
    std::string text = read_text_file(file);
    CHECK(text.find("method,repetition,seed") == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);  // header + 6 rows

    std::string summary = render_summary(report);
    CHECK(summary.find("mptcs") != std::string::npos);
    CHECK(summary.find("topk") != std::string::npos);
}
