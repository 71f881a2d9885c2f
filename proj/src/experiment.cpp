#include "mptcs/experiment.hpp"

#include <algorithm>

#include "mptcs/errors.hpp"
#include "mptcs/rng.hpp"

namespace mptcs {

namespace fs = std::filesystem;

ExperimentConfig load_experiment_config(const fs::path& path, const ConfigOverrides& overrides) {
    json j = json::parse(read_text_file(path));
    if (j.value("schema", "") != "mptcs-exp-v1")
        throw ConfigError("experiment config must declare schema mptcs-exp-v1");

    ExperimentConfig cfg;
    const json& env = j.at("env");
    if (env.contains("path")) {
        fs::path env_path = env.at("path").get<std::string>();
        if (env_path.is_relative()) env_path = path.parent_path() / env_path;
        cfg.env_config = json::parse(read_text_file(env_path));
    } else {
        cfg.env_config = env;
    }

    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.seed = j.value("seed", uint64_t{1});
    cfg.workers = j.value("workers", 1);
    cfg.paper_scale = j.value("paper_scale", false);
    if (overrides.paper_scale) cfg.paper_scale = *overrides.paper_scale;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.workers) cfg.workers = *overrides.workers;
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;

    bool paper = cfg.paper_scale;

    if (j.contains("provision")) {
        const json& p = j.at("provision");
        cfg.provision.count = p.value("count", paper ? 40 : 30);
        cfg.provision.heuristic_fraction = p.value("heuristic_fraction", 0.6);
        cfg.provision.rank_episodes = p.value("rank_episodes", paper ? 1000 : 200);
        cfg.provision.min_disagreement = p.value("min_disagreement", 0.05);
        cfg.provision.disagreement_states = p.value("disagreement_states", 500);
        cfg.provision.max_attempts_per_policy = p.value("max_attempts_per_policy", 25);
        cfg.provision.es_generations = p.value("es_generations", 8);
        cfg.provision.es_population = p.value("es_population", 6);
        cfg.provision.es_sigma = p.value("es_sigma", 0.1);
        cfg.provision.es_episodes = p.value("es_episodes", 12);
        if (p.contains("hidden_layers"))
            cfg.provision.hidden_layers = p.at("hidden_layers").get<std::vector<int>>();
        cfg.n_sel = p.value("n_sel", 15);
        cfg.n_eval = p.value("n_eval", paper ? 20 : 10);
    } else {
        cfg.provision.rank_episodes = paper ? 1000 : 200;
        cfg.n_eval = paper ? 20 : 10;
    }

    if (j.contains("oracle")) {
        cfg.campaign.oracle.horizon = j.at("oracle").value("horizon", 10);
        cfg.campaign.oracle.win_counts_as_failure =
            j.at("oracle").value("win_counts_as_failure", false);
    }

    if (j.contains("generate")) {
        const json& g = j.at("generate");
        std::string mode = g.value("mode", std::string("ga"));
        if (mode == "ga")
            cfg.campaign.mode = GenerationMode::Ga;
        else if (mode == "mdpfuzz")
            cfg.campaign.mode = GenerationMode::MdpFuzz;
        else
            throw ConfigError("unknown generation mode " + mode);
        cfg.campaign.ga.iterations = g.value("iterations", paper ? 1000 : 100);
        cfg.campaign.ga.samples_per_iteration = g.value("samples_per_iteration", 200);
        cfg.campaign.ga.bootstrap_min_archive = g.value("bootstrap_min_archive", 100);
        cfg.campaign.ga.bootstrap_iteration_cap = g.value("bootstrap_iteration_cap", 200);
        cfg.campaign.fuzzer_step_budget = g.value("step_budget", paper ? 200000 : 20000);
        cfg.campaign.fuzzer_failure_target = g.value("failure_target", paper ? 20000 : 1000);
        if (g.contains("fuzzer")) {
            const json& f = g.at("fuzzer");
            cfg.campaign.fuzzer.corpus_capacity = f.value("corpus_capacity", 1000);
            cfg.campaign.fuzzer.seed_corpus_size = f.value("seed_corpus_size", 50);
            cfg.campaign.fuzzer.gmm_components = f.value("gmm_components", 5);
            cfg.campaign.fuzzer.refit_interval = f.value("refit_interval", 500);
            cfg.campaign.fuzzer.em_iterations = f.value("em_iterations", 50);
            cfg.campaign.fuzzer.variance_floor = f.value("variance_floor", 1e-4);
        }
    } else {
        cfg.campaign.ga.iterations = paper ? 1000 : 100;
    }
    cfg.campaign.seed = cfg.seed;
    cfg.campaign.workers = cfg.workers;

    int default_res = paper ? 50 : 20;
    cfg.resolution_x = default_res;
    cfg.resolution_y = default_res;
    if (j.contains("archive")) {
        const json& a = j.at("archive");
        if (a.contains("resolution")) {
            cfg.resolution_x = a.at("resolution")[0].get<int>();
            cfg.resolution_y = a.at("resolution")[1].get<int>();
        }
        if (a.contains("bounds")) {
            const json& b = a.at("bounds");
            cfg.bounds.variance_lo = b.at("variance")[0].get<double>();
            cfg.bounds.variance_hi = b.at("variance")[1].get<double>();
            cfg.bounds.entropy_lo = b.at("entropy")[0].get<double>();
            cfg.bounds.entropy_hi = b.at("entropy")[1].get<double>();
            cfg.bounds_given = true;
        }
        cfg.calibrate = a.value("calibrate", false);
        cfg.calibration_probes = a.value("probe_count", 2000);
    }

    if (j.contains("evaluate")) {
        const json& e = j.at("evaluate");
        cfg.repetitions = e.value("repetitions", 5);
        if (e.contains("repetition_seeds"))
            cfg.repetition_seeds = e.at("repetition_seeds").get<std::vector<uint64_t>>();
        cfg.top_k = e.value("top_k", paper ? 2500 : 0);
    }

    cfg.manifest_path = j.value("manifest", std::string());
    if (cfg.manifest_path.empty()) cfg.manifest_path = cfg.output_dir / "manifest.json";
    return cfg;
}

PolicyManifest run_provision(const ExperimentConfig& config) {
    auto env = config.make_env();
    auto pool = provision_policy_pool(*env, config.provision, config.seed, config.workers);
    PolicyRanking ranking =
        rank_policies(pool, *env, config.provision.rank_episodes,
                      derive_key(config.seed, streams::kRanking), config.workers);
    auto [sel, eval] = partition_alternating(ranking, pool, config.n_sel, config.n_eval);

    fs::create_directories(config.output_dir / "policies");
    PolicyManifest manifest;
    manifest.env_id = env->spec().id;
    manifest.seed = config.seed;
    manifest.rank_episodes = config.provision.rank_episodes;
    int rank = 1;
    for (const auto& [id, mean_return] : ranking.entries) {
        PolicyPtr policy;
        for (const auto& p : pool)
            if (p->id() == id) policy = p;
        std::string file =
            "policies/" + id + (policy->kind() == "network" ? ".bin" : ".json");
        save_policy(*policy, config.output_dir / file);
        manifest.policies.push_back({id, policy->kind(), file, mean_return, rank++});
    }
    for (const auto& p : sel.members) manifest.sel_ids.push_back(p->id());
    for (const auto& p : eval.members) manifest.eval_ids.push_back(p->id());
    save_manifest(manifest, config.manifest_path);

    // The environment config rides along so later stages rebuild the exact
    // same dynamics.
    write_text_file(config.output_dir / "env.json",
                    environment_config_to_json(*env).dump(2) + "\n");
    return manifest;
}

namespace {

Archive make_archive(const ExperimentConfig& config, const Environment& env,
                     const PolicySet& selection) {
    ArchiveBounds bounds = config.bounds;
    if (config.calibrate || !config.bounds_given) {
        bounds = calibrate_bounds(env, selection, config.campaign.oracle,
                                  config.calibration_probes,
                                  derive_key(config.seed, streams::kCalibration), config.workers);
    }
    return Archive(bounds, config.resolution_x, config.resolution_y);
}

json campaign_summary_json(const CampaignResult& result, const Archive& archive,
                           uint64_t extra_executions) {
    return json{{"policy_executions", result.policy_executions + extra_executions},
                {"bootstrap_candidates", result.bootstrap_candidates},
                {"main_candidates", result.main_candidates},
                {"iterations_run", result.iterations_run},
                {"archive_size", archive.size()},
                {"bootstrap_incomplete", result.bootstrap_incomplete},
                {"budget_exhausted", result.budget_exhausted}};
}

GenerateOutput persist_run(const ExperimentConfig& config, const Environment& env,
                           const Archive& archive, const CampaignResult& result,
                           const fs::path& run_dir) {
    fs::create_directories(run_dir);
    GenerateOutput out;
    out.archive_path = run_dir / "archive.json";
    out.pool_path = run_dir / "pool.jsonl";
    save_archive(archive, env, out.archive_path);
    save_pool(result.pool, env.spec().schema, out.pool_path);
    write_text_file(run_dir / "campaign.json",
                    campaign_summary_json(result, archive, 0).dump(2) + "\n");
    out.policy_executions = result.policy_executions;
    out.bootstrap_candidates = result.bootstrap_candidates;
    out.main_candidates = result.main_candidates;
    out.archive_size = archive.size();
    out.bootstrap_incomplete = result.bootstrap_incomplete;
    out.budget_exhausted = result.budget_exhausted;
    return out;
}

}  // namespace

GenerateOutput run_generate(const ExperimentConfig& config, const fs::path& run_dir) {
    auto env = config.make_env();
    PolicyManifest manifest = load_manifest(config.manifest_path);
    LoadedPolicyPool pool = load_policy_pool(manifest, config.manifest_path.parent_path(), *env);

    Archive archive = make_archive(config, *env, pool.selection);
    CampaignResult result = run_generation_campaign(archive, *env, pool.selection, config.campaign);
    return persist_run(config, *env, archive, result, run_dir);
}

GenerateOutput run_select(const ExperimentConfig& config, const fs::path& pool_path,
                          const fs::path& run_dir) {
    auto env = config.make_env();
    PolicyManifest manifest = load_manifest(config.manifest_path);
    LoadedPolicyPool pool = load_policy_pool(manifest, config.manifest_path.parent_path(), *env);

    std::vector<PoolEntry> entries = load_pool(env->spec().schema, pool_path);
    Archive archive = make_archive(config, *env, pool.selection);
    CampaignResult result;
    result.policy_executions = filter_pool_into_archive(archive, entries, pool.selection, *env,
                                                        config.campaign.oracle, config.workers);
    result.pool = std::move(entries);
    result.main_candidates = result.pool.size();
    return persist_run(config, *env, archive, result, run_dir);
}

ComparisonReport run_evaluate(const ExperimentConfig& config,
                              const std::vector<fs::path>& run_dirs,
                              const fs::path& report_dir) {
    auto env = config.make_env();
    PolicyManifest manifest = load_manifest(config.manifest_path);
    LoadedPolicyPool pool = load_policy_pool(manifest, config.manifest_path.parent_path(), *env);
    if (pool.evaluation.members.empty())
        throw InsufficientPoliciesError("manifest has no evaluation policies");

    ComparisonReport report;
    int repetition = 0;
    for (const auto& dir : run_dirs) {
        Archive archive = load_archive(*env, dir / "archive.json");
        std::vector<PoolEntry> entries = load_pool(env->spec().schema, dir / "pool.jsonl");

        std::vector<TestCase> mptcs_suite = archive.suite();
        if (mptcs_suite.empty()) throw EmptySuiteError("archive in " + dir.string() + " is empty");
        int k = config.top_k > 0 ? config.top_k : static_cast<int>(mptcs_suite.size());
        std::vector<TestCase> topk_suite = select_top_k(entries, k).suite;
        std::vector<TestCase> sp_suite = select_single_policy_archive(entries, archive);

        auto push_row = [&](const std::string& method, std::span<const TestCase> suite) {
            if (suite.empty()) return;
            MethodRow row;
            row.method = method;
            row.repetition = repetition;
            row.seed = config.seed;
            row.evaluation = evaluate_suite(suite, pool.evaluation, *env, config.campaign.oracle,
                                            config.workers);
            report.rows.push_back(std::move(row));
        };
        push_row("mptcs", mptcs_suite);
        push_row("sp", sp_suite);
        push_row("topk", topk_suite);
        ++repetition;
    }

    fs::create_directories(report_dir);
    write_comparison_csv(report, report_dir / "comparison.csv");
    write_text_file(report_dir / "summary.txt", render_summary(report));
    return report;
}

std::string run_report(const std::vector<fs::path>& csv_paths) {
    ComparisonReport merged;
    for (const auto& path : csv_paths) {
        std::istringstream in(read_text_file(path));
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string field;
            MethodRow r;
            std::getline(row, r.method, ',');
            std::getline(row, field, ',');
            r.repetition = std::stoi(field);
            std::getline(row, field, ',');
            r.seed = std::stoull(field);
            std::getline(row, field, ',');
            r.evaluation.suite_size = std::stoi(field);
            std::getline(row, field, ',');
            r.evaluation.mean_failure_rate = std::stod(field);
            std::getline(row, field, ',');
            r.evaluation.cstc = std::stod(field);
            std::getline(row, field, ',');
            r.evaluation.unique_obs_per_case = std::stod(field);
            std::getline(row, field, ',');
            r.evaluation.pass_entropy = std::stod(field);
            merged.rows.push_back(std::move(r));
        }
    }
    return render_summary(merged);
}

}  // namespace mptcs
