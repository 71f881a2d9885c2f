#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mptcs/experiment.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"mptcs: multi-policy test case selection for RL environments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    uint64_t seed_override = 0;
    bool seed_set = false;
    int workers_override = 0;
    bool paper_scale = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config (mptcs-exp-v1 JSON)")
            ->required();
        cmd->add_option("--out", out_override, "override the config's output directory");
        cmd->add_option("--seed", seed_override, "override the config's seed")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--workers", workers_override, "worker thread count");
        cmd->add_flag("--paper-scale", paper_scale, "use paper-scale defaults");
    };

    auto* provision = app.add_subcommand("provision", "build, rank, and partition a policy pool");
    add_common(provision);

    auto* generate = app.add_subcommand("generate", "run a candidate generation campaign");
    add_common(generate);
    std::string run_name = "run";
    generate->add_option("--run", run_name, "run subdirectory name under the output directory");

    auto* select = app.add_subcommand("select", "filter an existing candidate pool into an archive");
    add_common(select);
    std::string pool_path;
    select->add_option("--pool", pool_path, "candidate pool file (JSON lines)")->required();
    std::string select_run_name = "selected";
    select->add_option("--run", select_run_name, "run subdirectory name for the filtered output");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate suites from one or more run dirs");
    add_common(evaluate);
    std::vector<std::string> run_dirs;
    evaluate->add_option("runs", run_dirs, "run directories produced by generate/select")
        ->required();
    std::string report_name = "report";
    evaluate->add_option("--report", report_name, "report subdirectory name");

    auto* report = app.add_subcommand("report", "summarize comparison CSV files");
    std::vector<std::string> csv_paths;
    report->add_option("csvs", csv_paths, "comparison CSV files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            std::vector<fs::path> paths(csv_paths.begin(), csv_paths.end());
            std::fputs(mptcs::run_report(paths).c_str(), stdout);
            return 0;
        }

        mptcs::ConfigOverrides overrides;
        if (seed_set) overrides.seed = seed_override;
        if (workers_override > 0) overrides.workers = workers_override;
        if (paper_scale) overrides.paper_scale = true;
        if (!out_override.empty()) overrides.output_dir = out_override;
        mptcs::ExperimentConfig config =
            mptcs::load_experiment_config(config_path, overrides);
        fs::create_directories(config.output_dir);

        if (provision->parsed()) {
            mptcs::PolicyManifest manifest = mptcs::run_provision(config);
            std::printf("provisioned %zu policies (%zu selection, %zu evaluation) -> %s\n",
                        manifest.policies.size(), manifest.sel_ids.size(),
                        manifest.eval_ids.size(), config.manifest_path.string().c_str());
            return 0;
        }
        if (generate->parsed()) {
            auto out = mptcs::run_generate(config, config.output_dir / run_name);
            std::printf("archive: %s (%d occupants)\n", out.archive_path.string().c_str(),
                        out.archive_size);
            std::printf("pool: %s (%llu candidates)\n", out.pool_path.string().c_str(),
                        static_cast<unsigned long long>(out.bootstrap_candidates +
                                                        out.main_candidates));
            std::printf("policy executions: %llu (bootstrap candidates %llu, main %llu)\n",
                        static_cast<unsigned long long>(out.policy_executions),
                        static_cast<unsigned long long>(out.bootstrap_candidates),
                        static_cast<unsigned long long>(out.main_candidates));
            if (out.bootstrap_incomplete)
                std::puts("warning: bootstrap cap reached before the archive floor");
            if (out.budget_exhausted) std::puts("warning: budget exhausted; partial results kept");
            return 0;
        }
        if (select->parsed()) {
            auto out = mptcs::run_select(config, pool_path, config.output_dir / select_run_name);
            std::printf("archive: %s (%d occupants), %llu filter executions\n",
                        out.archive_path.string().c_str(), out.archive_size,
                        static_cast<unsigned long long>(out.policy_executions));
            return 0;
        }
        if (evaluate->parsed()) {
            std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
            auto rep = mptcs::run_evaluate(config, dirs, config.output_dir / report_name);
            std::fputs(mptcs::render_summary(rep).c_str(), stdout);
            std::printf("wrote %s\n", (config.output_dir / report_name / "comparison.csv")
                                          .string()
                                          .c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
