#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mptcs/evaluation.hpp"
#include "mptcs/serialize.hpp"

namespace mptcs {

// Parsed experiment configuration (schema id "mptcs-exp-v1"). All randomness
// flows from the named seeds here; nothing reads system entropy.
struct ExperimentConfig {
    json env_config;
    std::filesystem::path output_dir = "out";
    uint64_t seed = 1;
    int workers = 1;
    bool paper_scale = false;

    ProvisionConfig provision;
    int n_sel = 15;
    int n_eval = 10;

    CampaignConfig campaign;

    ArchiveBounds bounds;
    bool bounds_given = false;
    bool calibrate = false;
    int calibration_probes = 2000;
    int resolution_x = 20;
    int resolution_y = 20;

    int repetitions = 5;
    std::vector<uint64_t> repetition_seeds;
    int top_k = 0;  // 0: size-match the archive

    std::filesystem::path manifest_path;  // defaults to output_dir/manifest.json

    std::unique_ptr<Environment> make_env() const { return make_environment(env_config); }
};

struct ConfigOverrides {
    std::optional<uint64_t> seed;
    std::optional<int> workers;
    std::optional<bool> paper_scale;
    std::optional<std::string> output_dir;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const ConfigOverrides& overrides = {});

// provision: build, rank, and partition the policy pool; write weight files
// and the manifest under output_dir.
PolicyManifest run_provision(const ExperimentConfig& config);

struct GenerateOutput {
    std::filesystem::path archive_path;
    std::filesystem::path pool_path;
    uint64_t policy_executions = 0;
    uint64_t bootstrap_candidates = 0;
    uint64_t main_candidates = 0;
    int archive_size = 0;
    bool bootstrap_incomplete = false;
    bool budget_exhausted = false;
};

// generate: run the configured campaign against the manifest's selection set
// and persist the archive, pool, and budget accounting under run_dir.
GenerateOutput run_generate(const ExperimentConfig& config, const std::filesystem::path& run_dir);

// select: post-generation filter of an existing pool file into a fresh
// archive; writes the archive plus the annotated pool.
GenerateOutput run_select(const ExperimentConfig& config, const std::filesystem::path& pool_path,
                          const std::filesystem::path& run_dir);

// evaluate: derive size-matched mptcs / single-policy / top-k suites from
// each run directory and evaluate them on the manifest's evaluation set.
ComparisonReport run_evaluate(const ExperimentConfig& config,
                              const std::vector<std::filesystem::path>& run_dirs,
                              const std::filesystem::path& report_dir);

std::string run_report(const std::vector<std::filesystem::path>& csv_paths);

}  // namespace mptcs
