#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mptcs/evaluation.hpp"
#include "mptcs/generators.hpp"
#include "mptcs/mdp.hpp"
#include "mptcs/policy.hpp"
#include "mptcs/provision.hpp"

namespace mptcs {

using json = nlohmann::json;

// States serialize by field name; grids flatten row-major.
json state_to_json(const StateSchema& schema, const EnvState& state);
EnvState state_from_json(const StateSchema& schema, const json& j);

json test_case_to_json(const StateSchema& schema, const TestCase& tc);
TestCase test_case_from_json(const StateSchema& schema, const json& j);

// Debug-oriented trajectory dump; not a stability contract.
json trajectory_to_json(const StateSchema& schema, const Trajectory& trajectory);

// Environment configs (schema id "mptcs-env-v1").
std::unique_ptr<Environment> make_environment(const json& config);
std::unique_ptr<Environment> load_environment(const std::filesystem::path& path);
json environment_config_to_json(const Environment& env);

// Archive files (schema id "mptcs-archive-v1"): bounds, resolution, and
// per-cell records sorted by niche index; byte-stable across identical runs.
json archive_to_json(const Archive& archive, const StateSchema& schema,
                     const std::string& env_id);
Archive archive_from_json(const StateSchema& schema, const json& j);
void save_archive(const Archive& archive, const Environment& env,
                  const std::filesystem::path& path);
Archive load_archive(const Environment& env, const std::filesystem::path& path);

// Candidate pools: append-only JSON lines with provenance.
void save_pool(const std::vector<PoolEntry>& pool, const StateSchema& schema,
               const std::filesystem::path& path);
std::vector<PoolEntry> load_pool(const StateSchema& schema, const std::filesystem::path& path);

// Policy files: networks as little-endian binary weight blobs, heuristics as
// parameter JSON. The manifest (schema id "mptcs-manifest-v1") lists the pool
// with ids, kinds, file paths, and the ranked partition.
void save_policy(const Policy& policy, const std::filesystem::path& path);
PolicyPtr load_policy(const std::filesystem::path& path, const Environment& env);

struct PolicyManifest {
    std::string env_id;
    uint64_t seed = 0;
    int rank_episodes = 0;
    struct Entry {
        std::string id;
        std::string kind;
        std::string file;
        double mean_return = 0.0;
        int rank = 0;
    };
    std::vector<Entry> policies;
    std::vector<std::string> sel_ids;
    std::vector<std::string> eval_ids;
};

void save_manifest(const PolicyManifest& manifest, const std::filesystem::path& path);
PolicyManifest load_manifest(const std::filesystem::path& path);

struct LoadedPolicyPool {
    std::vector<PolicyPtr> all;
    PolicySet selection;
    PolicySet evaluation;
};
LoadedPolicyPool load_policy_pool(const PolicyManifest& manifest,
                                  const std::filesystem::path& manifest_dir,
                                  const Environment& env);

// Comparison reports: one CSV row per method x repetition, plus a
// human-readable summary of means and standard deviations.
void write_comparison_csv(const ComparisonReport& report, const std::filesystem::path& path);
std::string render_summary(const ComparisonReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace mptcs
