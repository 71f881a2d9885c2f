#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mptcs/generators.hpp"
#include "mptcs/selection.hpp"

namespace mptcs {

struct SuiteEvaluation {
    double mean_failure_rate = 0.0;
    double cstc = 0.0;  // fraction of cases passed by at least one policy
    double unique_obs_per_case = 0.0;
    double pass_entropy = 0.0;  // natural log; 0 when nothing passes
    std::vector<int> per_policy_pass_counts;
    int suite_size = 0;
    int policy_count = 0;
    uint64_t policy_executions = 0;
};

// Executes every (case, policy) pair once and aggregates in a fixed order,
// so results are identical for any worker count.
SuiteEvaluation evaluate_suite(std::span<const TestCase> suite, const PolicySet& evaluation,
                               const Environment& env, const OracleConfig& oracle,
                               int workers = 1);

double pass_entropy_of_counts(std::span<const int> pass_counts);

struct TopKSelection {
    std::vector<TestCase> suite;
    bool pool_too_small = false;
};

// Highest difficulty first, ties broken by earliest generation; no niche
// structure. Requires every pool entry to be scored.
TopKSelection select_top_k(std::span<const PoolEntry> pool, int k);

// Failures of the first selection policy confirmed solvable by any of the
// remaining ones, most recent first, capped at the suite size.
std::vector<TestCase> select_single_policy(std::span<const PoolEntry> pool, int suite_cap);

// The single-policy counterpart of the niche archive: eligibility is a
// confirmed-solvable failure of the tracked policy, with no difficulty
// pressure, so the first eligible candidate holds each niche. Uses the
// reference archive's bounds and resolution.
std::vector<TestCase> select_single_policy_archive(std::span<const PoolEntry> pool,
                                                   const Archive& reference);

struct MethodRow {
    std::string method;
    int repetition = 0;
    uint64_t seed = 0;
    SuiteEvaluation evaluation;
};

struct MethodSummary {
    std::string method;
    int repetitions = 0;
    double mfr_mean = 0.0, mfr_std = 0.0;
    double cstc_mean = 0.0, cstc_std = 0.0;
    double unique_mean = 0.0, unique_std = 0.0;
    double entropy_mean = 0.0, entropy_std = 0.0;
    double suite_size_mean = 0.0;
};

struct ComparisonReport {
    std::vector<MethodRow> rows;
    std::vector<MethodSummary> summarize() const;  // method order: mptcs, sp, topk
};

struct ComparisonConfig {
    CampaignConfig campaign;
    ArchiveBounds bounds;
    int resolution_x = 20;
    int resolution_y = 20;
    int repetitions = 5;
    std::vector<uint64_t> repetition_seeds;  // filled from campaign.seed when empty
};

// Per repetition: run a fresh campaign, derive size-matched suites via the
// archive, top-k, and the single-policy baseline from the same pool, and
// evaluate each against the evaluation set.
ComparisonReport compare_selections(const Environment& env, const PolicySet& selection,
                                    const PolicySet& evaluation, const ComparisonConfig& config);

}  // namespace mptcs
