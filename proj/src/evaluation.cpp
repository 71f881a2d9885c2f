#include "mptcs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "mptcs/errors.hpp"
#include "mptcs/parallel.hpp"

namespace mptcs {

namespace {

// FNV-1a over the raw bytes of the observation vector. Observations are
// exact rationals of grid coordinates, so equal states hash identically.
uint64_t observation_hash(std::span<const double> obs) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (double v : obs) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

double stddev(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

double pass_entropy_of_counts(std::span<const int> pass_counts) {
    long total = 0;
    for (int c : pass_counts) total += c;
    if (total == 0) return 0.0;
    double h = 0.0;
    for (int c : pass_counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return h;
}

SuiteEvaluation evaluate_suite(std::span<const TestCase> suite, const PolicySet& evaluation,
                               const Environment& env, const OracleConfig& oracle, int workers) {
    if (suite.empty()) throw EmptySuiteError("evaluate_suite over an empty suite");
    if (evaluation.members.empty()) throw InsufficientPoliciesError("evaluation set is empty");

    const int n = static_cast<int>(suite.size());
    const int p = evaluation.size();

    struct PairResult {
        uint8_t failed = 0;
        std::vector<uint64_t> obs_hashes;
    };
    std::vector<PairResult> pairs(static_cast<size_t>(n) * p);
    parallel_for(n * p, workers, [&](int idx) {
        int case_idx = idx / p;
        int policy_idx = idx % p;
        Trajectory traj = execute(suite[static_cast<size_t>(case_idx)],
                                  *evaluation.members[static_cast<size_t>(policy_idx)], env);
        PairResult& r = pairs[static_cast<size_t>(idx)];
        r.failed = oracle_verdict(traj, oracle).failed ? 1 : 0;
        r.obs_hashes.reserve(traj.steps.size());
        for (const auto& step : traj.steps) r.obs_hashes.push_back(observation_hash(step.observation));
    });

    SuiteEvaluation out;
    out.suite_size = n;
    out.policy_count = p;
    out.policy_executions = static_cast<uint64_t>(n) * p;
    out.per_policy_pass_counts.assign(static_cast<size_t>(p), 0);

    long failures = 0;
    int solvable_cases = 0;
    std::unordered_set<uint64_t> unique_obs;
    for (int c = 0; c < n; ++c) {
        bool any_pass = false;
        for (int j = 0; j < p; ++j) {
            const PairResult& r = pairs[static_cast<size_t>(c) * p + j];
            if (r.failed) {
                ++failures;
            } else {
                any_pass = true;
                ++out.per_policy_pass_counts[static_cast<size_t>(j)];
            }
            unique_obs.insert(r.obs_hashes.begin(), r.obs_hashes.end());
        }
        if (any_pass) ++solvable_cases;
    }

    out.mean_failure_rate = static_cast<double>(failures) / (static_cast<double>(n) * p);
    out.cstc = static_cast<double>(solvable_cases) / n;
    out.unique_obs_per_case = static_cast<double>(unique_obs.size()) / n;
    out.pass_entropy = pass_entropy_of_counts(out.per_policy_pass_counts);
    return out;
}

TopKSelection select_top_k(std::span<const PoolEntry> pool, int k) {
    std::vector<const PoolEntry*> scored;
    scored.reserve(pool.size());
    for (const auto& entry : pool) {
        if (!entry.has_score) throw std::invalid_argument("select_top_k over an unscored pool");
        scored.push_back(&entry);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const PoolEntry* a, const PoolEntry* b) {
        if (a->score == b->score) return a->sequence < b->sequence;
        return b->score < a->score;
    });

    TopKSelection out;
    out.pool_too_small = static_cast<int>(scored.size()) < k;
    int take = std::min<int>(k, static_cast<int>(scored.size()));
    out.suite.reserve(static_cast<size_t>(take));
    for (int i = 0; i < take; ++i) out.suite.push_back(scored[static_cast<size_t>(i)]->test_case);
    return out;
}

std::vector<TestCase> select_single_policy(std::span<const PoolEntry> pool, int suite_cap) {
    std::vector<const PoolEntry*> picks;
    for (const auto& entry : pool) {
        if (!entry.has_score || entry.verdicts.empty()) continue;
        if (entry.verdicts.front() != 1) continue;  // the tracked policy must fail
        bool confirmed = false;
        for (size_t j = 1; j < entry.verdicts.size(); ++j)
            if (entry.verdicts[j] == 0) confirmed = true;
        if (confirmed) picks.push_back(&entry);
    }
    std::stable_sort(picks.begin(), picks.end(),
                     [](const PoolEntry* a, const PoolEntry* b) { return a->sequence > b->sequence; });
    if (static_cast<int>(picks.size()) > suite_cap) picks.resize(static_cast<size_t>(suite_cap));
    std::vector<TestCase> out;
    out.reserve(picks.size());
    for (const auto* e : picks) out.push_back(e->test_case);
    return out;
}

std::vector<TestCase> select_single_policy_archive(std::span<const PoolEntry> pool,
                                                   const Archive& reference) {
    Archive sp(reference.bounds(), reference.resolution_x(), reference.resolution_y());
    for (const auto& entry : pool) {
        if (!entry.has_score || entry.verdicts.empty()) continue;
        if (entry.verdicts.front() != 1) continue;
        bool confirmed = false;
        for (size_t j = 1; j < entry.verdicts.size(); ++j)
            if (entry.verdicts[j] == 0) confirmed = true;
        if (!confirmed) continue;
        ScoredTestCase scored;
        scored.test_case = entry.test_case;
        scored.score = {1, 1};  // binary eligibility; incumbents win ties
        scored.descriptor = entry.descriptor;
        scored.verdicts = entry.verdicts;
        scored.sequence = entry.sequence;
        sp.offer(scored);
    }
    return sp.suite();
}

std::vector<MethodSummary> ComparisonReport::summarize() const {
    std::vector<MethodSummary> out;
    for (const std::string& method : {std::string("mptcs"), std::string("sp"), std::string("topk")}) {
        std::vector<double> mfr, cstc, unique, entropy, sizes;
        for (const auto& row : rows) {
            if (row.method != method) continue;
            mfr.push_back(row.evaluation.mean_failure_rate);
            cstc.push_back(row.evaluation.cstc);
            unique.push_back(row.evaluation.unique_obs_per_case);
            entropy.push_back(row.evaluation.pass_entropy);
            sizes.push_back(static_cast<double>(row.evaluation.suite_size));
        }
        if (mfr.empty()) continue;
        MethodSummary s;
        s.method = method;
        s.repetitions = static_cast<int>(mfr.size());
        auto mean = [](std::span<const double> xs) {
            double acc = 0.0;
            for (double x : xs) acc += x;
            return acc / static_cast<double>(xs.size());
        };
        s.mfr_mean = mean(mfr);
        s.mfr_std = stddev(mfr, s.mfr_mean);
        s.cstc_mean = mean(cstc);
        s.cstc_std = stddev(cstc, s.cstc_mean);
        s.unique_mean = mean(unique);
        s.unique_std = stddev(unique, s.unique_mean);
        s.entropy_mean = mean(entropy);
        s.entropy_std = stddev(entropy, s.entropy_mean);
        s.suite_size_mean = mean(sizes);
        out.push_back(std::move(s));
    }
    return out;
}

ComparisonReport compare_selections(const Environment& env, const PolicySet& selection,
                                    const PolicySet& evaluation, const ComparisonConfig& config) {
    std::vector<uint64_t> seeds = config.repetition_seeds;
    if (seeds.empty()) {
        for (int r = 0; r < config.repetitions; ++r)
            seeds.push_back(derive_key(config.campaign.seed, static_cast<uint64_t>(r)));
    }

    ComparisonReport report;
    for (size_t r = 0; r < seeds.size(); ++r) {
        Archive archive(config.bounds, config.resolution_x, config.resolution_y);
        CampaignConfig campaign = config.campaign;
        campaign.seed = seeds[r];
        CampaignResult result = run_generation_campaign(archive, env, selection, campaign);

        std::vector<TestCase> mptcs_suite = archive.suite();
        if (mptcs_suite.empty()) continue;  // nothing archived; skip the repetition
        int k = static_cast<int>(mptcs_suite.size());
        std::vector<TestCase> topk_suite = select_top_k(result.pool, k).suite;
        std::vector<TestCase> sp_suite = select_single_policy_archive(result.pool, archive);

        auto push_row = [&](const std::string& method, std::span<const TestCase> suite) {
            if (suite.empty()) return;
            MethodRow row;
            row.method = method;
            row.repetition = static_cast<int>(r);
            row.seed = seeds[r];
            row.evaluation = evaluate_suite(suite, evaluation, env, config.campaign.oracle,
                                            config.campaign.workers);
            report.rows.push_back(std::move(row));
        };
        push_row("mptcs", mptcs_suite);
        push_row("sp", sp_suite);
        push_row("topk", topk_suite);
    }
    return report;
}

}  // namespace mptcs
