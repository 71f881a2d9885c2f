#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mptcs/gmm.hpp"
#include "mptcs/rng.hpp"
#include "mptcs/selection.hpp"

namespace mptcs {

struct GaConfig {
    int samples_per_iteration = 200;
    int bootstrap_min_archive = 100;
    int iterations = 1000;
    // Bootstrap attempts are capped so sparse-score environments cannot stall
    // the campaign; hitting the cap is reported, not fatal.
    int bootstrap_iteration_cap = 200;
};

struct GaCandidate {
    TestCase test_case;
    int64_t parent_sequence = -1;  // -1: drawn from the initial distribution
};

// One generation: parents sampled from the archive with probability linear
// in difficulty score (or from the initial-state distribution while the
// archive is below its bootstrap floor), then mutated.
std::vector<GaCandidate> ga_step(const Archive& archive, const GaConfig& config,
                                 const Environment& env, uint64_t rng_key);

struct FuzzerCorpusEntry {
    TestCase test_case;
    double sensitivity = 0.0;
    double freshness = 0.0;
    double last_return = 0.0;  // discounted accumulation of the entry's own run
    uint64_t sequence = 0;
};

struct FuzzerConfig {
    int corpus_capacity = 1000;
    int seed_corpus_size = 50;
    int gmm_components = 5;
    int refit_interval = 500;
    int em_iterations = 50;
    double variance_floor = 1e-4;
};

struct FuzzStepResult {
    TestCase offspring;
    bool failure = false;
    double sensitivity = 0.0;
    double freshness = 0.0;
    uint64_t parent_sequence = 0;
};

// Corpus-scheduled mutation fuzzer driven by a single policy. Parents are
// drawn by rank-weighted sensitivity + freshness with equal weights;
// sensitivity is the change in discounted reward accumulation between parent
// and offspring, freshness the offspring trajectory's negative log-likelihood
// under the running density model.
class MdpFuzzer {
public:
    MdpFuzzer(const Environment& env, PolicyPtr policy, OracleConfig oracle, FuzzerConfig config,
              uint64_t seed);

    void seed_corpus(int count);
    FuzzStepResult step();

    const std::vector<FuzzerCorpusEntry>& corpus() const { return corpus_; }
    const DensityModel& model() const { return model_; }
    uint64_t executions() const { return executions_; }

    static std::vector<double> trajectory_features(const Trajectory& trajectory);

private:
    size_t pick_parent();
    void admit(FuzzerCorpusEntry entry);

    const Environment& env_;
    PolicyPtr policy_;
    OracleConfig oracle_;
    FuzzerConfig config_;
    KeyedRng rng_;
    DensityModel model_;
    std::vector<FuzzerCorpusEntry> corpus_;
    uint64_t next_sequence_ = 0;
    uint64_t executions_ = 0;
};

enum class GenerationMode { Ga, MdpFuzz };

struct PoolEntry {
    TestCase test_case;
    uint64_t sequence = 0;
    int iteration = 0;
    int64_t parent_sequence = -1;
    std::string generator;
    bool has_score = false;
    Score score;
    Descriptor descriptor;
    PassFailVector verdicts;
};

struct CampaignConfig {
    GenerationMode mode = GenerationMode::Ga;
    GaConfig ga;
    FuzzerConfig fuzzer;
    int fuzzer_step_budget = 20000;
    int fuzzer_failure_target = 1000;
    OracleConfig oracle;
    uint64_t seed = 0;
    int workers = 1;
    bool keep_pool = true;  // retain every evaluated candidate for baselines
};

struct CampaignResult {
    std::vector<PoolEntry> pool;
    uint64_t policy_executions = 0;
    uint64_t bootstrap_candidates = 0;
    uint64_t main_candidates = 0;
    int iterations_run = 0;
    bool bootstrap_incomplete = false;
    bool budget_exhausted = false;
};

// GA mode: the archive is the population; every candidate goes through the
// niche-insertion rule each iteration. MdpFuzz mode: a single-policy failure
// pool is generated first, then filtered through the archive as a whole.
CampaignResult run_generation_campaign(Archive& archive, const Environment& env,
                                       const PolicySet& selection, const CampaignConfig& config);

// Annotates raw pool entries with selection-set verdicts and offers each to
// the archive in sequence order (the post-generation filter path).
uint64_t filter_pool_into_archive(Archive& archive, std::vector<PoolEntry>& pool,
                                  const PolicySet& selection, const Environment& env,
                                  const OracleConfig& oracle, int workers = 1);

}  // namespace mptcs
