#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mptcs/mdp.hpp"
#include "mptcs/policy.hpp"

namespace mptcs {

// (policy id, mean return over the evaluation episodes), sorted descending
// with a stable tie order.
struct PolicyRanking {
    std::vector<std::pair<std::string, double>> entries;
    int episodes = 0;
};

struct ProvisionConfig {
    int count = 30;
    double heuristic_fraction = 0.6;
    int rank_episodes = 200;
    double min_disagreement = 0.05;  // pairwise action disagreement floor
    int disagreement_states = 500;
    int max_attempts_per_policy = 25;
    // Optional performance band: candidates returning less than this fraction
    // of the best accepted member are retried. When the attempt budget runs
    // out, the best distinct candidate seen is kept anyway.
    double quality_floor_fraction = 0.0;
    int floor_episodes = 40;
    // Bounded-budget evolutionary search applied to the network members.
    int es_generations = 8;
    int es_population = 6;
    double es_sigma = 0.1;
    int es_episodes = 12;
    std::vector<int> hidden_layers = {64, 64};
};

// Builds `count` behaviorally distinct policies spanning a performance band:
// jittered heuristic families plus small networks improved by evolutionary
// weight search. Throws ProvisioningFailedError when pairwise distinctness
// cannot be met within the attempt budget.
std::vector<PolicyPtr> provision_policy_pool(const Environment& env, const ProvisionConfig& config,
                                             uint64_t seed, int workers = 1);

// Mean undiscounted return per policy over shared seeded episodes.
PolicyRanking rank_policies(const std::vector<PolicyPtr>& policies, const Environment& env,
                            int episodes, uint64_t seed, int workers = 1);

// Alternating split of the ranked pool: best to selection, second to
// evaluation, and so on until both sets are full; leftover ranks are unused.
std::pair<PolicySet, PolicySet> partition_alternating(const PolicyRanking& ranking,
                                                      const std::vector<PolicyPtr>& policies,
                                                      int n_sel, int n_eval);

double pairwise_disagreement(const Policy& a, const Policy& b, const Environment& env,
                             int state_count, uint64_t seed);

}  // namespace mptcs
