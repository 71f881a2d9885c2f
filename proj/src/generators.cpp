#include "mptcs/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mptcs/errors.hpp"
#include "mptcs/parallel.hpp"

namespace mptcs {

std::vector<GaCandidate> ga_step(const Archive& archive, const GaConfig& config,
                                 const Environment& env, uint64_t rng_key) {
    KeyedRng rng(rng_key, streams::kGa);
    std::vector<GaCandidate> out;
    out.reserve(static_cast<size_t>(config.samples_per_iteration));

    bool bootstrap = archive.size() < config.bootstrap_min_archive;
    if (bootstrap) {
        for (int i = 0; i < config.samples_per_iteration; ++i) {
            TestCase parent = env.sample_initial(rng.next_u64());
            TestCase child = mutate(parent, rng.next_u64(), env.mutation_ops(), env);
            out.push_back({std::move(child), -1});
        }
        return out;
    }

    // Linear fitness-proportional sampling over occupants in niche order.
    std::vector<const ScoredTestCase*> occupants;
    occupants.reserve(static_cast<size_t>(archive.size()));
    std::vector<double> cumulative;
    cumulative.reserve(static_cast<size_t>(archive.size()));
    double total = 0.0;
    for (const auto& [niche, elite] : archive.cells()) {
        occupants.push_back(&elite);
        total += elite.score.value();
        cumulative.push_back(total);
    }

    for (int i = 0; i < config.samples_per_iteration; ++i) {
        double u = rng.next_unit() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        size_t idx = std::min(static_cast<size_t>(it - cumulative.begin()), occupants.size() - 1);
        const ScoredTestCase* parent = occupants[idx];
        TestCase child = mutate(parent->test_case, rng.next_u64(), env.mutation_ops(), env);
        out.push_back({std::move(child), static_cast<int64_t>(parent->sequence)});
    }
    return out;
}

MdpFuzzer::MdpFuzzer(const Environment& env, PolicyPtr policy, OracleConfig oracle,
                     FuzzerConfig config, uint64_t seed)
    : env_(env),
      policy_(std::move(policy)),
      oracle_(oracle),
      config_(config),
      rng_(seed, streams::kFuzzer),
      model_(2 + env.observation_size(), config.gmm_components, config.refit_interval,
             config.em_iterations, config.variance_floor, seed) {}

std::vector<double> MdpFuzzer::trajectory_features(const Trajectory& trajectory) {
    std::vector<double> f;
    f.reserve(2 + trajectory.steps.back().observation.size());
    f.push_back(trajectory.return_sum);
    f.push_back(static_cast<double>(
        trajectory.terminated_at.value_or(static_cast<int>(trajectory.steps.size()))));
    const auto& last_obs = trajectory.steps.back().observation;
    f.insert(f.end(), last_obs.begin(), last_obs.end());
    return f;
}

void MdpFuzzer::seed_corpus(int count) {
    for (int i = 0; i < count; ++i) {
        TestCase tc = env_.sample_initial(rng_.next_u64());
        Trajectory traj = execute(tc, *policy_, env_);
        ++executions_;
        auto features = trajectory_features(traj);
        FuzzerCorpusEntry entry;
        entry.test_case = std::move(tc);
        entry.sensitivity = 0.0;
        entry.freshness = model_.negative_log_likelihood(features);
        entry.last_return = discounted_return(traj, env_.spec().gamma);
        entry.sequence = next_sequence_++;
        model_.add(features);
        admit(std::move(entry));
    }
}

size_t MdpFuzzer::pick_parent() {
    size_t n = corpus_.size();
    if (n == 1) return 0;

    // Rank-weighted combination: the best rank on each criterion contributes
    // weight n, the worst weight 1; ties resolve by corpus position.
    auto ranks_of = [n](std::vector<size_t> order) {
        std::vector<double> weight(n);
        for (size_t r = 0; r < n; ++r) weight[order[r]] = static_cast<double>(n - r);
        return weight;
    };
    std::vector<size_t> by_sens(n), by_fresh(n);
    std::iota(by_sens.begin(), by_sens.end(), size_t{0});
    by_fresh = by_sens;
    std::stable_sort(by_sens.begin(), by_sens.end(), [&](size_t a, size_t b) {
        return corpus_[a].sensitivity > corpus_[b].sensitivity;
    });
    std::stable_sort(by_fresh.begin(), by_fresh.end(), [&](size_t a, size_t b) {
        return corpus_[a].freshness > corpus_[b].freshness;
    });
    auto ws = ranks_of(std::move(by_sens));
    auto wf = ranks_of(std::move(by_fresh));

    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += ws[i] + wf[i];
    double u = rng_.next_unit() * total;
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        acc += ws[i] + wf[i];
        if (u <= acc) return i;
    }
    return n - 1;
}

void MdpFuzzer::admit(FuzzerCorpusEntry entry) {
    if (static_cast<int>(corpus_.size()) < config_.corpus_capacity) {
        corpus_.push_back(std::move(entry));
        return;
    }
    // Evict the stalest entry by combined signal.
    size_t worst = 0;
    double worst_value = corpus_[0].sensitivity + corpus_[0].freshness;
    for (size_t i = 1; i < corpus_.size(); ++i) {
        double v = corpus_[i].sensitivity + corpus_[i].freshness;
        if (v < worst_value) {
            worst = i;
            worst_value = v;
        }
    }
    corpus_[worst] = std::move(entry);
}

FuzzStepResult MdpFuzzer::step() {
    if (corpus_.empty()) throw std::logic_error("fuzzer corpus is empty; call seed_corpus first");

    size_t parent_idx = pick_parent();
    FuzzerCorpusEntry& parent = corpus_[parent_idx];

    FuzzStepResult result;
    result.parent_sequence = parent.sequence;
    result.offspring = mutate(parent.test_case, rng_.next_u64(), env_.mutation_ops(), env_);

    Trajectory traj = execute(result.offspring, *policy_, env_);
    ++executions_;
    double offspring_return = discounted_return(traj, env_.spec().gamma);
    result.sensitivity = std::abs(parent.last_return - offspring_return);
    auto features = trajectory_features(traj);
    result.freshness = model_.negative_log_likelihood(features);
    result.failure = oracle_verdict(traj, oracle_).failed;
    model_.add(features);

    parent.sensitivity = result.sensitivity;

    FuzzerCorpusEntry offspring_entry;
    offspring_entry.test_case = result.offspring;
    offspring_entry.sensitivity = result.sensitivity;
    offspring_entry.freshness = result.freshness;
    offspring_entry.last_return = offspring_return;
    offspring_entry.sequence = next_sequence_++;
    admit(std::move(offspring_entry));
    return result;
}

uint64_t filter_pool_into_archive(Archive& archive, std::vector<PoolEntry>& pool,
                                  const PolicySet& selection, const Environment& env,
                                  const OracleConfig& oracle, int workers) {
    std::vector<ScoredTestCase> scored(pool.size());
    parallel_for(static_cast<int>(pool.size()), workers, [&](int i) {
        scored[static_cast<size_t>(i)] =
            evaluate_candidate(pool[static_cast<size_t>(i)].test_case, selection, env, oracle);
    });
    for (size_t i = 0; i < pool.size(); ++i) {
        scored[i].sequence = pool[i].sequence;
        pool[i].has_score = true;
        pool[i].score = scored[i].score;
        pool[i].descriptor = scored[i].descriptor;
        pool[i].verdicts = scored[i].verdicts;
        archive.offer(scored[i]);
    }
    return pool.size() * static_cast<uint64_t>(selection.size());
}

CampaignResult run_generation_campaign(Archive& archive, const Environment& env,
                                       const PolicySet& selection, const CampaignConfig& config) {
    if (selection.members.empty()) throw InsufficientPoliciesError("selection set is empty");
    CampaignResult result;

    if (config.mode == GenerationMode::Ga) {
        if (config.ga.iterations <= 0) return result;
        KeyedRng rng(config.seed, streams::kGa);
        uint64_t sequence = 0;

        auto run_iteration = [&](int iteration, bool bootstrap_phase) {
            auto candidates = ga_step(archive, config.ga, env, rng.next_u64());
            std::vector<TestCase> cases;
            cases.reserve(candidates.size());
            for (auto& c : candidates) cases.push_back(c.test_case);
            // Stamp sequences before insertion so archived elites carry them.
            std::vector<ScoredTestCase> scored(cases.size());
            parallel_for(static_cast<int>(cases.size()), config.workers, [&](int i) {
                scored[static_cast<size_t>(i)] = evaluate_candidate(
                    cases[static_cast<size_t>(i)], selection, env, config.oracle);
            });
            for (size_t i = 0; i < scored.size(); ++i) {
                scored[i].sequence = sequence++;
                archive.offer(scored[i]);
                if (config.keep_pool) {
                    PoolEntry entry;
                    entry.test_case = std::move(cases[i]);
                    entry.sequence = scored[i].sequence;
                    entry.iteration = iteration;
                    entry.parent_sequence = candidates[i].parent_sequence;
                    entry.generator = bootstrap_phase ? "ga-bootstrap" : "ga";
                    entry.has_score = true;
                    entry.score = scored[i].score;
                    entry.descriptor = scored[i].descriptor;
                    entry.verdicts = scored[i].verdicts;
                    result.pool.push_back(std::move(entry));
                }
            }
            result.policy_executions += scored.size() * static_cast<uint64_t>(selection.size());
            return static_cast<uint64_t>(scored.size());
        };

        int bootstrap_iterations = 0;
        while (archive.size() < config.ga.bootstrap_min_archive &&
               bootstrap_iterations < config.ga.bootstrap_iteration_cap) {
            result.bootstrap_candidates += run_iteration(-1 - bootstrap_iterations, true);
            ++bootstrap_iterations;
        }
        result.bootstrap_incomplete = archive.size() < config.ga.bootstrap_min_archive;

        for (int iter = 0; iter < config.ga.iterations; ++iter) {
            result.main_candidates += run_iteration(iter, false);
            ++result.iterations_run;
        }
        return result;
    }

    // MdpFuzz mode: single-policy generation, then the archive filter.
    MdpFuzzer fuzzer(env, selection.members.front(), config.oracle, config.fuzzer, config.seed);
    fuzzer.seed_corpus(config.fuzzer.seed_corpus_size);
    int failures = 0;
    int steps = 0;
    uint64_t sequence = 0;
    while (failures < config.fuzzer_failure_target && steps < config.fuzzer_step_budget) {
        FuzzStepResult step = fuzzer.step();
        ++steps;
        if (step.failure) {
            ++failures;
            PoolEntry entry;
            entry.test_case = std::move(step.offspring);
            entry.sequence = sequence++;
            entry.iteration = steps;
            entry.parent_sequence = static_cast<int64_t>(step.parent_sequence);
            entry.generator = "mdpfuzz";
            result.pool.push_back(std::move(entry));
        }
    }
    result.budget_exhausted = failures < config.fuzzer_failure_target;
    result.main_candidates = static_cast<uint64_t>(result.pool.size());
    result.policy_executions += fuzzer.executions();
    result.policy_executions += filter_pool_into_archive(archive, result.pool, selection, env,
                                                         config.oracle, config.workers);
    result.iterations_run = steps;
    return result;
}

}  // namespace mptcs
