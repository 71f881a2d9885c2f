#include "mptcs/provision.hpp"

#include <algorithm>
#include <cmath>

#include "mptcs/errors.hpp"
#include "mptcs/parallel.hpp"
#include "mptcs/rng.hpp"

namespace mptcs {

namespace {

std::string padded(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s-%03d", prefix, i);
    return buf;
}

PolicyPtr make_heuristic(const Environment& env, int index, KeyedRng& rng) {
    int obs = env.observation_size();
    if (env.spec().id == "minibreakout") {
        BreakoutTrackerParams p;
        // Grid dimensions are recoverable from the schema.
        p.width = env.spec().schema.field("paddle_x").hi + 1;
        p.height = env.spec().schema.field("ball_y").hi + 1;
        p.dead_zone = rng.next_int(0, 2);
        p.trigger_y = rng.next_int(0, p.height - 2);
        p.aim_lead = rng.next_int(0, 1);
        p.home_x = rng.next_int(-1, p.width - 1);
        p.temperature = 0.05 + 0.5 * rng.next_unit();
        p.action_bias = {0.2 * rng.next_unit(), 0.2 * rng.next_unit(), 0.2 * rng.next_unit()};
        return std::make_shared<BreakoutTrackerPolicy>(padded("heur-bt", index), obs, p);
    }
    if (env.spec().id == "griddodge") {
        DodgeGreedyParams p;
        p.width = env.spec().schema.field("player_x").hi + 1;
        p.height = env.spec().schema.field("player_y").hi + 1;
        p.entity_capacity = (env.observation_size() - 3) / 5;
        p.danger_radius = rng.next_int(0, 3);
        p.flee_weight = 2.0 * rng.next_unit();
        p.gold_weight = 0.05 + 0.4 * rng.next_unit();
        p.temperature = 0.05 + 0.5 * rng.next_unit();
        p.action_bias.assign(5, 0.0);
        for (auto& b : p.action_bias) b = 0.2 * rng.next_unit();
        return std::make_shared<DodgeGreedyPolicy>(padded("heur-dg", index), obs, p);
    }
    throw ProvisioningFailedError("no heuristic family for environment " + env.spec().id);
}

double mean_return(const Policy& policy, const Environment& env,
                   const std::vector<uint64_t>& episode_keys) {
    double acc = 0.0;
    for (uint64_t key : episode_keys)
        acc += execute(env.sample_initial(key), policy, env).return_sum;
    return acc / static_cast<double>(episode_keys.size());
}

// (1 + lambda) evolution: keep the best perturbation each generation.
PolicyPtr evolve_network(const Environment& env, int index, const ProvisionConfig& config,
                         uint64_t seed, int workers) {
    std::vector<int> layers;
    layers.push_back(env.observation_size());
    for (int h : config.hidden_layers) layers.push_back(h);
    layers.push_back(env.spec().action_count);

    KeyedRng rng(seed, streams::kProvision);
    std::vector<uint64_t> episode_keys(static_cast<size_t>(config.es_episodes));
    for (auto& k : episode_keys) k = rng.next_u64();

    std::string id = padded("net", index);
    NetworkPolicy best = NetworkPolicy::random(id, layers, rng.next_u64());
    double best_return = mean_return(best, env, episode_keys);

    for (int gen = 0; gen < config.es_generations; ++gen) {
        std::vector<std::vector<double>> proposals(static_cast<size_t>(config.es_population));
        for (auto& params : proposals) {
            params = best.parameters();
            KeyedRng noise(rng.next_u64(), streams::kProvision);
            for (auto& w : params) w += config.es_sigma * noise.next_normal();
        }
        std::vector<double> returns(proposals.size());
        parallel_for(static_cast<int>(proposals.size()), workers, [&](int i) {
            NetworkPolicy candidate(id, layers, proposals[static_cast<size_t>(i)]);
            returns[static_cast<size_t>(i)] = mean_return(candidate, env, episode_keys);
        });
        for (size_t i = 0; i < proposals.size(); ++i) {
            if (returns[i] > best_return) {
                best_return = returns[i];
                best = NetworkPolicy(id, layers, proposals[i]);
            }
        }
    }
    return std::make_shared<NetworkPolicy>(std::move(best));
}

}  // namespace

double pairwise_disagreement(const Policy& a, const Policy& b, const Environment& env,
                             int state_count, uint64_t seed) {
    KeyedRng rng(seed, streams::kProvision);
    int differ = 0;
    for (int i = 0; i < state_count; ++i) {
        TestCase tc = env.sample_initial(rng.next_u64());
        auto obs = env.observe(tc.state);
        if (a.act(obs) != b.act(obs)) ++differ;
    }
    return static_cast<double>(differ) / state_count;
}

std::vector<PolicyPtr> provision_policy_pool(const Environment& env, const ProvisionConfig& config,
                                             uint64_t seed, int workers) {
    if (config.count < 2) throw ProvisioningFailedError("policy pool needs count >= 2");

    int heuristic_count =
        std::clamp(static_cast<int>(std::lround(config.count * config.heuristic_fraction)), 0,
                   config.count);
    KeyedRng rng(seed, streams::kProvision);
    uint64_t disagreement_seed = rng.next_u64();
    std::vector<uint64_t> floor_keys(static_cast<size_t>(std::max(config.floor_episodes, 1)));
    for (auto& k : floor_keys) k = rng.next_u64();

    std::vector<PolicyPtr> pool;
    pool.reserve(static_cast<size_t>(config.count));
    double best_return = 0.0;

    auto distinct_from_pool = [&](const Policy& candidate) {
        for (const auto& member : pool) {
            double d = pairwise_disagreement(candidate, *member, env, config.disagreement_states,
                                             disagreement_seed);
            if (d < config.min_disagreement) return false;
        }
        return true;
    };

    for (int i = 0; i < config.count; ++i) {
        bool want_heuristic = i < heuristic_count;
        PolicyPtr fallback;
        double fallback_return = -1.0;
        bool accepted = false;
        for (int attempt = 0; attempt < config.max_attempts_per_policy; ++attempt) {
            PolicyPtr candidate =
                want_heuristic ? make_heuristic(env, i, rng)
                               : evolve_network(env, i, config, rng.next_u64(), workers);
            if (!distinct_from_pool(*candidate)) continue;
            double ret = config.quality_floor_fraction > 0.0
                             ? mean_return(*candidate, env, floor_keys)
                             : 0.0;
            if (ret > fallback_return) {
                fallback_return = ret;
                fallback = candidate;
            }
            if (config.quality_floor_fraction > 0.0 &&
                ret < config.quality_floor_fraction * best_return)
                continue;
            best_return = std::max(best_return, ret);
            pool.push_back(std::move(candidate));
            accepted = true;
            break;
        }
        if (!accepted && fallback) {
            // Distinct but below the band: keep the best seen.
            pool.push_back(std::move(fallback));
            accepted = true;
        }
        if (!accepted)
            throw ProvisioningFailedError("could not provision a behaviorally distinct policy " +
                                          std::to_string(i) + " within the attempt budget");
    }
    return pool;
}

PolicyRanking rank_policies(const std::vector<PolicyPtr>& policies, const Environment& env,
                            int episodes, uint64_t seed, int workers) {
    if (episodes < 1) throw ConfigError("ranking needs at least one episode");
    KeyedRng rng(seed, streams::kRanking);
    std::vector<uint64_t> episode_keys(static_cast<size_t>(episodes));
    for (auto& k : episode_keys) k = rng.next_u64();

    std::vector<double> returns(policies.size());
    parallel_for(static_cast<int>(policies.size()), workers, [&](int i) {
        returns[static_cast<size_t>(i)] = mean_return(*policies[static_cast<size_t>(i)], env,
                                                      episode_keys);
    });

    PolicyRanking ranking;
    ranking.episodes = episodes;
    ranking.entries.reserve(policies.size());
    for (size_t i = 0; i < policies.size(); ++i)
        ranking.entries.emplace_back(policies[i]->id(), returns[i]);
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return ranking;
}

std::pair<PolicySet, PolicySet> partition_alternating(const PolicyRanking& ranking,
                                                      const std::vector<PolicyPtr>& policies,
                                                      int n_sel, int n_eval) {
    if (n_sel < 1 || n_eval < 0) throw ConfigError("invalid partition sizes");
    if (n_sel + n_eval > static_cast<int>(ranking.entries.size()))
        throw InsufficientPoliciesError("ranked pool has " +
                                        std::to_string(ranking.entries.size()) +
                                        " policies, need " + std::to_string(n_sel + n_eval));

    auto find = [&](const std::string& id) -> PolicyPtr {
        for (const auto& p : policies)
            if (p->id() == id) return p;
        throw InsufficientPoliciesError("ranking references unknown policy " + id);
    };

    PolicySet sel{.members = {}, .role = "selection"};
    PolicySet eval{.members = {}, .role = "evaluation"};
    bool to_sel = true;
    for (const auto& [id, ret] : ranking.entries) {
        bool sel_full = static_cast<int>(sel.members.size()) >= n_sel;
        bool eval_full = static_cast<int>(eval.members.size()) >= n_eval;
        if (sel_full && eval_full) break;
        if ((to_sel && !sel_full) || eval_full)
            sel.members.push_back(find(id));
        else
            eval.members.push_back(find(id));
        to_sel = !to_sel;
    }
    return {std::move(sel), std::move(eval)};
}

}  // namespace mptcs
