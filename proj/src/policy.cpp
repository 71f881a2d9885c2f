#include "mptcs/policy.hpp"

#include <algorithm>
#include <cmath>

#include "mptcs/errors.hpp"
#include "mptcs/rng.hpp"

namespace mptcs {

int argmax_action(std::span<const double> distribution) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(distribution.size()); ++i)
        if (distribution[i] > distribution[best]) best = i;
    return best;
}

std::vector<double> Policy::act_distribution(std::span<const double> obs) const {
    if (static_cast<int>(obs.size()) != observation_size_)
        throw DimensionMismatchError("policy " + id_ + " expects obs size " +
                                     std::to_string(observation_size_) + ", got " +
                                     std::to_string(obs.size()));
    std::vector<double> out(static_cast<size_t>(action_count_));
    distribution(obs, out);
    return out;
}

int Policy::act(std::span<const double> obs) const {
    auto dist = act_distribution(obs);
    return argmax_action(dist);
}

void scores_to_distribution(std::span<const double> scores, double temperature,
                            std::span<double> out) {
    size_t n = scores.size();
    if (temperature <= 1e-9) {
        int best = argmax_action(scores);
        for (size_t i = 0; i < n; ++i) out[i] = 0.0;
        out[static_cast<size_t>(best)] = 1.0;
        return;
    }
    double hi = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        out[i] = std::exp((scores[i] - hi) / temperature);
        sum += out[i];
    }
    for (size_t i = 0; i < n; ++i) out[i] /= sum;
}

size_t NetworkPolicy::parameter_count(const std::vector<int>& layer_sizes) {
    size_t n = 0;
    for (size_t l = 0; l + 1 < layer_sizes.size(); ++l)
        n += static_cast<size_t>(layer_sizes[l]) * layer_sizes[l + 1] + layer_sizes[l + 1];
    return n;
}

NetworkPolicy::NetworkPolicy(std::string id, std::vector<int> layer_sizes,
                             std::vector<double> parameters)
    : Policy(std::move(id), layer_sizes.front(), layer_sizes.back()),
      layer_sizes_(std::move(layer_sizes)),
      parameters_(std::move(parameters)) {
    if (layer_sizes_.size() < 2)
        throw DimensionMismatchError("network needs at least input and output layers");
    if (parameters_.size() != parameter_count(layer_sizes_))
        throw DimensionMismatchError("network parameter count mismatch for policy " + this->id());
}

NetworkPolicy NetworkPolicy::random(std::string id, std::vector<int> layer_sizes, uint64_t seed) {
    KeyedRng rng(seed, streams::kProvision);
    std::vector<double> params(parameter_count(layer_sizes));
    size_t idx = 0;
    for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        double scale = 1.0 / std::sqrt(static_cast<double>(layer_sizes[l]));
        size_t block = static_cast<size_t>(layer_sizes[l]) * layer_sizes[l + 1];
        for (size_t i = 0; i < block; ++i) params[idx++] = scale * rng.next_normal();
        for (int i = 0; i < layer_sizes[l + 1]; ++i) params[idx++] = 0.0;
    }
    return NetworkPolicy(std::move(id), std::move(layer_sizes), std::move(params));
}

void NetworkPolicy::distribution(std::span<const double> obs, std::span<double> out) const {
    std::vector<double> cur(obs.begin(), obs.end());
    std::vector<double> next;
    size_t idx = 0;
    for (size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
        int in = layer_sizes_[l];
        int width = layer_sizes_[l + 1];
        next.assign(static_cast<size_t>(width), 0.0);
        const double* w = parameters_.data() + idx;
        const double* b = w + static_cast<size_t>(in) * width;
        for (int j = 0; j < width; ++j) {
            double acc = b[j];
            const double* row = w + static_cast<size_t>(j) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * cur[static_cast<size_t>(i)];
            next[static_cast<size_t>(j)] = acc;
        }
        idx += static_cast<size_t>(in) * width + width;
        bool last = l + 2 == layer_sizes_.size();
        if (!last)
            for (auto& v : next) v = std::tanh(v);
        cur.swap(next);
    }
    scores_to_distribution(cur, 1.0, out);  // softmax head
}

BreakoutTrackerPolicy::BreakoutTrackerPolicy(std::string id, int observation_size,
                                             BreakoutTrackerParams params)
    : Policy(std::move(id), observation_size, 3), params_(std::move(params)) {
    params_.action_bias.resize(3, 0.0);
}

void BreakoutTrackerPolicy::distribution(std::span<const double> obs, std::span<double> out) const {
    const auto& p = params_;
    int paddle = static_cast<int>(std::lround(obs[0] * (p.width - 1)));
    int ball_x = static_cast<int>(std::lround(obs[1] * (p.width - 1)));
    int ball_y = static_cast<int>(std::lround(obs[2] * (p.height - 1)));
    int dx = obs[3] > 0.5 ? 1 : -1;

    double scores[3] = {p.action_bias[0], p.action_bias[1], p.action_bias[2]};
    if (ball_y < p.trigger_y) {
        // Idle phase: drift toward the home column, or rest in place.
        int diff = p.home_x < 0 ? 0 : p.home_x - paddle;
        if (std::abs(diff) <= p.dead_zone)
            scores[1] += 1.0;
        else if (diff < 0)
            scores[0] += 1.0;
        else
            scores[2] += 1.0;
    } else {
        int target = std::clamp(ball_x + p.aim_lead * dx, 0, p.width - 1);
        int diff = target - paddle;
        if (std::abs(diff) <= p.dead_zone)
            scores[1] += 1.0;
        else if (diff < 0)
            scores[0] += 1.0;
        else
            scores[2] += 1.0;
    }
    scores_to_distribution(std::span<const double>(scores, 3), p.temperature, out);
}

DodgeGreedyPolicy::DodgeGreedyPolicy(std::string id, int observation_size,
                                     DodgeGreedyParams params)
    : Policy(std::move(id), observation_size, 5), params_(std::move(params)) {
    params_.action_bias.resize(5, 0.0);
}

void DodgeGreedyPolicy::distribution(std::span<const double> obs, std::span<double> out) const {
    const auto& p = params_;
    int px = static_cast<int>(std::lround(obs[0] * (p.width - 1)));
    int py = static_cast<int>(std::lround(obs[1] * (p.height - 1)));

    struct Ent {
        int x, y, dir;
        bool gold;
    };
    std::vector<Ent> ents;
    ents.reserve(static_cast<size_t>(p.entity_capacity));
    for (int i = 0; i < p.entity_capacity; ++i) {
        size_t o = static_cast<size_t>(3 + i * 5);
        if (obs[o] < 0.5) continue;
        ents.push_back({static_cast<int>(std::lround(obs[o + 1] * (p.width - 1))),
                        static_cast<int>(std::lround(obs[o + 2] * (p.height - 1))),
                        obs[o + 3] > 0.5 ? 1 : -1, obs[o + 4] > 0.5});
    }

    const int dirs[5][2] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}, {0, 0}};
    std::vector<double> scores(5);
    for (int a = 0; a < 5; ++a) {
        int tx = std::clamp(px + dirs[a][0], 0, p.width - 1);
        int ty = std::clamp(py + dirs[a][1], 0, p.height - 1);
        double danger = 0.0;
        double gold_dist = static_cast<double>(p.width + p.height);
        for (const auto& e : ents) {
            // Anticipate one step of entity motion.
            int ex = std::clamp(e.x + e.dir, 0, p.width - 1);
            int dist = std::abs(tx - ex) + std::abs(ty - e.y);
            if (e.gold) {
                gold_dist = std::min(gold_dist, static_cast<double>(dist));
            } else if (dist <= p.danger_radius) {
                danger += static_cast<double>(p.danger_radius + 1 - dist);
            }
        }
        scores[static_cast<size_t>(a)] =
            p.action_bias[static_cast<size_t>(a)] - p.flee_weight * danger - p.gold_weight * gold_dist;
    }
    scores_to_distribution(scores, p.temperature, out);
}

}  // namespace mptcs
