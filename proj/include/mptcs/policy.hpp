#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mptcs {

int argmax_action(std::span<const double> distribution);  // lowest index wins ties

// Deterministic observation -> action mapper exposing the full action
// distribution. The chosen action is always the argmax of that vector.
class Policy {
public:
    Policy(std::string id, int observation_size, int action_count)
        : id_(std::move(id)), observation_size_(observation_size), action_count_(action_count) {}
    virtual ~Policy() = default;

    const std::string& id() const { return id_; }
    virtual std::string kind() const = 0;
    int observation_size() const { return observation_size_; }
    int action_count() const { return action_count_; }

    // Nonnegative, sums to 1 within 1e-6; throws DimensionMismatchError on a
    // wrong-sized observation.
    std::vector<double> act_distribution(std::span<const double> obs) const;

    int act(std::span<const double> obs) const;

protected:
    virtual void distribution(std::span<const double> obs, std::span<double> out) const = 0;

private:
    std::string id_;
    int observation_size_;
    int action_count_;
};

using PolicyPtr = std::shared_ptr<const Policy>;

struct PolicySet {
    std::vector<PolicyPtr> members;
    std::string role;  // "selection" | "evaluation"

    int size() const { return static_cast<int>(members.size()); }
};

// Fully-connected tanh network with a softmax head. Weights are row-major
// per layer, biases appended after each weight block.
class NetworkPolicy : public Policy {
public:
    NetworkPolicy(std::string id, std::vector<int> layer_sizes, std::vector<double> parameters);

    std::string kind() const override { return "network"; }
    const std::vector<int>& layer_sizes() const { return layer_sizes_; }
    const std::vector<double>& parameters() const { return parameters_; }

    static size_t parameter_count(const std::vector<int>& layer_sizes);
    static NetworkPolicy random(std::string id, std::vector<int> layer_sizes, uint64_t seed);

protected:
    void distribution(std::span<const double> obs, std::span<double> out) const override;

private:
    std::vector<int> layer_sizes_;
    std::vector<double> parameters_;
};

// Scored-preference policies: a family computes per-action scores from the
// decoded observation, then a softmax at `temperature` turns them into a
// distribution. Temperature zero collapses to a one-hot argmax.
void scores_to_distribution(std::span<const double> scores, double temperature,
                            std::span<double> out);

struct BreakoutTrackerParams {
    int width = 10;
    int height = 10;
    int dead_zone = 0;      // |target - paddle| tolerated before moving
    int trigger_y = 0;      // track only once the ball is at or below this row
    int aim_lead = 0;       // cells of horizontal lead in the ball's direction
    int home_x = -1;        // idle column to drift toward; -1: rest in place
    double temperature = 0.1;
    std::vector<double> action_bias;  // per-action score nudges, |b| < 0.5
};

class BreakoutTrackerPolicy : public Policy {
public:
    BreakoutTrackerPolicy(std::string id, int observation_size, BreakoutTrackerParams params);
    std::string kind() const override { return "heuristic"; }
    const BreakoutTrackerParams& params() const { return params_; }

protected:
    void distribution(std::span<const double> obs, std::span<double> out) const override;

private:
    BreakoutTrackerParams params_;
};

struct DodgeGreedyParams {
    int width = 10;
    int height = 10;
    int entity_capacity = 8;
    int danger_radius = 2;       // Manhattan radius treated as dangerous
    double flee_weight = 1.0;    // penalty per unit of danger
    double gold_weight = 0.2;    // reward gradient toward the nearest gold
    double temperature = 0.1;
    std::vector<double> action_bias;
};

class DodgeGreedyPolicy : public Policy {
public:
    DodgeGreedyPolicy(std::string id, int observation_size, DodgeGreedyParams params);
    std::string kind() const override { return "heuristic"; }
    const DodgeGreedyParams& params() const { return params_; }

protected:
    void distribution(std::span<const double> obs, std::span<double> out) const override;

private:
    DodgeGreedyParams params_;
};

}  // namespace mptcs
