#include "mptcs/selection.hpp"

#include <algorithm>
#include <cmath>

#include "mptcs/errors.hpp"
#include "mptcs/parallel.hpp"
#include "mptcs/rng.hpp"

namespace mptcs {

Score difficulty(const PassFailVector& verdicts) {
    if (verdicts.empty()) throw std::invalid_argument("difficulty over empty verdict vector");
    int m = static_cast<int>(verdicts.size());
    int failures = 0;
    for (uint8_t v : verdicts) failures += v ? 1 : 0;
    bool solvable = failures < m;
    return Score{solvable ? failures : 0, m};
}

double shannon_entropy(std::span<const double> distribution) {
    double h = 0.0;
    for (double p : distribution)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

Descriptor descriptor_from(const std::vector<Trajectory>& trajectories) {
    if (trajectories.empty()) throw EmptyTrajectoryError("descriptor needs at least one trajectory");
    size_t prefix = trajectories.front().steps.size();
    for (const auto& t : trajectories) prefix = std::min(prefix, t.steps.size());
    if (prefix == 0) throw EmptyTrajectoryError("descriptor over an empty trajectory");

    size_t dims = trajectories.front().steps.front().observation.size();
    const double m = static_cast<double>(trajectories.size());

    double var_acc = 0.0;
    for (size_t t = 0; t < prefix; ++t) {
        for (size_t d = 0; d < dims; ++d) {
            double mean = 0.0;
            for (const auto& traj : trajectories) mean += traj.steps[t].observation[d];
            mean /= m;
            double var = 0.0;
            for (const auto& traj : trajectories) {
                double diff = traj.steps[t].observation[d] - mean;
                var += diff * diff;
            }
            var_acc += var / m;  // population variance
        }
    }

    double entropy_acc = 0.0;
    for (const auto& traj : trajectories)
        entropy_acc += shannon_entropy(traj.steps.front().action_distribution);

    return Descriptor{var_acc / (static_cast<double>(prefix) * static_cast<double>(dims)),
                      entropy_acc / m};
}

Archive::Archive(ArchiveBounds bounds, int resolution_x, int resolution_y)
    : bounds_(bounds), res_x_(resolution_x), res_y_(resolution_y) {
    if (res_x_ < 1 || res_y_ < 1) throw ConfigError("archive resolution must be positive");
    if (!(bounds_.variance_hi >= bounds_.variance_lo) ||
        !(bounds_.entropy_hi >= bounds_.entropy_lo))
        throw ConfigError("archive bounds inverted");
}

namespace {
int bin_axis(double v, double lo, double hi, int res) {
    if (hi <= lo) return 0;
    int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * res));
    return std::clamp(b, 0, res - 1);
}
}  // namespace

NicheIndex Archive::niche_index(const Descriptor& d) const {
    return {bin_axis(d.obs_variance, bounds_.variance_lo, bounds_.variance_hi, res_x_),
            bin_axis(d.mean_entropy, bounds_.entropy_lo, bounds_.entropy_hi, res_y_)};
}

const ScoredTestCase* Archive::occupant(NicheIndex niche) const {
    auto it = cells_.find(niche);
    return it == cells_.end() ? nullptr : &it->second;
}

bool Archive::offer(const ScoredTestCase& candidate) {
    if (candidate.score.numerator <= 0) return false;
    NicheIndex niche = niche_index(candidate.descriptor);
    auto it = cells_.find(niche);
    if (it == cells_.end()) {
        cells_.emplace(niche, candidate);
        return true;
    }
    if (it->second.score < candidate.score) {
        it->second = candidate;
        return true;
    }
    return false;
}

std::vector<TestCase> Archive::suite() const {
    std::vector<TestCase> out;
    out.reserve(cells_.size());
    for (const auto& [niche, elite] : cells_) out.push_back(elite.test_case);
    return out;
}

ScoredTestCase evaluate_candidate(const TestCase& candidate, const PolicySet& selection,
                                  const Environment& env, const OracleConfig& oracle) {
    std::vector<Trajectory> trajectories;
    trajectories.reserve(selection.members.size());
    ScoredTestCase scored;
    scored.test_case = candidate;
    scored.verdicts.reserve(selection.members.size());
    for (const auto& policy : selection.members) {
        trajectories.push_back(execute(candidate, *policy, env));
        scored.verdicts.push_back(oracle_verdict(trajectories.back(), oracle).failed ? 1 : 0);
    }
    scored.score = difficulty(scored.verdicts);
    scored.descriptor = descriptor_from(trajectories);
    return scored;
}

InsertResult mptcs_insert(Archive& archive, const TestCase& candidate, const PolicySet& selection,
                          const Environment& env, const OracleConfig& oracle) {
    InsertResult result;
    result.scored = evaluate_candidate(candidate, selection, env, oracle);
    result.niche = archive.niche_index(result.scored.descriptor);
    result.inserted = archive.offer(result.scored);
    return result;
}

std::vector<InsertResult> mptcs_insert_batch(Archive& archive, std::span<const TestCase> candidates,
                                             const PolicySet& selection, const Environment& env,
                                             const OracleConfig& oracle, int workers) {
    std::vector<InsertResult> results(candidates.size());
    parallel_for(static_cast<int>(candidates.size()), workers, [&](int i) {
        results[static_cast<size_t>(i)].scored =
            evaluate_candidate(candidates[static_cast<size_t>(i)], selection, env, oracle);
    });
    for (auto& r : results) {
        r.niche = archive.niche_index(r.scored.descriptor);
        r.inserted = archive.offer(r.scored);
    }
    return results;
}

ArchiveBounds calibrate_bounds(const Environment& env, const PolicySet& selection,
                               const OracleConfig& oracle, int probe_count, uint64_t seed,
                               int workers) {
    std::vector<double> variances(static_cast<size_t>(probe_count));
    KeyedRng rng(seed, streams::kCalibration);
    std::vector<uint64_t> keys(static_cast<size_t>(probe_count));
    for (auto& k : keys) k = rng.next_u64();
    parallel_for(probe_count, workers, [&](int i) {
        TestCase tc = env.sample_initial(keys[static_cast<size_t>(i)]);
        ScoredTestCase scored = evaluate_candidate(tc, selection, env, oracle);
        variances[static_cast<size_t>(i)] = scored.descriptor.obs_variance;
    });
    double hi = 0.0;
    for (double v : variances) hi = std::max(hi, v);
    ArchiveBounds bounds;
    bounds.variance_lo = 0.0;
    bounds.variance_hi = hi > 0.0 ? hi * 1.05 : 1.0;
    bounds.entropy_lo = 0.0;
    bounds.entropy_hi = std::log(static_cast<double>(env.spec().action_count));
    return bounds;
}

}  // namespace mptcs
