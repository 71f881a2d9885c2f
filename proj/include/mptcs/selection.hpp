#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mptcs/mdp.hpp"
#include "mptcs/policy.hpp"

namespace mptcs {

// Per-policy oracle outcomes for one candidate; 1 = failed.
using PassFailVector = std::vector<uint8_t>;

// Exact rational difficulty: numerator / m. The numerator is the failure
// count when at least one policy passed, else 0.
struct Score {
    int numerator = 0;
    int m = 1;

    double value() const { return static_cast<double>(numerator) / m; }

    friend bool operator==(const Score& a, const Score& b) {
        return static_cast<int64_t>(a.numerator) * b.m == static_cast<int64_t>(b.numerator) * a.m;
    }
    friend bool operator<(const Score& a, const Score& b) {
        return static_cast<int64_t>(a.numerator) * b.m < static_cast<int64_t>(b.numerator) * a.m;
    }
    friend bool operator>(const Score& a, const Score& b) { return b < a; }
};

Score difficulty(const PassFailVector& verdicts);

struct Descriptor {
    double obs_variance = 0.0;
    double mean_entropy = 0.0;
};

// Shannon entropy with natural log; 0 log 0 = 0.
double shannon_entropy(std::span<const double> distribution);

// Projects the m trajectories of one candidate onto the descriptor surface:
// across-policy observation variance averaged over the common prefix and all
// observation dimensions, and the mean entropy of the action distributions
// at the shared initial state.
Descriptor descriptor_from(const std::vector<Trajectory>& trajectories);

struct ScoredTestCase {
    TestCase test_case;
    Score score;
    Descriptor descriptor;
    PassFailVector verdicts;
    uint64_t sequence = 0;  // creation order, used for tie-breaking
};

struct ArchiveBounds {
    double variance_lo = 0.0;
    double variance_hi = 1.0;
    double entropy_lo = 0.0;
    double entropy_hi = 1.0;
};

using NicheIndex = std::pair<int, int>;

// Discretized descriptor grid holding at most one elite per niche. Every
// occupant has score > 0, i.e. is confirmed solvable by the selection set.
class Archive {
public:
    Archive() = default;
    Archive(ArchiveBounds bounds, int resolution_x, int resolution_y);

    const ArchiveBounds& bounds() const { return bounds_; }
    int resolution_x() const { return res_x_; }
    int resolution_y() const { return res_y_; }

    // Linear binning per axis; out-of-range descriptors clamp to edge cells.
    NicheIndex niche_index(const Descriptor& d) const;

    const ScoredTestCase* occupant(NicheIndex niche) const;
    int size() const { return static_cast<int>(cells_.size()); }

    // Replacement rule: strictly greater score wins; ties keep the
    // incumbent; zero-score candidates are never admitted.
    bool offer(const ScoredTestCase& candidate);

    // Niche-ordered iteration (row-major), deterministic across runs.
    const std::map<NicheIndex, ScoredTestCase>& cells() const { return cells_; }

    std::vector<TestCase> suite() const;

private:
    ArchiveBounds bounds_;
    int res_x_ = 50;
    int res_y_ = 50;
    std::map<NicheIndex, ScoredTestCase> cells_;
};

// Executes every selection policy on the candidate and assembles the scored
// record (verdicts, difficulty, descriptor).
ScoredTestCase evaluate_candidate(const TestCase& candidate, const PolicySet& selection,
                                  const Environment& env, const OracleConfig& oracle);

struct InsertResult {
    ScoredTestCase scored;
    NicheIndex niche;
    bool inserted = false;
};

InsertResult mptcs_insert(Archive& archive, const TestCase& candidate, const PolicySet& selection,
                          const Environment& env, const OracleConfig& oracle);

// Evaluates candidates in parallel, then applies insertions serially in
// candidate order; results are identical to the all-serial path.
std::vector<InsertResult> mptcs_insert_batch(Archive& archive, std::span<const TestCase> candidates,
                                             const PolicySet& selection, const Environment& env,
                                             const OracleConfig& oracle, int workers = 1);

// Descriptor-space bounds from a random probe of initial states: entropy
// spans [0, ln(action_count)]; the variance axis upper edge is the probe
// maximum with a small margin.
ArchiveBounds calibrate_bounds(const Environment& env, const PolicySet& selection,
                               const OracleConfig& oracle, int probe_count, uint64_t seed,
                               int workers = 1);

}  // namespace mptcs
