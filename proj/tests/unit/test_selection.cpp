#include <doctest.h>

#include <cmath>
#include <map>

#include "mptcs/errors.hpp"
#include "mptcs/rng.hpp"
#include "mptcs/selection.hpp"
#include "test_util.hpp"

using namespace mptcs;
using namespace mptcs::test;

namespace {

// Independent transcription of the difficulty definition: an indicator that
// some policy passed, times the mean failure count. Kept separate from the
// library so the two routes can disagree.
double difficulty_reference(const PassFailVector& verdicts) {
    double failures = 0.0;
    bool any_pass = false;
    for (uint8_t v : verdicts) {
        if (v)
            failures += 1.0;
        else
            any_pass = true;
    }
    double indicator = any_pass ? 1.0 : 0.0;
    return indicator * failures / static_cast<double>(verdicts.size());
}

Trajectory trajectory_with(std::vector<std::vector<double>> observations,
                           std::vector<double> initial_distribution) {
    Trajectory t;
    for (auto& obs : observations) {
        TrajectoryStep s;
        s.observation = std::move(obs);
        s.action_distribution = initial_distribution;
        t.steps.push_back(std::move(s));
    }
    return t;
}

ScoredTestCase synthetic_case(double variance, double entropy, int numerator, int m,
                              uint64_t sequence) {
    ScoredTestCase s;
    s.score = {numerator, m};
    s.descriptor = {variance, entropy};
    s.sequence = sequence;
    s.verdicts.assign(static_cast<size_t>(m), 0);
    for (int i = 0; i < numerator; ++i) s.verdicts[static_cast<size_t>(i)] = 1;
    return s;
}

}  // namespace

TEST_CASE("difficulty matches the stated fractions") {
    CHECK(difficulty({1, 1, 0, 0, 0}) == Score{2, 5});
    CHECK(difficulty({1, 1, 1, 1, 1}).numerator == 0);  // unsolvable: indicator kills it
    CHECK(difficulty({0, 0, 0, 0, 0}).numerator == 0);
    CHECK(difficulty({1}).numerator == 0);
    CHECK(difficulty({1, 0}) == Score{1, 2});
}

TEST_CASE("difficulty agrees with the direct transcription on every vector up to m=10") {
    for (int m = 1; m <= 10; ++m) {
        for (uint32_t bits = 0; bits < (1u << m); ++bits) {
            PassFailVector v(static_cast<size_t>(m));
            for (int j = 0; j < m; ++j) v[static_cast<size_t>(j)] = (bits >> j) & 1u;
            Score s = difficulty(v);
            CHECK(s.value() == difficulty_reference(v));
            CHECK(s.m == m);
        }
    }
}

TEST_CASE("adding a policy raises the maximal score by exactly 1/((m+1)m)") {
    for (int64_t m = 1; m <= 20; ++m) {
        // max score is (m-1)/m; the delta (m)/(m+1) - (m-1)/m reduces to
        // 1/((m+1)m). Exact integer cross-multiplication, no doubles.
        int64_t lhs_num = m * m - (m - 1) * (m + 1);
        int64_t lhs_den = (m + 1) * m;
        CHECK(lhs_num == 1);
        CHECK(lhs_den == (m + 1) * m);
    }
}

TEST_CASE("score ordering is exact rational comparison") {
    CHECK(Score{1, 3} < Score{2, 5});   // 0.333 < 0.4
    CHECK(Score{2, 5} < Score{1, 2});   // 0.4 < 0.5
    CHECK(Score{2, 4} == Score{1, 2});
    CHECK(Score{3, 5} > Score{2, 5});
}

TEST_CASE("identical trajectories give zero observation variance") {
    std::vector<Trajectory> trajs(4, trajectory_with({{0.1, 0.2}, {0.3, 0.4}}, {0.5, 0.5}));
    Descriptor d = descriptor_from(trajs);
    CHECK(d.obs_variance == 0.0);
}

TEST_CASE("uniform initial distributions hit the entropy ceiling") {
    double third = 1.0 / 3.0;
    std::vector<Trajectory> trajs(5, trajectory_with({{0.0}}, {third, third, third}));
    Descriptor d = descriptor_from(trajs);
    CHECK(d.mean_entropy == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("a constant offset in one dimension gives variance c^2/4 over D") {
    // Two trajectories, D = 5, offset c = 0.3 in dimension 2 at every step.
    const double c = 0.3;
    std::vector<std::vector<double>> base{{0.1, 0.2, 0.3, 0.4, 0.5}, {0.5, 0.4, 0.3, 0.2, 0.1}};
    std::vector<std::vector<double>> offset = base;
    for (auto& obs : offset) obs[2] += c;
    std::vector<Trajectory> trajs{trajectory_with(base, {1.0, 0.0}),
                                  trajectory_with(offset, {1.0, 0.0})};
    Descriptor d = descriptor_from(trajs);
    CHECK(d.obs_variance == doctest::Approx((c * c / 4.0) / 5.0).epsilon(1e-12));
    CHECK(d.mean_entropy == 0.0);
}

TEST_CASE("variance averages only over the common prefix") {
    std::vector<Trajectory> trajs{
        trajectory_with({{0.0}, {0.0}, {0.0}}, {1.0, 0.0}),
        trajectory_with({{1.0}}, {1.0, 0.0}),
    };
    // Prefix length 1: single timestep with values {0, 1}: variance 0.25.
    CHECK(descriptor_from(trajs).obs_variance == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("descriptor rejects empty inputs") {
    CHECK_THROWS_AS(descriptor_from({}), EmptyTrajectoryError);
    std::vector<Trajectory> with_empty{trajectory_with({{0.0}}, {1.0}), Trajectory{}};
    CHECK_THROWS_AS(descriptor_from(with_empty), EmptyTrajectoryError);
}

TEST_CASE("niche binning clamps to edge cells") {
    Archive archive({0.0, 1.0, 0.0, 2.0}, 50, 50);
    CHECK(archive.niche_index({0.0, 0.0}) == NicheIndex{0, 0});
    CHECK(archive.niche_index({1.0, 2.0}) == NicheIndex{49, 49});
    CHECK(archive.niche_index({5.0, 100.0}) == NicheIndex{49, 49});
    CHECK(archive.niche_index({-3.0, -1.0}) == NicheIndex{0, 0});
    CHECK(archive.niche_index({0.5, 1.0}) == NicheIndex{25, 25});
}

TEST_CASE("replacement admits strict improvements only") {
    Archive archive({0.0, 1.0, 0.0, 1.0}, 10, 10);

    CHECK(archive.offer(synthetic_case(0.15, 0.5, 3, 5, 0)));
    CHECK(archive.size() == 1);

    // Equal score: the incumbent stays.
    CHECK_FALSE(archive.offer(synthetic_case(0.15, 0.5, 3, 5, 1)));
    CHECK(archive.occupant({1, 5})->sequence == 0);

    // Lower score: rejected.
    CHECK_FALSE(archive.offer(synthetic_case(0.15, 0.5, 2, 5, 2)));

    // Strictly higher: replaced.
    CHECK(archive.offer(synthetic_case(0.15, 0.5, 4, 5, 3)));
    CHECK(archive.occupant({1, 5})->sequence == 3);

    // Zero scores never enter, even into empty niches.
    CHECK_FALSE(archive.offer(synthetic_case(0.9, 0.9, 0, 5, 4)));
    CHECK(archive.size() == 1);
}

TEST_CASE("every occupied niche keeps the maximum score ever offered") {
    Archive archive({0.0, 1.0, 0.0, 1.0}, 8, 8);
    std::map<NicheIndex, Score> best_offered;
    KeyedRng rng(2024, 0);
    for (int i = 0; i < 5000; ++i) {
        ScoredTestCase c = synthetic_case(rng.next_unit(), rng.next_unit(), rng.next_int(0, 4), 5,
                                          static_cast<uint64_t>(i));
        NicheIndex niche = archive.niche_index(c.descriptor);
        archive.offer(c);
        if (c.score.numerator > 0) {
            auto it = best_offered.find(niche);
            if (it == best_offered.end() || it->second < c.score) best_offered[niche] = c.score;
        }
    }
    REQUIRE(archive.size() == static_cast<int>(best_offered.size()));
    for (const auto& [niche, elite] : archive.cells()) {
        CHECK(elite.score == best_offered.at(niche));
        CHECK(elite.score.numerator > 0);
        bool any_pass = false;
        for (uint8_t v : elite.verdicts) any_pass |= v == 0;
        CHECK(any_pass);
    }
}

TEST_CASE("insertion evaluates all selection policies and archives solvable cases only") {
    MiniBreakoutEnv env;
    PolicySet sel{{fixed_action(env, 0, "L"), fixed_action(env, 1, "N"), fixed_action(env, 2, "R")},
                  "selection"};
    Archive archive({0.0, 0.05, 0.0, std::log(3.0)}, 10, 10);

    KeyedRng rng(5, 0);
    int inserted = 0;
    for (int i = 0; i < 200; ++i) {
        TestCase tc = env.sample_initial(rng.next_u64());
        InsertResult r = mptcs_insert(archive, tc, sel, env, {});
        CHECK(r.scored.verdicts.size() == 3);
        if (r.inserted) ++inserted;
    }
    CHECK(inserted > 0);
    for (const auto& [niche, elite] : archive.cells()) {
        CHECK(elite.score.numerator > 0);
        CHECK(archive.niche_index(elite.descriptor) == niche);
        // Re-execution confirms at least one pass.
        int passes = 0;
        for (const auto& policy : sel.members)
            if (!oracle(elite.test_case, *policy, env, {}).failed) ++passes;
        CHECK(passes >= 1);
        CHECK(passes < 3);
    }
}

TEST_CASE("batch insertion matches the serial path for any worker count") {
    GridDodgeEnv env;
    PolicySet sel{{fixed_action(env, 4, "N"), fixed_action(env, 2, "L"), fixed_action(env, 3, "R")},
                  "selection"};
    std::vector<TestCase> candidates;
    KeyedRng rng(9, 0);
    for (int i = 0; i < 60; ++i) candidates.push_back(env.sample_initial(rng.next_u64()));

    Archive serial({0.0, 0.05, 0.0, std::log(5.0)}, 12, 12);
    Archive parallel({0.0, 0.05, 0.0, std::log(5.0)}, 12, 12);
    auto a = mptcs_insert_batch(serial, candidates, sel, env, {}, 1);
    auto b = mptcs_insert_batch(parallel, candidates, sel, env, {}, 8);

    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].inserted == b[i].inserted);
        CHECK(a[i].niche == b[i].niche);
        CHECK(a[i].scored.verdicts == b[i].scored.verdicts);
    }
    CHECK(serial.size() == parallel.size());
    auto sa = serial.cells().begin();
    for (const auto& [niche, elite] : parallel.cells()) {
        CHECK(sa->first == niche);
        CHECK(sa->second.test_case == elite.test_case);
        ++sa;
    }
}

TEST_CASE("calibrated bounds cover the probe and pin the entropy axis") {
    MiniBreakoutEnv env;
    PolicySet sel{{fixed_action(env, 0, "L"), fixed_action(env, 2, "R")}, "selection"};
    ArchiveBounds bounds = calibrate_bounds(env, sel, {}, 200, 3);
    CHECK(bounds.variance_lo == 0.0);
    CHECK(bounds.variance_hi > 0.0);
    CHECK(bounds.entropy_hi == doctest::Approx(std::log(3.0)));
}
