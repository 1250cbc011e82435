#include <gtest/gtest.h>

#include <set>

#include "scanplan/baseline.hpp"
#include "support/instances.hpp"

using namespace scanplan;

TEST(Greedy, SingleCoveringCandidate) {
    const auto mps = synth::numbered_mps(3);
    const std::vector<Candidate> cands = {
        synth::make_candidate(0, {0, 0, 300}, {1, 2, 3}, 0.05),
        synth::make_candidate(1, {100, 0, 300}, {1}, 0.05)};
    EXPECT_EQ(greedy_target_sampling(cands, mps, {0, 0, 600}), std::vector<int>{0});
}

TEST(Greedy, MaxCoverageTrace) {
    // Sets {A,B}, {B,C}, {C}: picks {A,B} then {B,C}.
    const auto mps = synth::numbered_mps(3);
    const std::vector<Candidate> cands = {
        synth::make_candidate(0, {0, 0, 300}, {1, 2}, 0.05),
        synth::make_candidate(1, {50, 0, 300}, {2, 3}, 0.05),
        synth::make_candidate(2, {100, 0, 300}, {3}, 0.05)};
    EXPECT_EQ(greedy_target_sampling(cands, mps, {0, 0, 600}), (std::vector<int>{0, 1}));
}

TEST(Greedy, CoverageFailureNamesTheMp) {
    const auto mps = synth::numbered_mps(3);
    const std::vector<Candidate> cands = {synth::make_candidate(0, {0, 0, 300}, {1, 2}, 0.05)};
    try {
        greedy_target_sampling(cands, mps, {0, 0, 600});
        FAIL() << "expected CoverageFailureError";
    } catch (const CoverageFailureError& e) {
        EXPECT_NE(std::string(e.what()).find("{3}"), std::string::npos) << e.what();
    }
}

TEST(Greedy, TieBrokenByHopFromLastPick) {
    const auto mps = synth::numbered_mps(4);
    // First pick is forced ({1,2} is the max gain). Then candidates 1 and 2
    // tie on gain; candidate 2 is nearer to the first pick's position.
    const std::vector<Candidate> cands = {
        synth::make_candidate(0, {0, 0, 300}, {1, 2}, 0.05),
        synth::make_candidate(1, {500, 0, 300}, {3, 4}, 0.05),
        synth::make_candidate(2, {80, 0, 300}, {3, 4}, 0.05)};
    EXPECT_EQ(greedy_target_sampling(cands, mps, {0, 0, 600}), (std::vector<int>{0, 2}));
}

TEST(Greedy, CoversEverythingWithinCandidateBudget) {
    const synth::OracleInstance inst = synth::oracle_instance();
    const std::vector<int> picks = greedy_target_sampling(inst.candidates, inst.mps, {0, 0, 900});
    EXPECT_LE(picks.size(), inst.candidates.size());
    std::set<int> covered;
    for (int idx : picks)
        for (const auto& e : inst.candidates[idx].visible.entries) covered.insert(e.mp_id);
    EXPECT_EQ(covered.size(), inst.mps.size());
}
