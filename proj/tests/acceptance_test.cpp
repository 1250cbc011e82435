// Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//
//   1. uncertainty-budget correctness (T/8 collapse + hand-derived value)
//   2. compliance guarantee on >= 10 randomized synthetic parts,
//      re-checked independently from the emitted plan documents
//   3. sampler-vs-oracle optimality gap on the 20-MP / 12-candidate instance
//   4. SA tour vs m!-enumeration optimum on random symmetric matrices
//   5. qualitative comparison pattern on the tight-tolerance scenario
//   6. Heron-formula distance vs the cross-product route
//   7. byte-identical plan/metrics under a fixed config + seed
//   8. histogram machinery with hand-placed uncertainties

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "scanplan/pipeline.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace scanplan;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CriterionBanner {
    int number;
    const char* summary;
    ~CriterionBanner() {
        std::printf("[criterion %d] %s: %s\n", number,
                    ::testing::Test::HasFailure() ? "FAIL" : "PASS", summary);
        std::fflush(stdout);
    }
};

}  // namespace

TEST(Acceptance, Criterion1_UncertaintyBudgetCorrectness) {
    CriterionBanner banner{1, "uncertainty budgets match the hand-derived values"};
    // T = 0.8, k = 1, no extra terms: exactly T/8.
    EXPECT_EQ(budget_from_tolerance(0.8, 1, 0.0, 0.0), 0.1);
    // T = 0.5, k = 2, U_mat = 0.01: sqrt((0.5/16)^2 - 0.01^2), frozen from
    // a 30-digit mpmath evaluation.
    EXPECT_NEAR(budget_from_tolerance(0.5, 2, 0.01, 0.0), 0.029606798205817528, 1e-9);
}

TEST(Acceptance, Criterion2_ComplianceGuaranteeAcrossRandomParts) {
    CriterionBanner banner{2, "100% of MPs satisfy k*U_ad <= T/8 on every successful plan"};
    const int k = 1;
    const double u_mat = 0.01, u_rot = 0.01;
    int parts_checked = 0;
    for (std::uint64_t instance = 1; instance <= 10; ++instance) {
        const synth::Scenario s =
            synth::write_random_scenario("acc2", instance, instance * 7 + 1);
        const PlannerConfig cfg = load_config(s.config_path);
        StrategyOutcome outcome;
        const PipelineArtifacts artifacts =
            run_pipeline(cfg, (s.dir / "out").string(), &outcome);
        ++parts_checked;

        // Independent re-check from the emitted artifacts only: re-read the
        // MP file, recompute the beam angle of every achieved covering
        // viewpoint from its pose in the plan document, evaluate the curve,
        // and test k*U_ad <= T/8 directly.
        const PlanDocument doc = parse_plan_document(artifacts.plan_path);
        const auto disk_mps = load_measurement_points(cfg.mp_path);
        const SensorUncertaintyCurve curve = cfg.curve();
        ASSERT_EQ(doc.achieved.size(), disk_mps.size());
        for (const AchievedMp& a : doc.achieved) {
            const auto mp = std::find_if(disk_mps.begin(), disk_mps.end(),
                                         [&](const auto& m) { return m.id == a.mp_id; });
            ASSERT_NE(mp, disk_mps.end());
            const auto vp = std::find_if(doc.viewpoints.begin(), doc.viewpoints.end(),
                                         [&](const auto& v) { return v.id == a.viewpoint_id; });
            ASSERT_NE(vp, doc.viewpoints.end());
            const double angle = incident_angle(*vp, *mp);
            EXPECT_NEAR(angle, a.angle, 1e-9);
            const double u_sen = sensor_uncertainty_at(curve, angle);
            EXPECT_LE(k * combined_uncertainty(u_sen, u_mat, u_rot),
                      mp->tolerance / 8.0 + 1e-9)
                << "instance " << instance << " mp " << a.mp_id;
        }
    }
    EXPECT_GE(parts_checked, 10);
}

TEST(Acceptance, Criterion3_SamplerWithinTenPercentOfOracle) {
    CriterionBanner banner{3, "enhanced RRT* within 10% of the exhaustive optimum (>=18/20 seeds)"};
    const synth::OracleInstance inst = synth::oracle_instance();
    std::vector<int> mp_ids;
    for (const auto& mp : inst.mps) mp_ids.push_back(mp.id);
    synth::ObjectiveOracle oracle(inst.candidates, mp_ids, 1.0, 0.05);
    const double optimum = oracle.optimum();
    ASSERT_NEAR(optimum, 0.182, 1e-12);  // hand: 0.040 + 0.042 + 2 * 0.05

    int within = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PlanResult result = plan_viewpoints(inst.candidates, inst.mps, {0, 0, 900},
                                                  synth::oracle_sampler_config(seed, 2000));
        if (result.full_coverage && result.objective_value <= 1.10 * optimum) ++within;
    }
    EXPECT_GE(within, 18);
}

TEST(Acceptance, Criterion4_TspMatchesEnumerationOracle) {
    CriterionBanner banner{4, "SA equals the m!-optimum in >=95% of 40 runs, never >2% above"};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coord(-300.0, 300.0);
    int equal = 0;
    int runs = 0;
    for (int instance = 0; instance < 8; ++instance) {
        const int m = 5 + instance % 4;  // 5..8
        std::vector<Vec3> points(m + 1);
        for (Vec3& p : points) p = {coord(rng), coord(rng), coord(rng)};
        TimeMatrix matrix;
        matrix.size = m;
        matrix.scan_time = 5.0;
        matrix.times.assign(static_cast<std::size_t>(m) * m,
                            std::numeric_limits<double>::infinity());
        matrix.home_legs.resize(m);
        for (int i = 0; i < m; ++i) {
            matrix.home_legs[i] = distance(points[m], points[i]) / 100.0;
            for (int j = i + 1; j < m; ++j) {
                const double t = distance(points[i], points[j]) / 100.0;
                matrix.at(i, j) = t;
                matrix.at(j, i) = t;
            }
        }
        const double optimum = synth::tsp_brute_force(matrix);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Tour tour = solve_tsp_sa(matrix, {}, seed);
            ++runs;
            EXPECT_LE(tour.total_time, optimum * 1.02 + 1e-9)
                << "instance " << instance << " seed " << seed;
            if (tour.total_time <= optimum + 1e-9) ++equal;
        }
    }
    ASSERT_EQ(runs, 40);
    EXPECT_GE(equal, 38);  // 95% of 40
}

TEST(Acceptance, Criterion5_QualitativeComparisonPattern) {
    CriterionBanner banner{5,
                           "tight scenario: rrt r=100% with strictly more viewpoints and "
                           "time; gate-free baseline r<100%"};
    const synth::Scenario s = synth::write_tight_scenario("acc5", "rrt", 0);
    const PlannerConfig cfg = load_config(s.config_path);
    const Comparison cmp = compare_strategies(cfg);

    EXPECT_DOUBLE_EQ(cmp.proposed.overall.compliance, 1.0);
    for (const auto& [kind, ks] : cmp.proposed.by_kind)
        if (ks.count > 0) EXPECT_DOUBLE_EQ(ks.compliance, 1.0);
    EXPECT_LT(cmp.baseline.overall.compliance, 1.0);
    EXPECT_GT(cmp.proposed.viewpoints, cmp.baseline.viewpoints);
    EXPECT_GT(cmp.proposed.total_time, cmp.baseline.total_time);
}

TEST(Acceptance, Criterion6_HeronMatchesCrossProduct) {
    CriterionBanner banner{6, "Heron distance equals the cross-product route on 1000 triples"};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-100.0, 100.0);
    int checked = 0;
    while (checked < 1000) {
        const Vec3 a{coord(rng), coord(rng), coord(rng)};
        const Vec3 b{coord(rng), coord(rng), coord(rng)};
        const Vec3 p{coord(rng), coord(rng), coord(rng)};
        if (distance(a, b) < 1.0) continue;
        ++checked;
        ASSERT_NEAR(min_distance_point_to_line(a, b, p), point_line_distance_cross(a, b, p),
                    1e-9);
    }
    EXPECT_EQ(checked, 1000);
}

TEST(Acceptance, Criterion7_ByteIdenticalReruns) {
    CriterionBanner banner{7, "identical config + seed reproduce byte-identical documents"};
    const synth::Scenario s = synth::write_plate_scenario("acc7", "rrt", 7);
    const PlannerConfig cfg = load_config(s.config_path);
    const PipelineArtifacts a = run_pipeline(cfg, (s.dir / "run_a").string());
    const PipelineArtifacts b = run_pipeline(cfg, (s.dir / "run_b").string());
    EXPECT_EQ(slurp(a.plan_path), slurp(b.plan_path));
    EXPECT_EQ(slurp(a.metrics_path), slurp(b.metrics_path));
    EXPECT_EQ(slurp(a.graph_path), slurp(b.graph_path));
}

TEST(Acceptance, Criterion8_HistogramBinPopulations) {
    CriterionBanner banner{8, "configured bins report exactly the hand-counted populations"};
    // Stock bin layout with uncertainties hand-placed per bin:
    // [0.04,0.07): 4, [0.07,0.10): 2, [0.10,0.13): 3, [0.13,0.16): 0,
    // [0.16,0.19): 1.
    std::vector<AchievedMp> achieved;
    int id = 0;
    for (double u : {0.040, 0.05, 0.06, 0.069, 0.07, 0.099, 0.10, 0.11, 0.129, 0.161}) {
        AchievedMp a;
        a.mp_id = ++id;
        a.kind = MpKind::surface;
        a.u_sen = u;
        a.compliant = true;
        achieved.push_back(a);
    }
    const PlanMetrics m = compute_metrics("rrt", 0, achieved, 3, 100.0,
                                          {0.04, 0.07, 0.10, 0.13, 0.16, 0.19});
    EXPECT_EQ(m.hist.counts, (std::vector<int>{4, 2, 3, 0, 1}));
    EXPECT_EQ(m.hist.below, 0);
    EXPECT_EQ(m.hist.above, 0);

    // The same layout through the metrics document.
    const auto dir = synth::make_temp_dir("acc8");
    const std::string path = (dir / "metrics.txt").string();
    write_metrics_document(m, path);
    const std::string text = slurp(path);
    EXPECT_NE(text.find("hist [0.04,0.07) 4"), std::string::npos);
    EXPECT_NE(text.find("hist [0.07,0.1) 2"), std::string::npos);
    EXPECT_NE(text.find("hist [0.1,0.13) 3"), std::string::npos);
    EXPECT_NE(text.find("hist [0.13,0.16) 0"), std::string::npos);
    EXPECT_NE(text.find("hist [0.16,0.19) 1"), std::string::npos);
}
