#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "scanplan/report.hpp"
#include "support/synthetic.hpp"

using namespace scanplan;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Histogram, HandPlacedValuesLandInTheRightBins) {
    const std::vector<double> edges = {0.04, 0.07, 0.10, 0.13, 0.16, 0.19};
    // Hand-placed: bin0 x3, bin1 x2, bin2 x1, bin3 x0, bin4 x2, below x1, above x1.
    const std::vector<double> values = {0.041, 0.05,  0.069, 0.07, 0.099, 0.12,
                                        0.161, 0.189, 0.03,  0.19};
    const Histogram h = histogram(values, edges);
    EXPECT_EQ(h.counts, (std::vector<int>{3, 2, 1, 0, 2}));
    EXPECT_EQ(h.below, 1);
    EXPECT_EQ(h.above, 1);  // 0.19 == last edge falls outside the last half-open bin
}

TEST(Histogram, EdgeValuesAreLeftInclusive) {
    const std::vector<double> edges = {0.0, 1.0, 2.0};
    const Histogram h = histogram({0.0, 1.0, 1.999999, 2.0}, edges);
    EXPECT_EQ(h.counts, (std::vector<int>{1, 2}));
    EXPECT_EQ(h.above, 1);
}

TEST(BinLabel, VerbatimEdges) {
    EXPECT_EQ(bin_label(0.04, 0.07), "[0.04,0.07)");
    EXPECT_EQ(bin_label(0.1, 0.13), "[0.1,0.13)");
}

TEST(Achieved, MinAngleCoveringViewpointWins) {
    std::vector<MeasurementPoint> mps(1);
    mps[0].id = 7;
    mps[0].normal = {0, 0, 1};
    mps[0].tolerance = 1.0;
    mps[0].kind = MpKind::hole;

    Viewpoint a, b;
    a.id = 10;
    b.id = 11;
    VisibleSet va, vb;
    va.viewpoint_id = 10;
    va.entries = {{7, 0.4, 0.08}};
    vb.viewpoint_id = 11;
    vb.entries = {{7, 0.1, 0.05}};

    const auto achieved = achieved_uncertainties(mps, {a, b}, {va, vb}, 1, 0.01, 0.01);
    ASSERT_EQ(achieved.size(), 1u);
    EXPECT_EQ(achieved[0].viewpoint_id, 11);
    EXPECT_DOUBLE_EQ(achieved[0].u_sen, 0.05);
    EXPECT_TRUE(achieved[0].compliant);  // sqrt(0.05^2+0.0002) = 0.052 <= 0.125
}

TEST(Achieved, TieGoesToEarliestInPlanOrder) {
    std::vector<MeasurementPoint> mps(1);
    mps[0].id = 7;
    mps[0].normal = {0, 0, 1};
    mps[0].tolerance = 1.0;
    Viewpoint a, b;
    a.id = 10;
    b.id = 11;
    VisibleSet va, vb;
    va.entries = {{7, 0.25, 0.06}};
    vb.entries = {{7, 0.25, 0.06}};
    const auto achieved = achieved_uncertainties(mps, {a, b}, {va, vb}, 1, 0.0, 0.0);
    EXPECT_EQ(achieved[0].viewpoint_id, 10);
}

TEST(Achieved, UncoveredMpIsAnError) {
    std::vector<MeasurementPoint> mps(1);
    mps[0].id = 9;
    mps[0].normal = {0, 0, 1};
    mps[0].tolerance = 1.0;
    EXPECT_THROW(achieved_uncertainties(mps, {}, {}, 2, 0.01, 0.01), CoverageFailureError);
}

TEST(PlanDocument, WriteParseRoundTrip) {
    PlanDocument doc;
    doc.strategy = "rrt";
    doc.seed = 42;
    Viewpoint vp;
    vp.id = 3;
    vp.position = {1.5, -2.25, 300.0};
    vp.axis = {0, 0, -1};
    vp.roll = 0.125;
    vp.source_voxel = 2;
    doc.viewpoints = {vp};
    VisibleSet vs;
    vs.viewpoint_id = 3;
    vs.entries = {{7, 0.1234567890123, 0.0456}};
    doc.visible = {vs};
    AchievedMp a;
    a.mp_id = 7;
    a.viewpoint_id = 3;
    a.angle = 0.1234567890123;
    a.u_sen = 0.0456;
    a.compliant = true;
    doc.achieved = {a};
    doc.t01 = 2.5;
    doc.tm0 = 2.5;
    doc.scan_time = 5.0;
    doc.total_time = 10.0;
    doc.objective = 0.095;

    const auto dir = synth::make_temp_dir("plan");
    const std::string path = (dir / "plan.txt").string();
    write_plan_document(doc, path);
    const PlanDocument parsed = parse_plan_document(path);
    EXPECT_EQ(parsed.strategy, "rrt");
    EXPECT_EQ(parsed.seed, 42u);
    ASSERT_EQ(parsed.viewpoints.size(), 1u);
    EXPECT_DOUBLE_EQ(parsed.viewpoints[0].position.y, -2.25);
    EXPECT_DOUBLE_EQ(parsed.viewpoints[0].roll, 0.125);
    ASSERT_EQ(parsed.visible[0].entries.size(), 1u);
    EXPECT_DOUBLE_EQ(parsed.visible[0].entries[0].angle, 0.1234567890123);
    ASSERT_EQ(parsed.achieved.size(), 1u);
    EXPECT_TRUE(parsed.achieved[0].compliant);
    EXPECT_DOUBLE_EQ(parsed.total_time, 10.0);
    EXPECT_DOUBLE_EQ(parsed.objective, 0.095);
}

TEST(MetricsDocument, KindRowsAndHistogram) {
    std::vector<AchievedMp> achieved;
    AchievedMp a;
    a.mp_id = 1;
    a.kind = MpKind::hole;
    a.u_sen = 0.05;
    a.compliant = true;
    achieved.push_back(a);
    a.mp_id = 2;
    a.kind = MpKind::surface;
    a.u_sen = 0.12;
    a.compliant = false;
    achieved.push_back(a);

    const PlanMetrics m = compute_metrics("baseline", 7, achieved, 3, 77.5,
                                          {0.04, 0.07, 0.10, 0.13, 0.16, 0.19});
    EXPECT_EQ(m.by_kind.at(MpKind::hole).count, 1);
    EXPECT_DOUBLE_EQ(m.by_kind.at(MpKind::hole).compliance, 1.0);
    EXPECT_DOUBLE_EQ(m.by_kind.at(MpKind::surface).compliance, 0.0);
    EXPECT_EQ(m.by_kind.at(MpKind::slot).count, 0);
    EXPECT_DOUBLE_EQ(m.overall.compliance, 0.5);
    EXPECT_EQ(m.hist.counts, (std::vector<int>{1, 0, 1, 0, 0}));

    const auto dir = synth::make_temp_dir("metrics");
    const std::string path = (dir / "metrics.txt").string();
    write_metrics_document(m, path);
    const std::string text = slurp(path);
    EXPECT_NE(text.find("scanplan-metrics 1"), std::string::npos);
    EXPECT_NE(text.find("kind hole count 1"), std::string::npos);
    EXPECT_NE(text.find("kind slot count 0 mean-u - compliance -"), std::string::npos);
    EXPECT_NE(text.find("hist [0.04,0.07) 1"), std::string::npos);
}

TEST(Heatmap, SingleColorWhenAllAtMinimum) {
    const TriangleMesh plate = synth::make_plate(100, 100, 2, 2);
    std::vector<MeasurementPoint> mps(2);
    mps[0].id = 1;
    mps[0].position = {-25, 0, 0};
    mps[1].id = 2;
    mps[1].position = {25, 0, 0};
    std::vector<AchievedMp> achieved(2);
    achieved[0].mp_id = 1;
    achieved[0].u_sen = 0.04;
    achieved[1].mp_id = 2;
    achieved[1].u_sen = 0.04;

    const auto dir = synth::make_temp_dir("heatmap");
    const std::string path = (dir / "map.ply").string();
    export_heatmap(plate, mps, achieved, {0.04, 0.07, 0.10, 0.13, 0.16, 0.19}, path);
    const std::string text = slurp(path);
    EXPECT_NE(text.find("ply"), std::string::npos);
    // Every vertex carries the minimum-ramp color 0 0 255.
    std::istringstream in(text);
    std::string line;
    bool in_body = false;
    int vertex_lines = 0;
    while (std::getline(in, line)) {
        if (line == "end_header") {
            in_body = true;
            continue;
        }
        if (in_body && vertex_lines < static_cast<int>(plate.vertices.size())) {
            EXPECT_NE(line.find(" 0 0 255"), std::string::npos) << line;
            ++vertex_lines;
        }
    }
    EXPECT_EQ(vertex_lines, static_cast<int>(plate.vertices.size()));
}

TEST(Heatmap, BinExtremesGiveTwoColorsAndVerbatimLegend) {
    const TriangleMesh plate = synth::make_plate(100, 100, 1, 1);
    std::vector<MeasurementPoint> mps(2);
    mps[0].id = 1;
    mps[0].position = {-50, -50, 0};
    mps[1].id = 2;
    mps[1].position = {50, 50, 0};
    std::vector<AchievedMp> achieved(2);
    achieved[0].mp_id = 1;
    achieved[0].u_sen = 0.04;
    achieved[1].mp_id = 2;
    achieved[1].u_sen = 0.19;

    const std::vector<double> edges = {0.04, 0.07, 0.10, 0.13, 0.16, 0.19};
    const auto dir = synth::make_temp_dir("heatmap");
    const std::string path = (dir / "map.ply").string();
    export_heatmap(plate, mps, achieved, edges, path);
    const std::string text = slurp(path);
    EXPECT_NE(text.find(" 0 0 255"), std::string::npos);    // minimum end
    EXPECT_NE(text.find(" 255 0 0"), std::string::npos);    // maximum end
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        EXPECT_NE(text.find("legend " + bin_label(edges[i], edges[i + 1])), std::string::npos);
    EXPECT_NE(text.find("legend [0.04,0.07)"), std::string::npos);
}
