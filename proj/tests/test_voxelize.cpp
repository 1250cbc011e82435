#include <gtest/gtest.h>

#include <set>

#include "scanplan/voxelize.hpp"
#include "support/synthetic.hpp"

using namespace scanplan;

namespace {

MeasurementPoint mp_at(int id, double x, double y, double z = 0.0) {
    MeasurementPoint mp;
    mp.id = id;
    mp.position = {x, y, z};
    mp.normal = {0, 0, 1};
    mp.kind = MpKind::surface;
    mp.tolerance = 1.0;
    return mp;
}

}  // namespace

TEST(Voxelize, FlatPlateQuadrants) {
    const TriangleMesh plate = synth::make_plate(100, 100, 2, 2);
    const std::vector<MeasurementPoint> mps = {mp_at(1, -25, -25), mp_at(2, 25, -25),
                                               mp_at(3, -25, 25), mp_at(4, 25, 25)};
    const std::vector<Voxel> voxels = voxelize(plate, mps, 50.0, 160.0);
    ASSERT_EQ(voxels.size(), 4u);
    std::set<int> mp_ids;
    for (const Voxel& v : voxels) {
        mp_ids.insert(v.mp_id);
        EXPECT_NEAR(v.normal.z, 1.0, 1e-9);
        EXPECT_NEAR(norm(v.normal), 1.0, 1e-9);
        EXPECT_NEAR(plate.distance_to_surface(v.center), 0.0, 1e-9);
    }
    EXPECT_EQ(mp_ids.size(), 4u);
}

TEST(Voxelize, EdgeTooLargeForFarFov) {
    const TriangleMesh plate = synth::make_plate(100, 100, 2, 2);
    const std::vector<MeasurementPoint> mps = {mp_at(1, 0, 0)};
    // 0.5 * 160 = 80, so 90 must be rejected.
    EXPECT_THROW(voxelize(plate, mps, 90.0, 160.0), GeometryError);
    EXPECT_NO_THROW(voxelize(plate, mps, 79.0, 160.0));
}

TEST(Voxelize, CloseMpsSeparatedBySubdivision) {
    const TriangleMesh plate = synth::make_plate(100, 100, 2, 2);
    const std::vector<MeasurementPoint> mps = {mp_at(1, 0, 0), mp_at(2, 1, 0)};
    const std::vector<Voxel> voxels = voxelize(plate, mps, 50.0, 160.0);
    ASSERT_EQ(voxels.size(), 2u);
    EXPECT_NE(voxels[0].mp_id, voxels[1].mp_id);
    EXPECT_LT(voxels[0].edge, 50.0);  // subdivision happened
}

TEST(Voxelize, CoincidentMpsHitSubdivisionFloor) {
    const TriangleMesh plate = synth::make_plate(100, 100, 2, 2);
    const std::vector<MeasurementPoint> mps = {mp_at(1, 10, 10), mp_at(2, 10, 10)};
    try {
        voxelize(plate, mps, 50.0, 160.0);
        FAIL() << "expected GeometryError";
    } catch (const GeometryError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("floor"), std::string::npos);
        EXPECT_NE(msg.find("1"), std::string::npos);
        EXPECT_NE(msg.find("2"), std::string::npos);
    }
}

TEST(Voxelize, MpOffSurfaceRejected) {
    const TriangleMesh plate = synth::make_plate(100, 100, 2, 2);
    const std::vector<MeasurementPoint> mps = {mp_at(1, 0, 0, 30.0)};
    EXPECT_THROW(voxelize(plate, mps, 50.0, 160.0), GeometryError);
}

TEST(Voxelize, PartitionPropertyOnCurvedPart) {
    const TriangleMesh part = synth::make_heightfield(120, 120, 8.0, 10, 10);
    std::vector<MeasurementPoint> mps;
    int id = 0;
    for (double x : {-40.0, -15.0, 10.0, 35.0})
        for (double y : {-35.0, -5.0, 30.0})
            mps.push_back(synth::surface_mp(part, ++id, x, y, MpKind::surface, 1.0));
    const std::vector<Voxel> voxels = voxelize(part, mps, 20.0, 160.0);
    ASSERT_EQ(voxels.size(), mps.size());
    std::set<int> seen;
    for (const Voxel& v : voxels) {
        EXPECT_TRUE(seen.insert(v.mp_id).second) << "MP in two voxels";
        EXPECT_NEAR(norm(v.normal), 1.0, 1e-9);
        EXPECT_NEAR(part.distance_to_surface(v.center), 0.0, 1e-9);
    }
    // Voxel ids are assigned in MP-id order.
    for (std::size_t i = 0; i + 1 < voxels.size(); ++i)
        EXPECT_LT(voxels[i].mp_id, voxels[i + 1].mp_id);
}
