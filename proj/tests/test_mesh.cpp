#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "scanplan/mesh.hpp"
#include "support/synthetic.hpp"

using namespace scanplan;

namespace {

std::string write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path.string();
}

}  // namespace

TEST(LoadMesh, UnitSquarePlaneAsciiStl) {
    const auto dir = synth::make_temp_dir("mesh");
    const std::string path = write_file(dir / "square.stl",
                                        "solid square\n"
                                        "facet normal 0 0 1\n outer loop\n"
                                        "  vertex 0 0 0\n  vertex 1 0 0\n  vertex 1 1 0\n"
                                        " endloop\nendfacet\n"
                                        "facet normal 0 0 1\n outer loop\n"
                                        "  vertex 0 0 0\n  vertex 1 1 0\n  vertex 0 1 0\n"
                                        " endloop\nendfacet\n"
                                        "endsolid square\n");
    const TriangleMesh mesh = load_mesh(path);
    ASSERT_EQ(mesh.triangle_count(), 2u);
    for (const Vec3& n : mesh.normals) {
        EXPECT_NEAR(n.x, 0.0, 1e-12);
        EXPECT_NEAR(n.y, 0.0, 1e-12);
        EXPECT_NEAR(n.z, 1.0, 1e-12);
    }
}

TEST(LoadMesh, ZeroAreaTriangleRejectedWithIndex) {
    const auto dir = synth::make_temp_dir("mesh");
    const std::string path = write_file(dir / "degenerate.stl",
                                        "solid bad\n"
                                        "facet normal 0 0 1\n outer loop\n"
                                        "  vertex 0 0 0\n  vertex 1 0 0\n  vertex 0 1 0\n"
                                        " endloop\nendfacet\n"
                                        "facet normal 0 0 1\n outer loop\n"
                                        "  vertex 0 0 0\n  vertex 1 1 1\n  vertex 2 2 2\n"
                                        " endloop\nendfacet\n"
                                        "endsolid bad\n");
    try {
        load_mesh(path);
        FAIL() << "expected GeometryError";
    } catch (const GeometryError& e) {
        EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos) << e.what();
    }
}

TEST(LoadMesh, CubeObjHasTwelveTrianglesSixDirections) {
    const auto dir = synth::make_temp_dir("mesh");
    // Unit cube as an OBJ with quad faces (triangulated on load).
    const std::string path = write_file(dir / "cube.obj",
                                        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                                        "v 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n"
                                        "f 1 4 3 2\n"   // bottom, -z
                                        "f 5 6 7 8\n"   // top, +z
                                        "f 1 2 6 5\n"   // front, -y
                                        "f 2 3 7 6\n"   // right, +x
                                        "f 3 4 8 7\n"   // back, +y
                                        "f 4 1 5 8\n"); // left, -x
    const TriangleMesh mesh = load_mesh(path);
    ASSERT_EQ(mesh.triangle_count(), 12u);
    std::set<std::array<int, 3>> directions;
    for (const Vec3& n : mesh.normals) {
        EXPECT_NEAR(norm(n), 1.0, 1e-9);
        directions.insert({static_cast<int>(std::lround(n.x)), static_cast<int>(std::lround(n.y)),
                           static_cast<int>(std::lround(n.z))});
    }
    EXPECT_EQ(directions.size(), 6u);
}

TEST(LoadMesh, BinaryStlRoundTrip) {
    const auto dir = synth::make_temp_dir("mesh");
    const std::string path = (dir / "plate.stl").string();
    // Minimal binary STL: one triangle.
    std::ofstream out(path, std::ios::binary);
    char header[80] = {};
    out.write(header, 80);
    const std::uint32_t count = 1;
    out.write(reinterpret_cast<const char*>(&count), 4);
    const float tri[12] = {0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 0};
    out.write(reinterpret_cast<const char*>(tri), sizeof(tri));
    const std::uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), 2);
    out.close();

    const TriangleMesh mesh = load_mesh(path);
    ASSERT_EQ(mesh.triangle_count(), 1u);
    EXPECT_NEAR(mesh.normals[0].z, 1.0, 1e-6);
}

TEST(LoadMesh, MissingFileIsConfigError) {
    EXPECT_THROW(load_mesh("/definitely/not/here.stl"), ConfigError);
    EXPECT_THROW(load_mesh("/definitely/not/here.step"), ConfigError);
}

TEST(Mesh, EmptyMeshRejected) {
    TriangleMesh empty;
    EXPECT_THROW(empty.validate_and_finalize(), GeometryError);
}

TEST(Mesh, ClosestSurfacePointAndDistance) {
    const TriangleMesh plate = synth::make_plate(100, 100, 2, 2);
    EXPECT_NEAR(plate.distance_to_surface({10, 10, 25}), 25.0, 1e-12);
    const Vec3 on = plate.closest_surface_point({10, 10, 25});
    EXPECT_NEAR(on.z, 0.0, 1e-12);
}

TEST(Mesh, StlWriterRoundTrips) {
    const TriangleMesh plate = synth::make_plate(50, 50, 1, 1);
    const auto dir = synth::make_temp_dir("mesh");
    const std::string path = (dir / "plate.stl").string();
    write_stl_ascii(plate, path);
    const TriangleMesh loaded = load_mesh(path);
    EXPECT_EQ(loaded.triangle_count(), plate.triangle_count());
}
