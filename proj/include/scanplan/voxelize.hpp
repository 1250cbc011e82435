#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/measurement.hpp"
#include "scanplan/mesh.hpp"

namespace scanplan {

namespace detail {

struct Cell {
    Vec3 min;
    double edge;
    std::vector<int> mp_indices;  // indices into the input MP list
    Vec3 center() const { return min + Vec3{edge / 2.0, edge / 2.0, edge / 2.0}; }
};

/// Octree-style halving until each leaf holds one MP. The floor guards
/// against coincident MPs that can never separate.
inline void split_cell(const Cell& cell, const std::vector<MeasurementPoint>& mps,
                       double min_edge, std::vector<Cell>& leaves) {
    if (cell.mp_indices.size() <= 1) {
        if (!cell.mp_indices.empty()) leaves.push_back(cell);
        return;
    }
    const double half = cell.edge / 2.0;
    if (half < min_edge) {
        std::string ids;
        for (int i : cell.mp_indices) ids += (ids.empty() ? "" : ", ") + std::to_string(mps[i].id);
        throw GeometryError("voxel subdivision floor reached; MPs {" + ids +
                            "} cannot be separated into distinct voxels");
    }
    Cell children[8];
    for (int c = 0; c < 8; ++c) {
        children[c].min = cell.min + Vec3{(c & 1) ? half : 0.0, (c & 2) ? half : 0.0,
                                          (c & 4) ? half : 0.0};
        children[c].edge = half;
    }
    const Vec3 mid = cell.min + Vec3{half, half, half};
    for (int i : cell.mp_indices) {
        const Vec3& p = mps[i].position;
        const int c = (p.x >= mid.x ? 1 : 0) | (p.y >= mid.y ? 2 : 0) | (p.z >= mid.z ? 4 : 0);
        children[c].mp_indices.push_back(i);
    }
    for (const Cell& child : children) split_cell(child, mps, min_edge, leaves);
}

}  // namespace detail

/// Voxelizes the part surface around its MPs. Cells are anchored at the
/// mesh bounding-box minimum with the given edge length; cells holding more
/// than one MP are halved recursively until each leaf holds exactly one.
/// The voxel center is the leaf-cell center projected onto the nearest
/// triangle; the voxel normal is the area-weighted mean of the triangle
/// normals overlapping the leaf cell, renormalized.
inline std::vector<Voxel> voxelize(const TriangleMesh& mesh,
                                   const std::vector<MeasurementPoint>& mps, double edge,
                                   double far_fov_width, double chordal_fraction = 0.05,
                                   double min_edge = 0.01) {
    if (edge <= 0.0) throw GeometryError("voxel edge must be positive");
    if (!(edge < 0.5 * far_fov_width))
        throw GeometryError("voxel edge " + std::to_string(edge) +
                            " mm must be less than 50% of the far-FOV width (" +
                            std::to_string(0.5 * far_fov_width) + " mm)");
    if (mps.empty()) throw ConfigError("no measurement points to voxelize");

    const double chordal_tol = chordal_fraction * edge;
    for (const MeasurementPoint& mp : mps) {
        const double d = mesh.distance_to_surface(mp.position);
        if (d > chordal_tol)
            throw GeometryError("MP " + std::to_string(mp.id) + " lies " + std::to_string(d) +
                                " mm off the surface (chordal tolerance " +
                                std::to_string(chordal_tol) + " mm)");
    }

    // Root grid assignment.
    const Aabb box = mesh.bounding_box();
    std::map<std::array<int, 3>, detail::Cell> root_cells;
    for (std::size_t i = 0; i < mps.size(); ++i) {
        const Vec3 rel = mps[i].position - box.min;
        std::array<int, 3> key{static_cast<int>(std::floor(rel.x / edge)),
                               static_cast<int>(std::floor(rel.y / edge)),
                               static_cast<int>(std::floor(rel.z / edge))};
        auto [it, fresh] = root_cells.try_emplace(key);
        if (fresh) {
            it->second.min = box.min + Vec3{key[0] * edge, key[1] * edge, key[2] * edge};
            it->second.edge = edge;
        }
        it->second.mp_indices.push_back(static_cast<int>(i));
    }

    std::vector<detail::Cell> leaves;
    for (const auto& [key, cell] : root_cells) detail::split_cell(cell, mps, min_edge, leaves);

    std::vector<Voxel> voxels;
    voxels.reserve(leaves.size());
    for (const detail::Cell& leaf : leaves) {
        const MeasurementPoint& mp = mps[leaf.mp_indices.front()];
        Voxel vox;
        vox.mp_id = mp.id;
        vox.edge = leaf.edge;

        const Vec3 cell_center = leaf.center();
        const Vec3 h{leaf.edge / 2.0, leaf.edge / 2.0, leaf.edge / 2.0};
        Vec3 normal_sum{0, 0, 0};
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
            const auto tv = mesh.triangle_vertices(t);
            if (triangle_box_overlap(tv[0] - cell_center, tv[1] - cell_center,
                                     tv[2] - cell_center, h)) {
                const double area = 0.5 * norm(cross(tv[1] - tv[0], tv[2] - tv[0]));
                normal_sum += mesh.normals[t] * area;
            }
        }
        std::size_t nearest_tri = 0;
        vox.center = mesh.closest_surface_point(cell_center, &nearest_tri);
        vox.normal = norm(normal_sum) > 1e-12 ? normalized(normal_sum) : mesh.normals[nearest_tri];

        // Chordal deviation of the on-surface voxel center from the MP's
        // tangent plane.
        const double chordal = std::abs(dot(vox.center - mp.position, mp.normal));
        if (chordal > chordal_tol)
            throw GeometryError("voxel for MP " + std::to_string(mp.id) + " deviates " +
                                std::to_string(chordal) + " mm from the MP tangent plane " +
                                "(chordal tolerance " + std::to_string(chordal_tol) + " mm)");
        voxels.push_back(vox);
    }

    std::sort(voxels.begin(), voxels.end(),
              [](const Voxel& a, const Voxel& b) { return a.mp_id < b.mp_id; });
    for (std::size_t i = 0; i < voxels.size(); ++i) voxels[i].id = static_cast<int>(i);
    return voxels;
}

}  // namespace scanplan
