#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/measurement.hpp"
#include "scanplan/uncertainty.hpp"
#include "scanplan/visibility.hpp"

namespace scanplan {

/// Per-voxel sampling resolution for the initial candidate set: incident
/// rings within [0, alpha_p], azimuths around the voxel normal, depths
/// within the DOF, and roll angles from the accessibility range.
struct CandidateGrid {
    int incident_rings = 3;
    int azimuths = 8;
    int depths = 1;  // 1 = nominal scan depth only
    std::vector<double> rolls = {0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};  // rad

    void validate() const {
        if (incident_rings < 1 || azimuths < 1 || depths < 1 || rolls.empty())
            throw ConfigError("candidate grid resolutions must be at least 1");
    }
};

/// A candidate viewpoint with its visible-MP set computed once and cached.
struct Candidate {
    Viewpoint vp;
    VisibleSet visible;
};

/// Generates the initial feasible candidate set T: for every voxel, poses on
/// the feasible incident-angle cone at the sampled depths and rolls, aimed
/// at the voxel center. Candidates that fail accessibility or collision, or
/// that cannot see their own voxel's MP, are dropped. A voxel left with no
/// candidate makes full coverage impossible and raises an error.
inline std::vector<Candidate> generate_candidates(
    const std::vector<Voxel>& voxels, const BudgetMap& budgets,
    const std::vector<MeasurementPoint>& mps, const SensorModel& sensor,
    const SensorUncertaintyCurve& curve, const CandidateGrid& grid,
    const AccessibilityOracle& oracle, const CollisionScene& scene, const SensorBody& body,
    const VisibilityGates& gates = {}) {
    grid.validate();
    std::vector<Candidate> out;
    std::vector<int> uncoverable;
    int next_id = 0;

    for (const Voxel& vox : voxels) {
        const auto bit = budgets.find(vox.mp_id);
        if (bit == budgets.end())
            throw ConfigError("no uncertainty budget for MP " + std::to_string(vox.mp_id));
        const double alpha_p = bit->second.alpha_p;
        const Frame tangent = frame_from_axis(vox.normal);

        // Midpoints of `depths` equal slices of the DOF; one slice lands on
        // the nominal scan depth and none sits on a frustum boundary.
        std::vector<double> depths;
        for (int i = 0; i < grid.depths; ++i)
            depths.push_back(sensor.near_plane() +
                             sensor.dof * (i + 0.5) / static_cast<double>(grid.depths));

        bool any_survived = false;
        for (int ring = 0; ring < grid.incident_rings; ++ring) {
            const double alpha =
                grid.incident_rings == 1
                    ? 0.0
                    : alpha_p * ring / static_cast<double>(grid.incident_rings - 1);
            // The azimuth is degenerate at normal incidence: one sample.
            const int azimuth_count = alpha == 0.0 ? 1 : grid.azimuths;
            for (int az = 0; az < azimuth_count; ++az) {
                const double phi = 2.0 * kPi * az / grid.azimuths;
                const Vec3 dir = vox.normal * std::cos(alpha) +
                                 (tangent.u * std::cos(phi) + tangent.v * std::sin(phi)) *
                                     std::sin(alpha);
                for (double depth : depths) {
                    for (double roll : grid.rolls) {
                        Viewpoint vp;
                        vp.id = next_id;
                        vp.position = vox.center + dir * depth;
                        vp.axis = -dir;
                        vp.roll = roll;
                        vp.source_voxel = vox.id;
                        // determination_set is empty when gates 1-2 fail, so
                        // the own-MP test also drops unreachable/colliding poses.
                        VisibleSet vis = determination_set(vp, mps, budgets, sensor, curve,
                                                           oracle, scene, body, gates);
                        if (!vis.contains(vox.mp_id)) continue;
                        ++next_id;
                        any_survived = true;
                        out.push_back({vp, std::move(vis)});
                    }
                }
            }
        }
        if (!any_survived) uncoverable.push_back(vox.id);
    }

    if (!uncoverable.empty()) {
        std::string ids;
        for (int id : uncoverable) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
        throw CoverageFailureError("no feasible candidate viewpoint for voxel(s) {" + ids +
                                   "}; full coverage is impossible");
    }
    return out;
}

struct VisibleSetCache {
    std::unordered_map<int, const VisibleSet*> by_viewpoint;  // viewpoint id -> set
    std::set<int> covered_union;                              // all MP ids seen by T
};

/// Indexes the cached visible sets by viewpoint id and verifies the
/// full-coverage precondition: the union over all candidates must cover
/// every MP.
inline VisibleSetCache cache_visible_sets(const std::vector<Candidate>& candidates,
                                          const std::vector<MeasurementPoint>& mps) {
    if (candidates.empty()) throw CoverageFailureError("empty candidate set");
    VisibleSetCache cache;
    for (const Candidate& c : candidates) {
        cache.by_viewpoint.emplace(c.vp.id, &c.visible);
        for (const VisibleSet::Entry& e : c.visible.entries) cache.covered_union.insert(e.mp_id);
    }
    std::string missing;
    for (const MeasurementPoint& mp : mps)
        if (!cache.covered_union.count(mp.id))
            missing += (missing.empty() ? "" : ", ") + std::to_string(mp.id);
    if (!missing.empty())
        throw CoverageFailureError("candidate set cannot cover MP(s) {" + missing + "}");
    return cache;
}

}  // namespace scanplan
