#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/measurement.hpp"
#include "scanplan/mesh.hpp"
#include "scanplan/uncertainty.hpp"

namespace scanplan {

/// Optical sensor with a quadrangular-prism FOV: the truncated pyramid
/// between the near and far rectangles, centered on the optical axis at
/// depths [d - DOF/2, d + DOF/2].
struct SensorModel {
    double near_width = 90.0;   // mm
    double near_height = 60.0;  // mm
    double far_width = 160.0;   // mm, == far_fov_width
    double far_height = 90.0;   // mm
    double dof = 100.0;         // mm
    double scan_depth = 250.0;  // d, mm
    double scan_time = 5.0;     // t0, s
    double far_fov_width = 160.0;  // L, mm

    double near_plane() const { return scan_depth - dof / 2.0; }
    double far_plane() const { return scan_depth + dof / 2.0; }

    void validate() const {
        if (!(near_width < far_width) || !(near_height < far_height))
            throw ConfigError("near FOV dimensions must be smaller than far FOV dimensions");
        if (dof <= 0.0) throw ConfigError("DOF must be positive");
        if (near_plane() <= 0.0) throw ConfigError("scan depth must exceed half the DOF");
        if (far_fov_width != far_width)
            throw ConfigError("far_fov_width must equal the far FOV width exactly");
    }
};

/// Full sensor pose: position, optical-axis direction and roll about it.
struct Viewpoint {
    int id = 0;
    Vec3 position;
    Vec3 axis;        // n_l, unit, pointing from the sensor toward the scene
    double roll = 0.0;  // omega, rad
    int source_voxel = -1;

    Frame frame() const { return frame_from_axis(axis, roll); }
};

inline bool frustum_contains(const SensorModel& sensor, const Viewpoint& vp, const Vec3& p) {
    const Frame f = vp.frame();
    const Vec3 r = p - vp.position;
    const double depth = dot(r, f.axis);
    const double z_near = sensor.near_plane();
    const double z_far = sensor.far_plane();
    if (depth < z_near || depth > z_far) return false;
    const double t = (depth - z_near) / (z_far - z_near);
    const double half_w = 0.5 * (sensor.near_width + t * (sensor.far_width - sensor.near_width));
    const double half_h = 0.5 * (sensor.near_height + t * (sensor.far_height - sensor.near_height));
    return std::abs(dot(r, f.u)) <= half_w && std::abs(dot(r, f.v)) <= half_h;
}

enum class IncidenceMode {
    beam,  // direction from the MP to the sensor position (per-MP laser beam)
    axis,  // direction opposite the frustum axis
};

/// Incident angle between the beam toward the MP and the MP normal, folded
/// into [0, pi/2]: the raw arccos of the normals yields pi for a head-on
/// MP, so angles past pi/2 fold back to the physical incidence.
inline double incident_angle(const Viewpoint& vp, const MeasurementPoint& mp,
                             IncidenceMode mode = IncidenceMode::beam) {
    Vec3 dir;
    if (mode == IncidenceMode::beam) {
        dir = vp.position - mp.position;
        const double len = norm(dir);
        if (len <= 1e-12) return kPi / 2.0;  // MP at the sensor origin: worst case
        dir = dir / len;
    } else {
        dir = -vp.axis;
    }
    double ang = std::acos(std::clamp(dot(dir, mp.normal), -1.0, 1.0));
    if (ang > kPi / 2.0) ang = kPi - ang;
    return ang;
}

/// Robot-reachability oracle. The default is a proxy; a real IK can be
/// plugged in behind this interface.
class AccessibilityOracle {
public:
    virtual ~AccessibilityOracle() = default;
    virtual bool reachable(const Viewpoint& vp) const = 0;
};

/// Reachability proxy: positions inside a spherical shell around the robot
/// base, with the optical axis inside a cone.
class ShellAccessibilityOracle final : public AccessibilityOracle {
public:
    ShellAccessibilityOracle(Vec3 base, double r_min, double r_max, Vec3 cone_axis,
                             double cone_half_angle)
        : base_(base),
          r_min_(r_min),
          r_max_(r_max),
          cone_axis_(normalized(cone_axis)),
          cone_half_angle_(cone_half_angle) {
        if (r_min < 0.0 || r_max <= r_min) throw ConfigError("invalid reachability shell radii");
    }

    bool reachable(const Viewpoint& vp) const override {
        const double r = distance(vp.position, base_);
        if (r < r_min_ || r > r_max_) return false;
        return angle_between(vp.axis, cone_axis_) <= cone_half_angle_;
    }

private:
    Vec3 base_;
    double r_min_;
    double r_max_;
    Vec3 cone_axis_;
    double cone_half_angle_;
};

/// Accepts every pose; handy for synthetic instances and tests.
class PermissiveAccessibilityOracle final : public AccessibilityOracle {
public:
    bool reachable(const Viewpoint&) const override { return true; }
};

/// Sensor-body proxy for collision checking: a box in the sensor frame,
/// centered at the viewpoint position (plus an optional offset along the
/// frame axes), inflated by the clearance margin.
struct SensorBody {
    Vec3 half_extents{60.0, 60.0, 100.0};  // along (u, v, axis), mm
    Vec3 offset{0.0, 0.0, 0.0};            // in the sensor frame, mm
    double clearance = 20.0;               // mm, exclusive
};

/// Static environment the sensor must not hit: the part plus obstacles.
struct CollisionScene {
    TriangleMesh geometry;

    bool empty() const { return geometry.empty(); }
};

/// True iff the sensor body in the given frame at `position` comes closer
/// than the clearance margin to any scene triangle. Touching exactly at the
/// margin is free. The frame-based form also serves interpolated poses
/// along swept legs.
inline bool collides_in_frame(const CollisionScene& scene, const SensorBody& body,
                              const Vec3& position, const Frame& f) {
    if (scene.empty()) return false;
    const Vec3 center =
        position + f.u * body.offset.x + f.v * body.offset.y + f.axis * body.offset.z;
    const Vec3 h = body.half_extents + Vec3{body.clearance, body.clearance, body.clearance};
    const auto to_box_frame = [&](const Vec3& p) {
        const Vec3 r = p - center;
        return Vec3{dot(r, f.u), dot(r, f.v), dot(r, f.axis)};
    };
    for (std::size_t i = 0; i < scene.geometry.triangle_count(); ++i) {
        const auto tv = scene.geometry.triangle_vertices(i);
        if (triangle_box_overlap(to_box_frame(tv[0]), to_box_frame(tv[1]), to_box_frame(tv[2]), h,
                                 /*touching_counts=*/false))
            return true;
    }
    return false;
}

inline bool collides(const CollisionScene& scene, const SensorBody& body, const Viewpoint& vp) {
    return collides_in_frame(scene, body, vp.position, vp.frame());
}

/// The MPs visible under one viewpoint, with the incident angle and the
/// sensor uncertainty each was (or would be) measured with.
struct VisibleSet {
    struct Entry {
        int mp_id = 0;
        double angle = 0.0;  // rad
        double u_sen = 0.0;  // mm
    };

    int viewpoint_id = 0;
    std::vector<Entry> entries;  // sorted by mp_id

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    bool contains(int mp_id) const { return find(mp_id) != nullptr; }

    const Entry* find(int mp_id) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), mp_id,
                                   [](const Entry& e, int id) { return e.mp_id < id; });
        return (it != entries.end() && it->mp_id == mp_id) ? &*it : nullptr;
    }
};

struct VisibilityGates {
    bool apply_angle_gate = true;  // gate 4; the baseline can switch it off
    IncidenceMode incidence_mode = IncidenceMode::beam;
};

/// Absolute slack on the gate-4 comparison: poses constructed exactly on
/// the feasible-cone boundary must not be lost to rounding when their
/// incident angle is reconstructed from 3D geometry.
inline constexpr double kAngleGateTolerance = 1e-9;

/// Four-gate determination of the visible-MP set: empty if the pose
/// is unreachable or colliding, otherwise the MPs inside the frustum whose
/// incident angle stays within their feasible range.
inline VisibleSet determination_set(const Viewpoint& vp, const std::vector<MeasurementPoint>& mps,
                                    const BudgetMap& budgets, const SensorModel& sensor,
                                    const SensorUncertaintyCurve& curve,
                                    const AccessibilityOracle& oracle, const CollisionScene& scene,
                                    const SensorBody& body, const VisibilityGates& gates = {}) {
    VisibleSet vs;
    vs.viewpoint_id = vp.id;
    if (!oracle.reachable(vp)) return vs;
    if (collides(scene, body, vp)) return vs;
    for (const MeasurementPoint& mp : mps) {
        if (!frustum_contains(sensor, vp, mp.position)) continue;
        const double ang = incident_angle(vp, mp, gates.incidence_mode);
        if (gates.apply_angle_gate) {
            const auto it = budgets.find(mp.id);
            if (it == budgets.end())
                throw ConfigError("no uncertainty budget for MP " + std::to_string(mp.id));
            if (ang > it->second.alpha_p + kAngleGateTolerance) continue;
        }
        vs.entries.push_back({mp.id, ang, sensor_uncertainty_saturated(curve, ang)});
    }
    std::sort(vs.entries.begin(), vs.entries.end(),
              [](const VisibleSet::Entry& a, const VisibleSet::Entry& b) {
                  return a.mp_id < b.mp_id;
              });
    return vs;
}

}  // namespace scanplan
