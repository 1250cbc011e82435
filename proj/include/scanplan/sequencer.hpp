#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/visibility.hpp"

namespace scanplan {

/// Constant-speed motion model; a leg takes the slower of its translation
/// and rotation (synchronized move).
struct RobotMotion {
    double v_lin = 100.0;                 // mm/s
    double v_ang = deg_to_rad(60.0);      // rad/s

    void validate() const {
        if (v_lin <= 0.0 || v_ang <= 0.0) throw ConfigError("robot speeds must be positive");
    }
};

struct DetourParams {
    int max_iterations = 5000;
    double step = 50.0;        // mm, tree extension step
    double goal_bias = 0.1;
    double sweep_step = 10.0;  // mm, discretization of swept-box checks
};

namespace detail {

/// Discrete sweep of the sensor box along p->q with the orientation
/// interpolated between the two endpoint frames.
inline bool segment_free(const CollisionScene& scene, const SensorBody& body, const Vec3& p,
                         const Vec3& q, const Frame& fa, const Frame& fb, double sweep_step) {
    const double len = distance(p, q);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / std::max(sweep_step, 1e-6))));
    for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        const Vec3 pos = p + (q - p) * t;
        if (collides_in_frame(scene, body, pos, interpolate_frames(fa, fb, t))) return false;
    }
    return true;
}

}  // namespace detail

/// Goal-biased incremental sampling in position space; returns the waypoint
/// polyline including both endpoints, after a deterministic shortcut pass.
inline std::optional<std::vector<Vec3>> plan_detour(const Vec3& start, const Vec3& goal,
                                                    const CollisionScene& scene,
                                                    const SensorBody& body, const Frame& fa,
                                                    const Frame& fb, const DetourParams& params,
                                                    std::uint64_t seed) {
    Aabb bounds;
    bounds.extend(start);
    bounds.extend(goal);
    if (!scene.empty()) {
        const Aabb scene_box = scene.geometry.bounding_box();
        bounds.extend(scene_box.min);
        bounds.extend(scene_box.max);
    }
    const double inflate =
        norm(body.half_extents) + body.clearance + params.step;
    bounds.min = bounds.min - Vec3{inflate, inflate, inflate};
    bounds.max = bounds.max + Vec3{inflate, inflate, inflate};

    std::mt19937_64 rng(seed);
    const auto rand01 = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
    const auto sample = [&] {
        return Vec3{bounds.min.x + rand01() * (bounds.max.x - bounds.min.x),
                    bounds.min.y + rand01() * (bounds.max.y - bounds.min.y),
                    bounds.min.z + rand01() * (bounds.max.z - bounds.min.z)};
    };

    std::vector<Vec3> nodes{start};
    std::vector<int> parent{-1};
    int goal_node = -1;
    for (int it = 0; it < params.max_iterations && goal_node == -1; ++it) {
        const Vec3 target = rand01() < params.goal_bias ? goal : sample();
        int nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double d = norm_sq(nodes[i] - target);
            if (d < best) {
                best = d;
                nearest = static_cast<int>(i);
            }
        }
        const Vec3 from = nodes[nearest];
        const double d = distance(from, target);
        const Vec3 next = d <= params.step ? target : from + (target - from) * (params.step / d);
        if (!detail::segment_free(scene, body, from, next, fa, fb, params.sweep_step)) continue;
        nodes.push_back(next);
        parent.push_back(nearest);
        if (distance(next, goal) <= params.step &&
            detail::segment_free(scene, body, next, goal, fa, fb, params.sweep_step)) {
            nodes.push_back(goal);
            parent.push_back(static_cast<int>(nodes.size()) - 2);
            goal_node = static_cast<int>(nodes.size()) - 1;
        }
    }
    if (goal_node == -1) return std::nullopt;

    std::vector<Vec3> path;
    for (int i = goal_node; i != -1; i = parent[i]) path.push_back(nodes[i]);
    std::reverse(path.begin(), path.end());

    // String-pulling shortcut: greedily connect each kept waypoint to the
    // farthest reachable one.
    std::vector<Vec3> shortcut{path.front()};
    std::size_t i = 0;
    while (i + 1 < path.size()) {
        std::size_t j = path.size() - 1;
        for (; j > i + 1; --j)
            if (detail::segment_free(scene, body, path[i], path[j], fa, fb, params.sweep_step))
                break;
        shortcut.push_back(path[j]);
        i = j;
    }
    return shortcut;
}

/// Collision-free travel time between two viewpoints: the straight swept
/// segment when free, otherwise a seeded sampling-based detour. The leg
/// takes max(translation, rotation) time.
inline double local_path_time(const Viewpoint& a, const Viewpoint& b, const CollisionScene& scene,
                              const SensorBody& body, const RobotMotion& motion,
                              const DetourParams& params, std::uint64_t seed) {
    motion.validate();
    const Frame fa = a.frame();
    const Frame fb = b.frame();
    const double rotation = frame_rotation_angle(fa, fb);
    double path_length = distance(a.position, b.position);
    if (!detail::segment_free(scene, body, a.position, b.position, fa, fb, params.sweep_step)) {
        const auto detour = plan_detour(a.position, b.position, scene, body, fa, fb, params, seed);
        if (!detour)
            throw UnreachablePairError("no collision-free path between viewpoints " +
                                       std::to_string(a.id) + " and " + std::to_string(b.id));
        path_length = 0.0;
        for (std::size_t i = 0; i + 1 < detour->size(); ++i)
            path_length += distance((*detour)[i], (*detour)[i + 1]);
    }
    return std::max(path_length / motion.v_lin, rotation / motion.v_ang);
}

/// Symmetric m x m travel-time matrix with +inf diagonal, plus the
/// home-to-viewpoint legs and the per-viewpoint scan time t0.
struct TimeMatrix {
    int size = 0;
    std::vector<double> times;      // row-major, diagonal +inf
    std::vector<double> home_legs;  // home <-> viewpoint i
    double scan_time = 0.0;         // t0

    double at(int i, int j) const { return times[static_cast<std::size_t>(i) * size + j]; }
    double& at(int i, int j) { return times[static_cast<std::size_t>(i) * size + j]; }
};

inline std::uint64_t pair_seed(std::uint64_t seed, int i, int j) {
    // Splitmix-style mixing keeps per-pair detours independent of the order
    // in which the matrix is filled.
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + (static_cast<std::uint64_t>(i + 1) << 32) +
                              static_cast<std::uint64_t>(j + 1));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline TimeMatrix build_time_matrix(const std::vector<Viewpoint>& viewpoints,
                                    const Viewpoint& home, const CollisionScene& scene,
                                    const SensorBody& body, const RobotMotion& motion,
                                    double scan_time, const DetourParams& params,
                                    std::uint64_t seed) {
    const int m = static_cast<int>(viewpoints.size());
    if (m < 1) throw ConfigError("time matrix needs at least one viewpoint");
    TimeMatrix matrix;
    matrix.size = m;
    matrix.scan_time = scan_time;
    matrix.times.assign(static_cast<std::size_t>(m) * m,
                        std::numeric_limits<double>::infinity());
    matrix.home_legs.resize(m);
    for (int i = 0; i < m; ++i) {
        matrix.home_legs[i] = local_path_time(home, viewpoints[i], scene, body, motion, params,
                                              pair_seed(seed, -1, i));
        for (int j = i + 1; j < m; ++j) {
            const double t = local_path_time(viewpoints[i], viewpoints[j], scene, body, motion,
                                             params, pair_seed(seed, i, j));
            matrix.at(i, j) = t;
            matrix.at(j, i) = t;
        }
    }
    return matrix;
}

/// Ordered visiting sequence; the total sums inter-viewpoint legs,
/// both home legs and m scans.
struct Tour {
    std::vector<int> order;  // indices into the viewpoint list, each exactly once
    double total_time = 0.0;
    double t01 = 0.0;  // home -> first
    double tm0 = 0.0;  // last -> home
};

inline double tour_total(const TimeMatrix& matrix, const std::vector<int>& order) {
    double total = matrix.home_legs[order.front()] + matrix.home_legs[order.back()] +
                   matrix.scan_time * static_cast<double>(order.size());
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
        total += matrix.at(order[i], order[i + 1]);
    return total;
}

struct SaParams {
    double cooling = 0.995;
    int iterations_per_viewpoint = 200;
    int restarts = 3;
    int initial_temperature_samples = 100;
    /// Test hook: called with every accepted tour and its total.
    std::function<void(const std::vector<int>&, double)> iterate_observer;
};

/// Simulated annealing over visiting orders with segment-reversal (2-opt)
/// and relocation moves, geometric cooling and restarts. Deterministic
/// under the seed.
inline Tour solve_tsp_sa(const TimeMatrix& matrix, const SaParams& params, std::uint64_t seed) {
    const int m = matrix.size;
    if (m < 1) throw ConfigError("cannot sequence an empty viewpoint set");

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    Tour best;
    best.order = order;
    best.total_time = tour_total(matrix, order);

    if (m > 1) {
        std::mt19937_64 rng(seed);
        const auto rand01 = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
        const auto rand_index = [&rng, m] { return static_cast<int>(rng() % m); };

        double spread = 0.0;
        {
            double sum = 0.0, sum_sq = 0.0;
            std::vector<int> probe = order;
            const int samples = std::max(2, params.initial_temperature_samples);
            for (int s = 0; s < samples; ++s) {
                std::shuffle(probe.begin(), probe.end(), rng);
                const double t = tour_total(matrix, probe);
                sum += t;
                sum_sq += t * t;
            }
            const double mean = sum / samples;
            spread = std::sqrt(std::max(sum_sq / samples - mean * mean, 0.0));
        }
        const double initial_temperature = std::max(spread, 1e-9);

        const int iterations = params.iterations_per_viewpoint * m;
        for (int restart = 0; restart < std::max(1, params.restarts); ++restart) {
            std::vector<int> current = order;
            std::shuffle(current.begin(), current.end(), rng);
            double current_total = tour_total(matrix, current);
            if (current_total < best.total_time) {
                best.order = current;
                best.total_time = current_total;
            }
            double temperature = initial_temperature;
            for (int it = 0; it < iterations; ++it) {
                std::vector<int> trial = current;
                int i = rand_index();
                int j = rand_index();
                while (j == i) j = rand_index();
                if (rng() % 2 == 0) {
                    if (i > j) std::swap(i, j);
                    std::reverse(trial.begin() + i, trial.begin() + j + 1);
                } else {
                    const int city = trial[i];
                    trial.erase(trial.begin() + i);
                    trial.insert(trial.begin() + j, city);
                }
                const double trial_total = tour_total(matrix, trial);
                const double delta = trial_total - current_total;
                if (delta <= 0.0 ||
                    rand01() < std::exp(-delta / std::max(temperature, 1e-12))) {
                    current = std::move(trial);
                    current_total = trial_total;
                    if (params.iterate_observer) params.iterate_observer(current, current_total);
                    if (current_total < best.total_time) {
                        best.order = current;
                        best.total_time = current_total;
                    }
                }
                temperature *= params.cooling;
            }
        }
    }

    best.t01 = matrix.home_legs[best.order.front()];
    best.tm0 = matrix.home_legs[best.order.back()];
    return best;
}

}  // namespace scanplan
