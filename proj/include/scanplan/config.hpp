#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "scanplan/candidates.hpp"
#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/measurement.hpp"
#include "scanplan/rrt_sampler.hpp"
#include "scanplan/sequencer.hpp"
#include "scanplan/uncertainty.hpp"
#include "scanplan/visibility.hpp"

namespace scanplan {

/// Everything the pipeline needs, loaded from one JSON config file. Angles
/// are written in degrees in the file and converted here; internally the
/// toolkit is millimeters and radians throughout.
struct PlannerConfig {
    std::string mesh_path;
    std::string mp_path;
    std::vector<std::string> obstacle_paths;
    std::string strategy = "rrt";  // "rrt" | "baseline"
    std::uint64_t seed = 0;

    double voxel_edge = 50.0;
    double chordal_fraction = 0.05;
    double voxel_min_edge = 0.01;

    SensorModel sensor;
    std::vector<CurveKnot> curve_knots = {{deg_to_rad(0.0), 0.04},
                                          {deg_to_rad(20.0), 0.05},
                                          {deg_to_rad(40.0), 0.07},
                                          {deg_to_rad(60.0), 0.10},
                                          {deg_to_rad(75.0), 0.19}};
    int coverage_factor = 2;
    double u_mat = 0.01;
    double u_rot = 0.01;
    std::map<MpKind, double> kind_tolerances = {{MpKind::hole, 0.5},
                                                {MpKind::slot, 0.5},
                                                {MpKind::trimming, 0.7},
                                                {MpKind::surface, 1.0}};

    CandidateGrid grid;
    Vec3 base_position{0.0, 0.0, -500.0};
    double reach_min = 100.0;
    double reach_max = 1500.0;
    Vec3 cone_axis{0.0, 0.0, -1.0};
    double cone_half_angle = deg_to_rad(90.0);

    SensorBody body;
    IncidenceMode incidence_mode = IncidenceMode::beam;
    bool baseline_angle_gate = false;

    SamplerConfig sampler;
    bool sampler_spacing_set = false;   // when false, L defaults to the far-FOV width
    bool sampler_radius_set = false;    // when false, epsilon defaults to 2L
    bool use_entropy_weights = false;

    RobotMotion motion;
    double sa_cooling = 0.995;
    int sa_iterations_per_viewpoint = 200;
    int sa_restarts = 3;
    int sa_initial_temperature_samples = 100;
    DetourParams detour;

    Vec3 home_position{0.0, 0.0, 600.0};
    Vec3 home_axis{0.0, 0.0, -1.0};
    double home_roll = 0.0;

    std::vector<double> histogram_edges = {0.04, 0.07, 0.10, 0.13, 0.16, 0.19};

    SensorUncertaintyCurve curve() const { return SensorUncertaintyCurve(curve_knots); }

    Viewpoint home_viewpoint() const {
        Viewpoint vp;
        vp.id = -1;
        vp.position = home_position;
        vp.axis = normalized(home_axis);
        vp.roll = home_roll;
        return vp;
    }

    /// L defaults to the far-FOV width (successive viewpoints should not
    /// overlap their footprints) and epsilon to 2L; call after all fields
    /// are set.
    void finalize() {
        sensor.validate();
        if (!sampler_spacing_set) sampler.spacing = sensor.far_fov_width;
        if (!sampler_radius_set) sampler.neighbor_radius = 2.0 * sampler.spacing;
        if (strategy != "rrt" && strategy != "baseline")
            throw ConfigError("strategy must be 'rrt' or 'baseline', got '" + strategy + "'");
        if (histogram_edges.size() < 2)
            throw ConfigError("histogram needs at least two bin edges");
        for (std::size_t i = 0; i + 1 < histogram_edges.size(); ++i)
            if (!(histogram_edges[i] < histogram_edges[i + 1]))
                throw ConfigError("histogram bin edges must be strictly increasing");
        grid.validate();
        motion.validate();
        (void)curve();  // validates the knots
    }
};

namespace detail {

inline Vec3 vec3_from_json(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError("config key '" + key + "' must be an array of 3 numbers");
    return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

/// Parses the planner config from already-loaded JSON (exposed so CLI flag
/// overrides can be applied to the JSON before parsing).
inline PlannerConfig config_from_json(const nlohmann::json& j) {
    PlannerConfig cfg;
    try {
        if (!j.contains("mesh")) throw ConfigError("config is missing the 'mesh' key");
        if (!j.contains("mps")) throw ConfigError("config is missing the 'mps' key");
        cfg.mesh_path = j.at("mesh").get<std::string>();
        cfg.mp_path = j.at("mps").get<std::string>();
        detail::read_if(j, "obstacles", cfg.obstacle_paths);
        detail::read_if(j, "strategy", cfg.strategy);
        detail::read_if(j, "seed", cfg.seed);

        if (j.contains("voxel")) {
            const auto& v = j.at("voxel");
            detail::read_if(v, "edge_mm", cfg.voxel_edge);
            detail::read_if(v, "chordal_fraction", cfg.chordal_fraction);
            detail::read_if(v, "min_edge_mm", cfg.voxel_min_edge);
        }

        if (j.contains("sensor")) {
            const auto& s = j.at("sensor");
            detail::read_if(s, "near_fov_width_mm", cfg.sensor.near_width);
            detail::read_if(s, "near_fov_height_mm", cfg.sensor.near_height);
            detail::read_if(s, "far_fov_width_mm", cfg.sensor.far_width);
            detail::read_if(s, "far_fov_height_mm", cfg.sensor.far_height);
            detail::read_if(s, "dof_mm", cfg.sensor.dof);
            detail::read_if(s, "scan_depth_mm", cfg.sensor.scan_depth);
            detail::read_if(s, "scan_time_s", cfg.sensor.scan_time);
            cfg.sensor.far_fov_width = cfg.sensor.far_width;
            detail::read_if(s, "far_fov_width_field_mm", cfg.sensor.far_fov_width);
        }

        if (j.contains("uncertainty")) {
            const auto& u = j.at("uncertainty");
            if (u.contains("curve")) {
                cfg.curve_knots.clear();
                for (const auto& knot : u.at("curve")) {
                    if (!knot.is_array() || knot.size() != 2)
                        throw ConfigError("curve knots must be [angle_deg, u_sen_mm] pairs");
                    cfg.curve_knots.push_back(
                        {deg_to_rad(knot[0].get<double>()), knot[1].get<double>()});
                }
            }
            detail::read_if(u, "k", cfg.coverage_factor);
            detail::read_if(u, "u_mat_mm", cfg.u_mat);
            detail::read_if(u, "u_rot_mm", cfg.u_rot);
        }

        if (j.contains("tolerances")) {
            for (const auto& [key, value] : j.at("tolerances").items())
                cfg.kind_tolerances[mp_kind_from_string(key)] = value.get<double>();
        }

        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            detail::read_if(g, "incident_rings", cfg.grid.incident_rings);
            detail::read_if(g, "azimuths", cfg.grid.azimuths);
            detail::read_if(g, "depths", cfg.grid.depths);
            if (g.contains("rolls_deg")) {
                cfg.grid.rolls.clear();
                for (const auto& r : g.at("rolls_deg"))
                    cfg.grid.rolls.push_back(deg_to_rad(r.get<double>()));
            }
        }

        if (j.contains("accessibility")) {
            const auto& a = j.at("accessibility");
            if (a.contains("base_mm")) cfg.base_position = detail::vec3_from_json(a.at("base_mm"), "base_mm");
            detail::read_if(a, "r_min_mm", cfg.reach_min);
            detail::read_if(a, "r_max_mm", cfg.reach_max);
            if (a.contains("cone_axis")) cfg.cone_axis = detail::vec3_from_json(a.at("cone_axis"), "cone_axis");
            if (a.contains("cone_half_angle_deg"))
                cfg.cone_half_angle = deg_to_rad(a.at("cone_half_angle_deg").get<double>());
        }

        if (j.contains("collision")) {
            const auto& c = j.at("collision");
            if (c.contains("body_mm")) {
                const Vec3 dims = detail::vec3_from_json(c.at("body_mm"), "body_mm");
                cfg.body.half_extents = dims / 2.0;
            }
            if (c.contains("offset_mm"))
                cfg.body.offset = detail::vec3_from_json(c.at("offset_mm"), "offset_mm");
            detail::read_if(c, "clearance_mm", cfg.body.clearance);
        }

        if (j.contains("visibility")) {
            const auto& v = j.at("visibility");
            if (v.contains("incidence_mode")) {
                const std::string mode = v.at("incidence_mode").get<std::string>();
                if (mode == "beam")
                    cfg.incidence_mode = IncidenceMode::beam;
                else if (mode == "axis")
                    cfg.incidence_mode = IncidenceMode::axis;
                else
                    throw ConfigError("visibility.incidence_mode must be 'beam' or 'axis'");
            }
        }

        if (j.contains("baseline"))
            detail::read_if(j.at("baseline"), "apply_angle_gate", cfg.baseline_angle_gate);

        if (j.contains("sampler")) {
            const auto& s = j.at("sampler");
            detail::read_if(s, "beta1", cfg.sampler.beta1);
            detail::read_if(s, "gamma1", cfg.sampler.gamma1);
            detail::read_if(s, "beta2", cfg.sampler.beta2);
            detail::read_if(s, "gamma2", cfg.sampler.gamma2);
            if (s.contains("spacing_L_mm")) {
                cfg.sampler.spacing = s.at("spacing_L_mm").get<double>();
                cfg.sampler_spacing_set = true;
            }
            if (s.contains("neighbor_eps_mm")) {
                cfg.sampler.neighbor_radius = s.at("neighbor_eps_mm").get<double>();
                cfg.sampler_radius_set = true;
            }
            detail::read_if(s, "i_max", cfg.sampler.max_iterations);
            detail::read_if(s, "refresh_nearest_before_extend",
                            cfg.sampler.refresh_nearest_before_extend);
            detail::read_if(s, "entropy_weights", cfg.use_entropy_weights);
        }
        cfg.sampler.seed = cfg.seed;

        if (j.contains("robot")) {
            const auto& r = j.at("robot");
            detail::read_if(r, "v_lin_mm_s", cfg.motion.v_lin);
            if (r.contains("v_ang_deg_s"))
                cfg.motion.v_ang = deg_to_rad(r.at("v_ang_deg_s").get<double>());
        }

        if (j.contains("tsp")) {
            const auto& t = j.at("tsp");
            detail::read_if(t, "cooling", cfg.sa_cooling);
            detail::read_if(t, "iters_per_vp", cfg.sa_iterations_per_viewpoint);
            detail::read_if(t, "restarts", cfg.sa_restarts);
            detail::read_if(t, "init_temp_samples", cfg.sa_initial_temperature_samples);
        }

        if (j.contains("detour")) {
            const auto& d = j.at("detour");
            detail::read_if(d, "max_iters", cfg.detour.max_iterations);
            detail::read_if(d, "step_mm", cfg.detour.step);
            detail::read_if(d, "goal_bias", cfg.detour.goal_bias);
            detail::read_if(d, "sweep_step_mm", cfg.detour.sweep_step);
        }

        if (j.contains("home")) {
            const auto& h = j.at("home");
            if (h.contains("position_mm"))
                cfg.home_position = detail::vec3_from_json(h.at("position_mm"), "position_mm");
            if (h.contains("axis")) cfg.home_axis = detail::vec3_from_json(h.at("axis"), "axis");
            if (h.contains("roll_deg")) cfg.home_roll = deg_to_rad(h.at("roll_deg").get<double>());
        }

        detail::read_if(j, "bins", cfg.histogram_edges);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.finalize();
    return cfg;
}

inline nlohmann::json load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/true,
                                     /*ignore_comments=*/true);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

inline PlannerConfig load_config(const std::string& path) {
    return config_from_json(load_config_json(path));
}

/// Applies `--set key.path=value` style overrides onto the raw JSON. Values
/// parse as JSON when possible and fall back to strings.
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
        parsed = value;
    }

    nlohmann::json* node = &j;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("empty key in override: " + assignment);
        if (dot == std::string::npos) {
            (*node)[key] = parsed;
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

}  // namespace scanplan
