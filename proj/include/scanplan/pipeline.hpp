#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scanplan/baseline.hpp"
#include "scanplan/candidates.hpp"
#include "scanplan/config.hpp"
#include "scanplan/errors.hpp"
#include "scanplan/measurement.hpp"
#include "scanplan/mesh.hpp"
#include "scanplan/report.hpp"
#include "scanplan/rrt_sampler.hpp"
#include "scanplan/sequencer.hpp"
#include "scanplan/uncertainty.hpp"
#include "scanplan/visibility.hpp"
#include "scanplan/voxelize.hpp"

namespace scanplan {

/// Module errors surface through the pipeline prefixed with the stage that
/// raised them, keeping their exit code.
class StageError : public Error {
public:
    StageError(const std::string& stage, const Error& cause)
        : Error("[" + stage + "] " + cause.what(), cause.exit_code()) {}
};

namespace detail {

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

}  // namespace detail

/// Everything produced by one strategy run, kept around for reporting and
/// comparison.
struct StrategyOutcome {
    std::string strategy;
    TriangleMesh mesh;
    std::vector<MeasurementPoint> mps;
    std::vector<Viewpoint> plan_viewpoints;  // visiting order
    std::vector<VisibleSet> plan_sets;       // aligned with plan_viewpoints
    Tour tour;
    TimeMatrix matrix;
    PlanMetrics metrics;
    std::optional<PlanResult> rrt;  // set for the rrt strategy
    PlanDocument document;
};

/// Loads inputs, derives budgets, voxelizes, generates candidates, selects
/// viewpoints with the requested strategy, sequences them and assembles the
/// metrics. Pure given the config; identical config + seed reproduce the
/// outcome bit-for-bit.
inline StrategyOutcome run_strategy(const PlannerConfig& cfg, const std::string& strategy) {
    StrategyOutcome out;
    out.strategy = strategy;

    out.mesh = detail::stage("load-mesh", [&] { return load_mesh(cfg.mesh_path); });
    out.mps = detail::stage("load-mps", [&] {
        auto mps = load_measurement_points(cfg.mp_path);
        for (MeasurementPoint& mp : mps)
            if (mp.tolerance <= 0.0) mp.tolerance = cfg.kind_tolerances.at(mp.kind);
        validate(mps);
        return mps;
    });

    CollisionScene scene;
    scene.geometry = out.mesh;
    detail::stage("load-obstacles", [&] {
        for (const std::string& path : cfg.obstacle_paths) scene.geometry.append(load_mesh(path));
        return 0;
    });

    const SensorUncertaintyCurve curve = detail::stage("curve", [&] { return cfg.curve(); });
    const BudgetMap budgets = detail::stage("budgets", [&] {
        return compute_budgets(out.mps, cfg.coverage_factor, cfg.u_mat, cfg.u_rot, curve);
    });

    const std::vector<Voxel> voxels = detail::stage("voxelize", [&] {
        return voxelize(out.mesh, out.mps, cfg.voxel_edge, cfg.sensor.far_fov_width,
                        cfg.chordal_fraction, cfg.voxel_min_edge);
    });

    const ShellAccessibilityOracle oracle(cfg.base_position, cfg.reach_min, cfg.reach_max,
                                          cfg.cone_axis, cfg.cone_half_angle);
    VisibilityGates gates;
    gates.incidence_mode = cfg.incidence_mode;
    gates.apply_angle_gate = strategy == "rrt" ? true : cfg.baseline_angle_gate;

    const std::vector<Candidate> candidates = detail::stage("candidates", [&] {
        auto cands = generate_candidates(voxels, budgets, out.mps, cfg.sensor, curve, cfg.grid,
                                         oracle, scene, cfg.body, gates);
        cache_visible_sets(cands, out.mps);  // full-coverage pre-check
        return cands;
    });

    std::vector<int> picks;
    if (strategy == "rrt") {
        SamplerConfig sampler = cfg.sampler;
        if (cfg.use_entropy_weights) {
            const EntropyWeights w = entropy_weights(candidates);
            sampler.beta2 = w.beta2;
            sampler.gamma2 = w.gamma2;
        }
        PlanResult result = detail::stage("sample", [&] {
            return plan_viewpoints(candidates, out.mps, cfg.home_position, sampler);
        });
        if (!result.full_coverage) {
            std::string missing;
            for (int id : result.uncovered_mp_ids)
                missing += (missing.empty() ? "" : ", ") + std::to_string(id);
            throw StageError("sample",
                             CoverageFailureError("iteration budget exhausted with MP(s) {" +
                                                  missing + "} uncovered"));
        }
        picks = result.selected_candidates;
        out.rrt = std::move(result);
    } else {
        picks = detail::stage("sample", [&] {
            return greedy_target_sampling(candidates, out.mps, cfg.home_position);
        });
    }

    std::vector<Viewpoint> selected;
    std::vector<VisibleSet> selected_sets;
    for (int idx : picks) {
        selected.push_back(candidates[idx].vp);
        selected_sets.push_back(candidates[idx].visible);
    }

    out.matrix = detail::stage("time-matrix", [&] {
        return build_time_matrix(selected, cfg.home_viewpoint(), scene, cfg.body, cfg.motion,
                                 cfg.sensor.scan_time, cfg.detour, cfg.seed);
    });

    SaParams sa;
    sa.cooling = cfg.sa_cooling;
    sa.iterations_per_viewpoint = cfg.sa_iterations_per_viewpoint;
    sa.restarts = cfg.sa_restarts;
    sa.initial_temperature_samples = cfg.sa_initial_temperature_samples;
    out.tour = detail::stage("sequence", [&] { return solve_tsp_sa(out.matrix, sa, cfg.seed); });

    for (int idx : out.tour.order) {
        out.plan_viewpoints.push_back(selected[idx]);
        out.plan_sets.push_back(selected_sets[idx]);
    }

    const std::vector<AchievedMp> achieved = detail::stage("metrics", [&] {
        return achieved_uncertainties(out.mps, out.plan_viewpoints, out.plan_sets,
                                      cfg.coverage_factor, cfg.u_mat, cfg.u_rot);
    });
    out.metrics =
        compute_metrics(strategy, cfg.seed, achieved, static_cast<int>(out.plan_viewpoints.size()),
                        out.tour.total_time, cfg.histogram_edges);

    PlanDocument& doc = out.document;
    doc.strategy = strategy;
    doc.seed = cfg.seed;
    doc.viewpoints = out.plan_viewpoints;
    doc.visible = out.plan_sets;
    doc.achieved = achieved;
    doc.t01 = out.tour.t01;
    doc.tm0 = out.tour.tm0;
    for (std::size_t i = 0; i + 1 < out.tour.order.size(); ++i)
        doc.leg_times.push_back(out.matrix.at(out.tour.order[i], out.tour.order[i + 1]));
    doc.scan_time = cfg.sensor.scan_time;
    doc.total_time = out.tour.total_time;
    if (out.rrt) doc.objective = out.rrt->objective_value;
    return out;
}

struct PipelineArtifacts {
    std::string plan_path;
    std::string metrics_path;
    std::string graph_path;    // rrt only
    std::string heatmap_path;  // only when requested
};

/// Full `plan` verb: runs the configured strategy and writes the plan,
/// metrics and (for rrt) graph documents into out_dir.
inline PipelineArtifacts run_pipeline(const PlannerConfig& cfg, const std::string& out_dir,
                                      StrategyOutcome* outcome_out = nullptr,
                                      bool with_heatmap = false) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    StrategyOutcome outcome = run_strategy(cfg, cfg.strategy);

    PipelineArtifacts artifacts;
    artifacts.plan_path = (fs::path(out_dir) / "plan.txt").string();
    artifacts.metrics_path = (fs::path(out_dir) / "metrics.txt").string();
    write_plan_document(outcome.document, artifacts.plan_path);
    write_metrics_document(outcome.metrics, artifacts.metrics_path);
    if (outcome.rrt) {
        artifacts.graph_path = (fs::path(out_dir) / "plan_graph.txt").string();
        write_graph_document(outcome.rrt->graph, outcome.rrt->objective_value,
                             artifacts.graph_path);
    }
    if (with_heatmap) {
        artifacts.heatmap_path = (fs::path(out_dir) / "heatmap.ply").string();
        export_heatmap(outcome.mesh, outcome.mps, outcome.metrics.achieved, cfg.histogram_edges,
                       artifacts.heatmap_path);
    }
    if (outcome_out) *outcome_out = std::move(outcome);
    return artifacts;
}

struct ComparisonRow {
    std::string strategy;
    int viewpoints = 0;
    double total_time = 0.0;
    std::map<MpKind, KindStats> by_kind;
    KindStats overall;
};

struct Comparison {
    ComparisonRow proposed;  // rrt
    ComparisonRow baseline;
};

inline ComparisonRow row_from_outcome(const StrategyOutcome& outcome) {
    ComparisonRow row;
    row.strategy = outcome.strategy;
    row.viewpoints = outcome.metrics.viewpoint_count;
    row.total_time = outcome.metrics.total_time;
    row.by_kind = outcome.metrics.by_kind;
    row.overall = outcome.metrics.overall;
    return row;
}

/// Side-by-side run of the enhanced-RRT* strategy and the greedy baseline
/// on the same inputs.
inline Comparison compare_strategies(const PlannerConfig& cfg) {
    if (cfg.mp_path.empty()) throw ConfigError("nothing to plan: empty MP file path");
    Comparison cmp;
    cmp.proposed = row_from_outcome(run_strategy(cfg, "rrt"));
    cmp.baseline = row_from_outcome(run_strategy(cfg, "baseline"));
    return cmp;
}

inline std::string comparison_row_line(const ComparisonRow& row) {
    std::string line = "row " + row.strategy + " " + std::to_string(row.viewpoints) + " " +
                       fnum(row.total_time);
    for (const auto& [kind, ks] : row.by_kind) {
        line += std::string(" ") + to_string(kind) + " ";
        line += ks.count > 0 ? fnum(ks.mean_u) + " " + fnum(ks.compliance) : std::string("- -");
    }
    line += " overall " + fnum(row.overall.mean_u) + " " + fnum(row.overall.compliance);
    return line;
}

inline void write_comparison(const Comparison& cmp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write comparison document: " + path);
    out << "scanplan-compare 1\n";
    out << "columns strategy viewpoints total-time"
           " [per-kind mean-u compliance] overall mean-u compliance\n";
    out << comparison_row_line(cmp.proposed) << "\n";
    out << comparison_row_line(cmp.baseline) << "\n";
}

}  // namespace scanplan
