// Command-line front end for the scanplan coverage-path-planning toolkit.
//
// Verbs:
//   plan            run the configured strategy, write plan/metrics documents
//   compare         run rrt and the greedy baseline side by side
//   heatmap         run the plan and export the uncertainty heatmap mesh
//   validate-config parse and validate the config, print a summary
//
// Exit codes: 0 ok, 2 config error, 3 coverage failure, 4 infeasible
// tolerance, 5 unreachable viewpoint pair.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scanplan/config.hpp"
#include "scanplan/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::string strategy;
    std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("config", args.config_path, "planner config file (JSON)")->required();
    cmd->add_option("-o,--out", args.out_dir, "output directory");
    cmd->add_option("--set", args.overrides,
                    "override any config key, e.g. --set sampler.i_max=500 "
                    "--set strategy=baseline (repeatable)");
    cmd->add_option("--strategy", args.strategy, "strategy override: rrt | baseline");
    cmd->add_option("--seed", args.seed, "RNG seed override");
}

scanplan::PlannerConfig load_with_overrides(const CommonArgs& args) {
    nlohmann::json j = scanplan::load_config_json(args.config_path);
    for (const std::string& assignment : args.overrides) scanplan::apply_override(j, assignment);
    if (!args.strategy.empty()) j["strategy"] = args.strategy;
    if (args.seed >= 0) j["seed"] = static_cast<std::uint64_t>(args.seed);
    return scanplan::config_from_json(j);
}

void print_kind_row(const char* name, const scanplan::KindStats& ks) {
    if (ks.count == 0) {
        std::printf("  %-10s %5d          -          -\n", name, ks.count);
    } else {
        std::printf("  %-10s %5d %10.4f %9.2f%%\n", name, ks.count, ks.mean_u,
                    100.0 * ks.compliance);
    }
}

void print_metrics(const scanplan::PlanMetrics& m) {
    std::printf("strategy          %s\n", m.strategy.c_str());
    std::printf("viewpoints        %d\n", m.viewpoint_count);
    std::printf("inspection time   %.2f s\n", m.total_time);
    std::printf("  %-10s %5s %10s %10s\n", "kind", "count", "mean-u", "r");
    for (const auto& [kind, ks] : m.by_kind) print_kind_row(scanplan::to_string(kind), ks);
    print_kind_row("overall", m.overall);
    std::printf("  uncertainty histogram:\n");
    for (std::size_t i = 0; i + 1 < m.hist.edges.size(); ++i)
        std::printf("    %-14s %d\n",
                    scanplan::bin_label(m.hist.edges[i], m.hist.edges[i + 1]).c_str(),
                    m.hist.counts[i]);
    if (m.hist.below > 0) std::printf("    below          %d\n", m.hist.below);
    if (m.hist.above > 0) std::printf("    above          %d\n", m.hist.above);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scanplan: uncertainty-aware coverage path planning for optical inspection"};
    app.require_subcommand(1);

    CommonArgs plan_args, compare_args, heatmap_args, validate_args;
    CLI::App* cmd_plan = app.add_subcommand("plan", "plan viewpoints and a visiting sequence");
    add_common(cmd_plan, plan_args);
    CLI::App* cmd_compare =
        app.add_subcommand("compare", "compare the rrt strategy against the greedy baseline");
    add_common(cmd_compare, compare_args);
    CLI::App* cmd_heatmap =
        app.add_subcommand("heatmap", "plan and export the uncertainty heatmap mesh");
    add_common(cmd_heatmap, heatmap_args);
    CLI::App* cmd_validate = app.add_subcommand("validate-config", "check a config file");
    add_common(cmd_validate, validate_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_plan->parsed()) {
            const auto cfg = load_with_overrides(plan_args);
            scanplan::StrategyOutcome outcome;
            const auto artifacts = scanplan::run_pipeline(cfg, plan_args.out_dir, &outcome);
            print_metrics(outcome.metrics);
            std::printf("plan written to %s\n", artifacts.plan_path.c_str());
            std::printf("metrics written to %s\n", artifacts.metrics_path.c_str());
            if (!artifacts.graph_path.empty())
                std::printf("plan graph written to %s\n", artifacts.graph_path.c_str());
        } else if (cmd_compare->parsed()) {
            const auto cfg = load_with_overrides(compare_args);
            const auto cmp = scanplan::compare_strategies(cfg);
            std::filesystem::create_directories(compare_args.out_dir);
            const std::string path =
                (std::filesystem::path(compare_args.out_dir) / "compare.txt").string();
            scanplan::write_comparison(cmp, path);
            std::printf("%-10s %10s %14s %10s\n", "strategy", "viewpoints", "time (s)",
                        "overall r");
            for (const auto& row : {cmp.proposed, cmp.baseline})
                std::printf("%-10s %10d %14.2f %9.2f%%\n", row.strategy.c_str(), row.viewpoints,
                            row.total_time, 100.0 * row.overall.compliance);
            std::printf("comparison written to %s\n", path.c_str());
        } else if (cmd_heatmap->parsed()) {
            const auto cfg = load_with_overrides(heatmap_args);
            const auto artifacts =
                scanplan::run_pipeline(cfg, heatmap_args.out_dir, nullptr, /*with_heatmap=*/true);
            std::printf("heatmap written to %s\n", artifacts.heatmap_path.c_str());
        } else if (cmd_validate->parsed()) {
            const auto cfg = load_with_overrides(validate_args);
            std::printf("config ok: strategy=%s seed=%llu mesh=%s mps=%s\n",
                        cfg.strategy.c_str(), static_cast<unsigned long long>(cfg.seed),
                        cfg.mesh_path.c_str(), cfg.mp_path.c_str());
            std::printf("sensor: near %gx%g far %gx%g dof %g depth %g t0 %g\n",
                        cfg.sensor.near_width, cfg.sensor.near_height, cfg.sensor.far_width,
                        cfg.sensor.far_height, cfg.sensor.dof, cfg.sensor.scan_depth,
                        cfg.sensor.scan_time);
            std::printf("sampler: L=%g eps=%g i_max=%d beta1=%g gamma1=%g beta2=%g gamma2=%g\n",
                        cfg.sampler.spacing, cfg.sampler.neighbor_radius,
                        cfg.sampler.max_iterations, cfg.sampler.beta1, cfg.sampler.gamma1,
                        cfg.sampler.beta2, cfg.sampler.gamma2);
        }
    } catch (const scanplan::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
