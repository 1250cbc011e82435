#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scanplan/candidates.hpp"
#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/measurement.hpp"

namespace scanplan {

/// Weights and search parameters of the enhanced RRT* viewpoint sampler.
/// gamma2 is signed: the default rewards first-time coverage (negative);
/// setting it positive penalizes coverage in the parent cost instead.
struct SamplerConfig {
    double beta1 = 1.0;
    double gamma1 = 0.05;
    double beta2 = 1.0;
    double gamma2 = -0.02;
    double spacing = 160.0;          // L: minimum distance from q_nearest, mm
    double neighbor_radius = 320.0;  // epsilon, mm
    int max_iterations = 2000;
    std::uint64_t seed = 0;
    bool refresh_nearest_before_extend = false;

    void validate() const {
        if (beta1 <= 0.0 || beta2 <= 0.0) throw ConfigError("beta weights must be positive");
        if (spacing <= 0.0) throw ConfigError("spacing L must be positive");
        if (neighbor_radius <= 0.0) throw ConfigError("neighbor radius must be positive");
        if (max_iterations < 1) throw ConfigError("max iterations must be at least 1");
    }
};

/// Directed tree over selected viewpoints. Node 0 is the root q_init (the
/// home pose, covering nothing); every other node records the candidate it
/// selects, its parent, the MPs it covers first along its root path and the
/// cumulative coverage of that path.
struct PlanGraph {
    struct Node {
        int candidate_index = -1;  // -1 for the root
        int parent = -1;
        Vec3 position;
        std::vector<int> newly_covered;  // mp ids, sorted
        double newly_usen_sum = 0.0;
        std::vector<bool> covered;  // dense over mp index space
        int covered_count = 0;
    };

    std::vector<Node> nodes;
    std::vector<int> mp_ids;  // dense index -> mp id, sorted
    int q_best = -1;

    int mp_index(int mp_id) const {
        const auto it = std::lower_bound(mp_ids.begin(), mp_ids.end(), mp_id);
        if (it == mp_ids.end() || *it != mp_id)
            throw InvalidGraphError("MP id " + std::to_string(mp_id) + " not in the plan space");
        return static_cast<int>(it - mp_ids.begin());
    }

    /// Node indices from the root to `node`, inclusive.
    std::vector<int> root_path(int node) const {
        std::vector<int> path;
        for (int i = node; i != -1; i = nodes[i].parent) path.push_back(i);
        std::reverse(path.begin(), path.end());
        return path;
    }
};

/// Inspection objective: beta1 * sum over selected viewpoints of the mean first-time
/// uncertainty + gamma1 * m. The root is not a viewpoint and is excluded
/// from m.
inline double objective(const PlanGraph& graph, double beta1, double gamma1) {
    double sum = 0.0;
    int m = 0;
    for (std::size_t i = 1; i < graph.nodes.size(); ++i) {
        const auto& node = graph.nodes[i];
        if (node.newly_covered.empty())
            throw InvalidGraphError("node " + std::to_string(i) +
                                    " has an empty newly-covered set");
        sum += node.newly_usen_sum / static_cast<double>(node.newly_covered.size());
        ++m;
    }
    return beta1 * sum + gamma1 * m;
}

namespace detail {

/// Parent cost for `parent_node`; nullopt when the combined
/// first-time coverage is zero (the pairing contributes nothing).
inline std::optional<double> try_cost(const PlanGraph& graph, int parent_node,
                                      const VisibleSet& vs_new, double beta2, double gamma2) {
    const PlanGraph::Node& parent = graph.nodes[parent_node];
    int n_new = 0;
    double u_new = 0.0;
    for (const VisibleSet::Entry& e : vs_new.entries) {
        if (!parent.covered[graph.mp_index(e.mp_id)]) {
            ++n_new;
            u_new += e.u_sen;
        }
    }
    const int n_near = static_cast<int>(parent.newly_covered.size());
    const int combined = n_new + n_near;
    if (combined == 0) return std::nullopt;
    return beta2 * (u_new + parent.newly_usen_sum) / combined + gamma2 * combined;
}

}  // namespace detail

/// Throwing form of the parent cost;
/// planner internals use the non-throwing variant and skip degenerate
/// pairings.
inline double cost(const PlanGraph& graph, int parent_node, const VisibleSet& vs_new,
                   double beta2, double gamma2) {
    const auto c = detail::try_cost(graph, parent_node, vs_new, beta2, gamma2);
    if (!c)
        throw DegenerateCostError(
            "zero combined first-time coverage for the candidate/parent pairing");
    return *c;
}

/// Extend step: among unselected candidates strictly farther than L from
/// q_nearest, pick the one closest (Heron perpendicular distance) to the
/// line through q_rand and q_nearest. Ties go to the lowest candidate id.
/// nullopt when no candidate clears the spacing, in which case the
/// iteration is skipped.
inline std::optional<int> extend(const std::vector<Candidate>& candidates,
                                 const std::vector<bool>& selected, const Vec3& q_rand,
                                 const Vec3& q_nearest, double spacing) {
    std::optional<int> best;
    double best_distance = std::numeric_limits<double>::infinity();
    const bool degenerate_line = distance(q_rand, q_nearest) <= 1e-12;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (selected[i]) continue;
        const Vec3& p = candidates[i].vp.position;
        if (!(distance(p, q_nearest) > spacing)) continue;
        const double d = degenerate_line ? distance(p, q_nearest)
                                         : min_distance_point_to_line(q_rand, q_nearest, p);
        if (d < best_distance) {
            best_distance = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

/// FindbestNeighbor: the node within epsilon of q_new minimizing the
/// parent cost; falls back to the Euclidean-nearest node when no
/// neighbor is in range (or none has a finite cost). Cost ties go to the
/// newest node, so equal-cost insertions deepen the current branch
/// instead of fanning out around the oldest node.
inline int find_best_neighbor(const PlanGraph& graph, const Vec3& position,
                              const VisibleSet& vs_new, double neighbor_radius, double beta2,
                              double gamma2) {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t k = graph.nodes.size(); k-- > 0;) {
        const int i = static_cast<int>(k);
        if (distance(graph.nodes[i].position, position) < neighbor_radius) {
            const auto c = detail::try_cost(graph, i, vs_new, beta2, gamma2);
            if (c && *c < best_cost) {
                best_cost = *c;
                best = i;
            }
        }
    }
    if (best != -1) return best;

    double best_d = std::numeric_limits<double>::infinity();
    int nearest = 0;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const double d = distance(graph.nodes[i].position, position);
        if (d < best_d) {
            best_d = d;
            nearest = static_cast<int>(i);
        }
    }
    return nearest;
}

/// Neighbors: node indices strictly within epsilon of q_new.
inline std::vector<int> neighbors(const PlanGraph& graph, const Vec3& position,
                                  double neighbor_radius) {
    std::vector<int> out;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
        if (distance(graph.nodes[i].position, position) < neighbor_radius)
            out.push_back(static_cast<int>(i));
    return out;
}

/// ChooseParent: argmin of the parent cost over {q_nearest} union the
/// neighbor set; ties keep q_nearest, then the lowest node index. No
/// rewiring. nullopt when every pairing is degenerate.
inline std::optional<int> choose_parent(const PlanGraph& graph, const std::vector<int>& near_set,
                                        int q_nearest, const VisibleSet& vs_new, double beta2,
                                        double gamma2) {
    std::optional<int> best;
    double best_cost = std::numeric_limits<double>::infinity();
    if (const auto c = detail::try_cost(graph, q_nearest, vs_new, beta2, gamma2)) {
        best = q_nearest;
        best_cost = *c;
    }
    for (int i : near_set) {
        if (i == q_nearest) continue;
        const auto c = detail::try_cost(graph, i, vs_new, beta2, gamma2);
        if (c && *c < best_cost) {
            best_cost = *c;
            best = i;
        }
    }
    return best;
}

struct PlanResult {
    PlanGraph graph;
    std::vector<int> selected_candidates;  // candidate indices, root-side first
    bool full_coverage = false;
    std::vector<int> uncovered_mp_ids;
    double objective_value = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

/// Subtree consisting of the root path to `node`, reindexed so the
/// objective of the final plan can be evaluated on it directly.
inline PlanGraph extract_path(const PlanGraph& graph, int node) {
    PlanGraph path;
    path.mp_ids = graph.mp_ids;
    const std::vector<int> chain = graph.root_path(node);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        PlanGraph::Node n = graph.nodes[chain[i]];
        n.parent = static_cast<int>(i) - 1;
        path.nodes.push_back(std::move(n));
    }
    path.q_best = static_cast<int>(path.nodes.size()) - 1;
    return path;
}

/// Enhanced RRT* search over the cached candidate set: Sample -> Extend ->
/// FindbestNeighbor -> FeasiblePoint -> Neighbors -> ChooseParent, growing
/// the tree until one node's cumulative coverage equals P or the iteration
/// budget runs out. Extend consumes the q_nearest left over from the
/// previous iteration; the refreshed variant is behind a config flag.
inline PlanResult plan_viewpoints(const std::vector<Candidate>& candidates,
                                  const std::vector<MeasurementPoint>& mps, const Vec3& home,
                                  const SamplerConfig& config) {
    config.validate();
    if (candidates.empty()) throw CoverageFailureError("empty candidate set");

    PlanResult result;
    PlanGraph& graph = result.graph;
    for (const MeasurementPoint& mp : mps) graph.mp_ids.push_back(mp.id);
    std::sort(graph.mp_ids.begin(), graph.mp_ids.end());
    const int total = static_cast<int>(graph.mp_ids.size());

    PlanGraph::Node root;
    root.position = home;
    root.covered.assign(total, false);
    graph.nodes.push_back(std::move(root));

    std::vector<bool> selected(candidates.size(), false);
    std::mt19937_64 rng(config.seed);
    int q_nearest = 0;

    int i = 0;
    for (; i < config.max_iterations; ++i) {
        const int q_rand = static_cast<int>(rng() % candidates.size());
        const Vec3& rand_pos = candidates[q_rand].vp.position;

        if (config.refresh_nearest_before_extend)
            q_nearest = find_best_neighbor(graph, rand_pos, candidates[q_rand].visible,
                                           config.neighbor_radius, config.beta2, config.gamma2);

        const auto extended = extend(candidates, selected, rand_pos,
                                     graph.nodes[q_nearest].position, config.spacing);
        if (!extended) continue;
        const int q_new = *extended;
        const Candidate& cand = candidates[q_new];

        q_nearest = find_best_neighbor(graph, cand.vp.position, cand.visible,
                                       config.neighbor_radius, config.beta2, config.gamma2);

        // FeasiblePoint: the candidate must see at least one MP; collision
        // freedom already holds for every generated candidate.
        if (cand.visible.empty()) continue;

        const std::vector<int> near_set =
            neighbors(graph, cand.vp.position, config.neighbor_radius);
        const auto parent = choose_parent(graph, near_set, q_nearest, cand.visible,
                                          config.beta2, config.gamma2);
        if (!parent) continue;

        const PlanGraph::Node& parent_node = graph.nodes[*parent];
        PlanGraph::Node node;
        node.candidate_index = q_new;
        node.parent = *parent;
        node.position = cand.vp.position;
        node.covered = parent_node.covered;
        node.covered_count = parent_node.covered_count;
        for (const VisibleSet::Entry& e : cand.visible.entries) {
            const int idx = graph.mp_index(e.mp_id);
            if (!node.covered[idx]) {
                node.covered[idx] = true;
                ++node.covered_count;
                node.newly_covered.push_back(e.mp_id);
                node.newly_usen_sum += e.u_sen;
            }
        }
        if (node.newly_covered.empty()) continue;  // every node must add coverage

        graph.nodes.push_back(std::move(node));
        selected[q_new] = true;
        const int inserted = static_cast<int>(graph.nodes.size()) - 1;

        if (graph.nodes[inserted].covered_count == total) {
            graph.q_best = inserted;
            ++i;
            break;
        }
    }
    result.iterations = i;

    if (graph.q_best != -1) {
        result.full_coverage = true;
        const std::vector<int> chain = graph.root_path(graph.q_best);
        for (std::size_t n = 1; n < chain.size(); ++n)
            result.selected_candidates.push_back(graph.nodes[chain[n]].candidate_index);
        result.objective_value =
            objective(extract_path(graph, graph.q_best), config.beta1, config.gamma1);
    } else {
        // Report the uncovered MPs of the best partial branch.
        int best_node = 0;
        for (std::size_t n = 1; n < graph.nodes.size(); ++n)
            if (graph.nodes[n].covered_count > graph.nodes[best_node].covered_count)
                best_node = static_cast<int>(n);
        for (int idx = 0; idx < total; ++idx)
            if (!graph.nodes[best_node].covered[idx])
                result.uncovered_mp_ids.push_back(graph.mp_ids[idx]);
    }
    return result;
}

/// Entropy-method weighting for (beta2, gamma2), one interpretation: the
/// two criteria are each candidate's mean visible-MP uncertainty and its
/// coverage count. Column entropies give divergence weights; the coverage
/// weight is scaled to the magnitude ratio of the two criteria and signed
/// negative so coverage is rewarded.
struct EntropyWeights {
    double beta2 = 1.0;
    double gamma2 = 0.0;
    double w_uncertainty = 0.5;
    double w_coverage = 0.5;
};

inline EntropyWeights entropy_weights(const std::vector<Candidate>& candidates) {
    const std::size_t n = candidates.size();
    if (n < 2) return {};
    std::vector<double> mean_u(n), count(n);
    for (std::size_t i = 0; i < n; ++i) {
        const VisibleSet& vs = candidates[i].visible;
        double sum = 0.0;
        for (const auto& e : vs.entries) sum += e.u_sen;
        mean_u[i] = vs.empty() ? 0.0 : sum / static_cast<double>(vs.size());
        count[i] = static_cast<double>(vs.size());
    }

    const auto divergence = [n](const std::vector<double>& col, bool benefit) {
        const double lo = *std::min_element(col.begin(), col.end());
        const double hi = *std::max_element(col.begin(), col.end());
        if (hi - lo <= 1e-15) return 0.0;
        std::vector<double> norm_col(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            norm_col[i] = benefit ? (col[i] - lo) / (hi - lo) : (hi - col[i]) / (hi - lo);
            sum += norm_col[i];
        }
        if (sum <= 0.0) return 0.0;
        double entropy = 0.0;
        for (double v : norm_col) {
            const double p = v / sum;
            if (p > 0.0) entropy -= p * std::log(p);
        }
        entropy /= std::log(static_cast<double>(n));
        return 1.0 - entropy;
    };

    const double d_u = divergence(mean_u, /*benefit=*/false);
    const double d_c = divergence(count, /*benefit=*/true);
    EntropyWeights w;
    if (d_u + d_c > 0.0) {
        w.w_uncertainty = d_u / (d_u + d_c);
        w.w_coverage = d_c / (d_u + d_c);
    }
    double u_scale = 0.0, c_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        u_scale += mean_u[i];
        c_scale += count[i];
    }
    const double magnitude = c_scale > 0.0 ? u_scale / c_scale : 0.0;
    w.beta2 = std::max(w.w_uncertainty, 1e-6);
    w.gamma2 = -w.w_coverage * magnitude;
    return w;
}

}  // namespace scanplan
