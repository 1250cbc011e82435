#pragma once

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "scanplan/candidates.hpp"
#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/measurement.hpp"

namespace scanplan {

/// Greedy target-sampling benchmark: repeatedly pick the candidate covering
/// the most not-yet-covered MPs, ties broken by the shorter Euclidean hop
/// from the previous pick (the home position before the first pick), then
/// by candidate id. Whether the visible sets honor the incident-angle gate
/// is decided by the caller when the candidate sets are computed.
inline std::vector<int> greedy_target_sampling(const std::vector<Candidate>& candidates,
                                               const std::vector<MeasurementPoint>& mps,
                                               const Vec3& home) {
    if (candidates.empty()) throw CoverageFailureError("empty candidate set");
    std::set<int> uncovered;
    for (const MeasurementPoint& mp : mps) uncovered.insert(mp.id);

    std::vector<int> picks;
    std::vector<bool> used(candidates.size(), false);
    Vec3 last = home;

    while (!uncovered.empty()) {
        int best = -1;
        std::size_t best_gain = 0;
        double best_hop = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (used[i]) continue;
            std::size_t gain = 0;
            for (const VisibleSet::Entry& e : candidates[i].visible.entries)
                if (uncovered.count(e.mp_id)) ++gain;
            if (gain == 0) continue;
            const double hop = distance(candidates[i].vp.position, last);
            if (gain > best_gain || (gain == best_gain && hop < best_hop)) {
                best = static_cast<int>(i);
                best_gain = gain;
                best_hop = hop;
            }
        }
        if (best == -1) {
            std::string missing;
            for (int id : uncovered) missing += (missing.empty() ? "" : ", ") + std::to_string(id);
            throw CoverageFailureError("greedy sampling cannot cover MP(s) {" + missing + "}");
        }
        used[best] = true;
        picks.push_back(best);
        last = candidates[best].vp.position;
        for (const VisibleSet::Entry& e : candidates[best].visible.entries)
            uncovered.erase(e.mp_id);
    }
    return picks;
}

}  // namespace scanplan
