#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/measurement.hpp"
#include "scanplan/mesh.hpp"
#include "scanplan/rrt_sampler.hpp"
#include "scanplan/sequencer.hpp"
#include "scanplan/uncertainty.hpp"
#include "scanplan/visibility.hpp"

namespace scanplan {

/// Round-trip-exact number formatting; the plan and metrics documents are
/// diffed byte-for-byte in regression tests.
inline std::string fnum(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Short form for human-facing labels (bin edges, legends).
inline std::string fnum_short(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::string bin_label(double lo, double hi) {
    return "[" + fnum_short(lo) + "," + fnum_short(hi) + ")";
}

struct Histogram {
    std::vector<double> edges;
    std::vector<int> counts;  // counts[i] covers [edges[i], edges[i+1])
    int below = 0;
    int above = 0;
};

inline Histogram histogram(const std::vector<double>& values, const std::vector<double>& edges) {
    if (edges.size() < 2) throw ConfigError("histogram needs at least two bin edges");
    Histogram h;
    h.edges = edges;
    h.counts.assign(edges.size() - 1, 0);
    for (double v : values) {
        if (v < edges.front()) {
            ++h.below;
        } else if (v >= edges.back()) {
            ++h.above;
        } else {
            const auto it = std::upper_bound(edges.begin(), edges.end(), v);
            ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
        }
    }
    return h;
}

/// Achieved measurement of one MP under a finished plan: the covering
/// viewpoint is the minimum-angle one among the plan viewpoints that see
/// it, ties to the earliest in the visiting order.
struct AchievedMp {
    int mp_id = 0;
    MpKind kind = MpKind::surface;
    double tolerance = 0.0;
    bool critical = false;
    int viewpoint_id = 0;
    double angle = 0.0;
    double u_sen = 0.0;
    bool compliant = false;
};

inline std::vector<AchievedMp> achieved_uncertainties(
    const std::vector<MeasurementPoint>& mps, const std::vector<Viewpoint>& plan_order,
    const std::vector<VisibleSet>& plan_sets, int coverage_factor, double u_mat, double u_rot) {
    std::vector<AchievedMp> out;
    for (const MeasurementPoint& mp : mps) {
        std::optional<AchievedMp> best;
        for (std::size_t i = 0; i < plan_order.size(); ++i) {
            const VisibleSet::Entry* e = plan_sets[i].find(mp.id);
            if (!e) continue;
            if (!best || e->angle < best->angle) {
                AchievedMp a;
                a.mp_id = mp.id;
                a.kind = mp.kind;
                a.tolerance = mp.tolerance;
                a.critical = mp.critical;
                a.viewpoint_id = plan_order[i].id;
                a.angle = e->angle;
                a.u_sen = e->u_sen;
                best = a;
            }
        }
        if (!best)
            throw CoverageFailureError("MP " + std::to_string(mp.id) +
                                       " is not covered by the final plan");
        const double expanded = coverage_factor * combined_uncertainty(best->u_sen, u_mat, u_rot);
        best->compliant = expanded <= mp.tolerance / 8.0 + 1e-12;
        out.push_back(*best);
    }
    std::sort(out.begin(), out.end(),
              [](const AchievedMp& a, const AchievedMp& b) { return a.mp_id < b.mp_id; });
    return out;
}

struct KindStats {
    int count = 0;
    double mean_u = 0.0;
    double compliance = 0.0;  // ratio in [0, 1]
};

struct PlanMetrics {
    std::string strategy;
    std::uint64_t seed = 0;
    int viewpoint_count = 0;
    double total_time = 0.0;
    std::vector<AchievedMp> achieved;
    std::map<MpKind, KindStats> by_kind;
    KindStats overall;
    Histogram hist;
};

inline PlanMetrics compute_metrics(const std::string& strategy, std::uint64_t seed,
                                   const std::vector<AchievedMp>& achieved, int viewpoint_count,
                                   double total_time, const std::vector<double>& bin_edges) {
    PlanMetrics m;
    m.strategy = strategy;
    m.seed = seed;
    m.viewpoint_count = viewpoint_count;
    m.total_time = total_time;
    m.achieved = achieved;
    for (MpKind kind :
         {MpKind::hole, MpKind::slot, MpKind::trimming, MpKind::surface})
        m.by_kind[kind] = {};
    std::vector<double> values;
    for (const AchievedMp& a : achieved) {
        KindStats& ks = m.by_kind[a.kind];
        ++ks.count;
        ks.mean_u += a.u_sen;
        ks.compliance += a.compliant ? 1.0 : 0.0;
        ++m.overall.count;
        m.overall.mean_u += a.u_sen;
        m.overall.compliance += a.compliant ? 1.0 : 0.0;
        values.push_back(a.u_sen);
    }
    for (auto& [kind, ks] : m.by_kind) {
        if (ks.count > 0) {
            ks.mean_u /= ks.count;
            ks.compliance /= ks.count;
        }
    }
    if (m.overall.count > 0) {
        m.overall.mean_u /= m.overall.count;
        m.overall.compliance /= m.overall.count;
    }
    m.hist = histogram(values, bin_edges);
    return m;
}

// ---------------------------------------------------------------------------
// Plan document (line-oriented, schema-versioned, diffable)
// ---------------------------------------------------------------------------

struct PlanDocument {
    std::string strategy;
    std::uint64_t seed = 0;
    std::vector<Viewpoint> viewpoints;   // visiting order
    std::vector<VisibleSet> visible;     // aligned with `viewpoints`
    std::vector<AchievedMp> achieved;
    double t01 = 0.0;
    double tm0 = 0.0;
    std::vector<double> leg_times;  // between consecutive viewpoints
    double scan_time = 0.0;
    double total_time = 0.0;
    double objective = std::numeric_limits<double>::quiet_NaN();  // rrt only
};

inline void write_plan_document(const PlanDocument& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write plan document: " + path);
    out << "scanplan-plan 1\n";
    out << "strategy " << doc.strategy << "\n";
    out << "seed " << doc.seed << "\n";
    out << "viewpoints " << doc.viewpoints.size() << "\n";
    if (!std::isnan(doc.objective)) out << "objective " << fnum(doc.objective) << "\n";
    for (const Viewpoint& vp : doc.viewpoints) {
        out << "viewpoint " << vp.id << " " << fnum(vp.position.x) << " " << fnum(vp.position.y)
            << " " << fnum(vp.position.z) << " " << fnum(vp.axis.x) << " " << fnum(vp.axis.y)
            << " " << fnum(vp.axis.z) << " " << fnum(vp.roll) << " " << vp.source_voxel << "\n";
    }
    for (std::size_t i = 0; i < doc.visible.size(); ++i)
        for (const VisibleSet::Entry& e : doc.visible[i].entries)
            out << "covers " << doc.viewpoints[i].id << " " << e.mp_id << " " << fnum(e.angle)
                << " " << fnum(e.u_sen) << "\n";
    for (const AchievedMp& a : doc.achieved)
        out << "achieved " << a.mp_id << " " << a.viewpoint_id << " " << fnum(a.angle) << " "
            << fnum(a.u_sen) << " " << (a.compliant ? 1 : 0) << "\n";
    if (!doc.viewpoints.empty()) {
        out << "leg home " << doc.viewpoints.front().id << " " << fnum(doc.t01) << "\n";
        for (std::size_t i = 0; i + 1 < doc.viewpoints.size(); ++i)
            out << "leg " << doc.viewpoints[i].id << " " << doc.viewpoints[i + 1].id << " "
                << fnum(doc.leg_times[i]) << "\n";
        out << "leg " << doc.viewpoints.back().id << " home " << fnum(doc.tm0) << "\n";
    }
    out << "scan-time-per-vp " << fnum(doc.scan_time) << "\n";
    out << "total-time " << fnum(doc.total_time) << "\n";
}

inline PlanDocument parse_plan_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open plan document: " + path);
    std::string header;
    std::getline(in, header);
    if (header != "scanplan-plan 1")
        throw ConfigError("unsupported plan document schema: " + header);
    PlanDocument doc;
    std::map<int, std::size_t> vp_index;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "strategy") {
            ls >> doc.strategy;
        } else if (tag == "seed") {
            ls >> doc.seed;
        } else if (tag == "objective") {
            ls >> doc.objective;
        } else if (tag == "viewpoint") {
            Viewpoint vp;
            ls >> vp.id >> vp.position.x >> vp.position.y >> vp.position.z >> vp.axis.x >>
                vp.axis.y >> vp.axis.z >> vp.roll >> vp.source_voxel;
            vp_index[vp.id] = doc.viewpoints.size();
            doc.viewpoints.push_back(vp);
            doc.visible.emplace_back();
            doc.visible.back().viewpoint_id = vp.id;
        } else if (tag == "covers") {
            int vp_id = 0;
            VisibleSet::Entry e;
            ls >> vp_id >> e.mp_id >> e.angle >> e.u_sen;
            doc.visible[vp_index.at(vp_id)].entries.push_back(e);
        } else if (tag == "achieved") {
            AchievedMp a;
            int compliant = 0;
            ls >> a.mp_id >> a.viewpoint_id >> a.angle >> a.u_sen >> compliant;
            a.compliant = compliant != 0;
            doc.achieved.push_back(a);
        } else if (tag == "leg") {
            std::string from, to;
            double t = 0.0;
            ls >> from >> to >> t;
            if (from == "home")
                doc.t01 = t;
            else if (to == "home")
                doc.tm0 = t;
            else
                doc.leg_times.push_back(t);
        } else if (tag == "scan-time-per-vp") {
            ls >> doc.scan_time;
        } else if (tag == "total-time") {
            ls >> doc.total_time;
        }
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Plan-graph document (audit trail of the RRT* tree)
// ---------------------------------------------------------------------------

inline void write_graph_document(const PlanGraph& graph, double objective_value,
                                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write graph document: " + path);
    out << "scanplan-graph 1\n";
    out << "nodes " << graph.nodes.size() << "\n";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto& n = graph.nodes[i];
        out << "node " << i << " candidate " << n.candidate_index << " parent " << n.parent
            << " covered " << n.covered_count << " newly " << n.newly_covered.size();
        for (int id : n.newly_covered) out << " " << id;
        out << "\n";
    }
    out << "qbest " << graph.q_best << "\n";
    out << "objective " << fnum(objective_value) << "\n";
}

// ---------------------------------------------------------------------------
// Metrics document
// ---------------------------------------------------------------------------

inline void write_metrics_document(const PlanMetrics& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write metrics document: " + path);
    out << "scanplan-metrics 1\n";
    out << "strategy " << m.strategy << "\n";
    out << "seed " << m.seed << "\n";
    out << "viewpoints " << m.viewpoint_count << "\n";
    out << "total-time " << fnum(m.total_time) << "\n";
    for (const auto& [kind, ks] : m.by_kind) {
        out << "kind " << to_string(kind) << " count " << ks.count;
        if (ks.count > 0)
            out << " mean-u " << fnum(ks.mean_u) << " compliance " << fnum(ks.compliance);
        else
            out << " mean-u - compliance -";
        out << "\n";
    }
    out << "overall count " << m.overall.count << " mean-u " << fnum(m.overall.mean_u)
        << " compliance " << fnum(m.overall.compliance) << "\n";
    for (std::size_t i = 0; i + 1 < m.hist.edges.size(); ++i)
        out << "hist " << bin_label(m.hist.edges[i], m.hist.edges[i + 1]) << " "
            << m.hist.counts[i] << "\n";
    out << "hist-below " << m.hist.below << "\n";
    out << "hist-above " << m.hist.above << "\n";
}

// ---------------------------------------------------------------------------
// Heatmap export: per-vertex colored mesh (ASCII PLY), each vertex colored
// by its nearest MP's achieved uncertainty on a linear ramp over the
// configured bin range.
// ---------------------------------------------------------------------------

inline void export_heatmap(const TriangleMesh& mesh, const std::vector<MeasurementPoint>& mps,
                           const std::vector<AchievedMp>& achieved,
                           const std::vector<double>& bin_edges, const std::string& path) {
    if (achieved.empty()) throw ConfigError("no achieved uncertainties to render");
    std::map<int, double> u_by_mp;
    for (const AchievedMp& a : achieved) u_by_mp[a.mp_id] = a.u_sen;

    const double lo = bin_edges.front();
    const double hi = bin_edges.back();
    const auto color_of = [&](double u) {
        double t = (u - lo) / (hi - lo);
        t = std::clamp(t, 0.0, 1.0);
        const int r = static_cast<int>(std::lround(255.0 * t));
        const int b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
        return std::array<int, 3>{r, 0, b};
    };

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write heatmap file: " + path);
    out << "ply\nformat ascii 1.0\n";
    out << "comment scanplan uncertainty heatmap\n";
    for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) {
        const auto c = color_of((bin_edges[i] + bin_edges[i + 1]) / 2.0);
        out << "comment legend " << bin_label(bin_edges[i], bin_edges[i + 1]) << " rgb " << c[0]
            << " " << c[1] << " " << c[2] << "\n";
    }
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << mesh.triangles.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    for (const Vec3& v : mesh.vertices) {
        double best = std::numeric_limits<double>::max();
        double u = lo;
        for (const MeasurementPoint& mp : mps) {
            const double d = norm_sq(mp.position - v);
            if (d < best) {
                best = d;
                const auto it = u_by_mp.find(mp.id);
                u = it != u_by_mp.end() ? it->second : lo;
            }
        }
        const auto c = color_of(u);
        out << fnum_short(v.x) << " " << fnum_short(v.y) << " " << fnum_short(v.z) << " " << c[0]
            << " " << c[1] << " " << c[2] << "\n";
    }
    for (const Triangle& t : mesh.triangles)
        out << "3 " << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
}

}  // namespace scanplan
