#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"

namespace scanplan {

enum class MpKind { hole, slot, trimming, surface };

inline const char* to_string(MpKind kind) {
    switch (kind) {
        case MpKind::hole: return "hole";
        case MpKind::slot: return "slot";
        case MpKind::trimming: return "trimming";
        case MpKind::surface: return "surface";
    }
    return "?";
}

inline MpKind mp_kind_from_string(const std::string& s) {
    if (s == "hole") return MpKind::hole;
    if (s == "slot") return MpKind::slot;
    if (s == "trimming") return MpKind::trimming;
    if (s == "surface") return MpKind::surface;
    throw ConfigError("unknown MP kind '" + s + "' (expected hole|slot|trimming|surface)");
}

/// A key measurement point: a surface feature whose dimension must be
/// verified against a tolerance.
struct MeasurementPoint {
    int id = 0;
    Vec3 position;       // mm
    Vec3 normal;         // unit
    MpKind kind = MpKind::surface;
    double tolerance = 0.0;  // T, mm, full interval width
    bool critical = false;
};

inline void validate(const std::vector<MeasurementPoint>& mps) {
    std::unordered_set<int> ids;
    for (const MeasurementPoint& mp : mps) {
        if (!ids.insert(mp.id).second)
            throw ConfigError("duplicate MP id " + std::to_string(mp.id));
        if (mp.tolerance <= 0.0)
            throw ConfigError("MP " + std::to_string(mp.id) + " has non-positive tolerance");
        if (!is_unit(mp.normal))
            throw ConfigError("MP " + std::to_string(mp.id) + " normal is not unit length");
    }
}

/// Surface cell holding exactly one MP. The center lies on the part surface
/// (projected), the normal is the area-weighted mean of intersecting
/// triangle normals.
struct Voxel {
    int id = 0;
    Vec3 center;
    Vec3 normal;
    int mp_id = 0;
    double edge = 0.0;  // mm
};

/// Parses the MP file: one record per line,
///   id x y z nx ny nz kind tolerance_mm critical
/// separated by whitespace and/or commas; '#' starts a comment. A
/// non-positive tolerance means "use the configured default for this kind"
/// (resolved by the caller). `critical` is 0/1.
inline std::vector<MeasurementPoint> load_measurement_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open MP file: " + path);
    std::vector<MeasurementPoint> mps;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        MeasurementPoint mp;
        std::string kind;
        int critical = 0;
        if (!(ls >> mp.id)) continue;  // blank / comment-only line
        if (!(ls >> mp.position.x >> mp.position.y >> mp.position.z >> mp.normal.x >>
              mp.normal.y >> mp.normal.z >> kind >> mp.tolerance >> critical))
            throw ConfigError("malformed MP record at " + path + ":" + std::to_string(line_no));
        mp.kind = mp_kind_from_string(kind);
        mp.critical = critical != 0;
        if (norm(mp.normal) <= 0.0)
            throw ConfigError("zero MP normal at " + path + ":" + std::to_string(line_no));
        mp.normal = normalized(mp.normal);
        mps.push_back(mp);
    }
    if (mps.empty()) throw ConfigError("MP file has no records: " + path);
    return mps;
}

inline void write_measurement_points(const std::vector<MeasurementPoint>& mps,
                                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write MP file: " + path);
    out.precision(17);  // round-trip exact
    out << "# id x y z nx ny nz kind tolerance_mm critical\n";
    for (const MeasurementPoint& mp : mps) {
        out << mp.id << " " << mp.position.x << " " << mp.position.y << " " << mp.position.z
            << " " << mp.normal.x << " " << mp.normal.y << " " << mp.normal.z << " "
            << to_string(mp.kind) << " " << mp.tolerance << " " << (mp.critical ? 1 : 0) << "\n";
    }
}

}  // namespace scanplan
