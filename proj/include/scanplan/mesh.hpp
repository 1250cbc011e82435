#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"

namespace scanplan {

struct Triangle {
    std::array<int, 3> v{};
};

/// Triangulated part surface. Normals are recomputed from the winding on
/// load/validation and are unit length.
class TriangleMesh {
public:
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::vector<Vec3> normals;  // per triangle, unit length

    bool empty() const { return triangles.empty(); }
    std::size_t triangle_count() const { return triangles.size(); }

    /// Checks index ranges, rejects zero-area triangles, recomputes unit
    /// normals. Degenerate triangles report their index.
    void validate_and_finalize() {
        if (vertices.empty() || triangles.empty())
            throw GeometryError("mesh is empty");
        normals.resize(triangles.size());
        for (std::size_t i = 0; i < triangles.size(); ++i) {
            for (int k = 0; k < 3; ++k) {
                const int vi = triangles[i].v[k];
                if (vi < 0 || vi >= static_cast<int>(vertices.size()))
                    throw GeometryError("triangle " + std::to_string(i) +
                                        " references out-of-range vertex " + std::to_string(vi));
            }
            const Vec3& a = vertices[triangles[i].v[0]];
            const Vec3& b = vertices[triangles[i].v[1]];
            const Vec3& c = vertices[triangles[i].v[2]];
            const Vec3 n = cross(b - a, c - a);
            const double len = norm(n);
            if (len <= 1e-12)
                throw GeometryError("degenerate (zero-area) triangle at index " +
                                    std::to_string(i));
            normals[i] = n / len;
        }
    }

    Aabb bounding_box() const {
        Aabb box;
        for (const Vec3& v : vertices) box.extend(v);
        return box;
    }

    std::array<Vec3, 3> triangle_vertices(std::size_t i) const {
        return {vertices[triangles[i].v[0]], vertices[triangles[i].v[1]],
                vertices[triangles[i].v[2]]};
    }

    /// Closest surface point to p over all triangles; also reports the
    /// triangle index.
    Vec3 closest_surface_point(const Vec3& p, std::size_t* tri_index = nullptr) const {
        double best = std::numeric_limits<double>::max();
        Vec3 best_point = p;
        std::size_t best_tri = 0;
        for (std::size_t i = 0; i < triangles.size(); ++i) {
            const auto tv = triangle_vertices(i);
            const Vec3 q = closest_point_on_triangle(p, tv[0], tv[1], tv[2]);
            const double d = norm_sq(q - p);
            if (d < best) {
                best = d;
                best_point = q;
                best_tri = i;
            }
        }
        if (tri_index) *tri_index = best_tri;
        return best_point;
    }

    double distance_to_surface(const Vec3& p) const {
        return distance(p, closest_surface_point(p));
    }

    /// Appends all triangles of `other` (used to merge obstacles into a
    /// collision scene).
    void append(const TriangleMesh& other) {
        const int base = static_cast<int>(vertices.size());
        vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
        for (const Triangle& t : other.triangles)
            triangles.push_back({t.v[0] + base, t.v[1] + base, t.v[2] + base});
        normals.insert(normals.end(), other.normals.begin(), other.normals.end());
    }
};

namespace detail {

inline bool file_looks_binary_stl(std::istream& in, std::uintmax_t file_size) {
    // A binary STL is 84 + 50*n bytes; an ASCII one starts with "solid" and
    // contains "facet". The header alone is not reliable, so check the size.
    char header[80] = {};
    in.read(header, 80);
    std::uint32_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 4);
    if (!in) return false;
    return file_size == 84 + static_cast<std::uintmax_t>(count) * 50;
}

inline TriangleMesh load_stl_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open mesh file: " + path);
    in.seekg(80);
    std::uint32_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 4);
    TriangleMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(count) * 3);
    mesh.triangles.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        float data[12];
        in.read(reinterpret_cast<char*>(data), sizeof(data));
        std::uint16_t attr = 0;
        in.read(reinterpret_cast<char*>(&attr), 2);
        if (!in) throw GeometryError("truncated binary STL: " + path);
        const int base = static_cast<int>(mesh.vertices.size());
        for (int k = 0; k < 3; ++k)
            mesh.vertices.push_back(Vec3(data[3 + 3 * k], data[4 + 3 * k], data[5 + 3 * k]));
        mesh.triangles.push_back({base, base + 1, base + 2});
    }
    return mesh;
}

inline TriangleMesh load_stl_ascii(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file: " + path);
    TriangleMesh mesh;
    std::string tok;
    std::vector<Vec3> verts;
    bool saw_solid = false;
    while (in >> tok) {
        if (tok == "solid") {
            saw_solid = true;
            std::string rest;
            std::getline(in, rest);
        } else if (tok == "vertex") {
            Vec3 v;
            if (!(in >> v.x >> v.y >> v.z))
                throw GeometryError("malformed STL vertex in " + path);
            verts.push_back(v);
        } else if (tok == "endfacet") {
            if (verts.size() != 3)
                throw GeometryError("STL facet without exactly 3 vertices in " + path);
            const int base = static_cast<int>(mesh.vertices.size());
            for (const Vec3& v : verts) mesh.vertices.push_back(v);
            mesh.triangles.push_back({base, base + 1, base + 2});
            verts.clear();
        }
    }
    if (!saw_solid) throw GeometryError("not an ASCII STL file: " + path);
    return mesh;
}

inline TriangleMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file: " + path);
    TriangleMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) throw GeometryError("malformed OBJ vertex: " + line);
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string ref;
            while (ls >> ref) {
                // "f v", "f v/vt", "f v/vt/vn", "f v//vn"; only the vertex
                // index matters here.
                const std::size_t slash = ref.find('/');
                const std::string head = slash == std::string::npos ? ref : ref.substr(0, slash);
                int vi = 0;
                try {
                    vi = std::stoi(head);
                } catch (const std::exception&) {
                    throw GeometryError("malformed OBJ face reference: " + line);
                }
                if (vi < 0) vi = static_cast<int>(mesh.vertices.size()) + vi + 1;
                idx.push_back(vi - 1);
            }
            if (idx.size() < 3) throw GeometryError("OBJ face with fewer than 3 vertices: " + line);
            for (std::size_t k = 1; k + 1 < idx.size(); ++k)
                mesh.triangles.push_back({idx[0], idx[static_cast<int>(k)], idx[k + 1]});
        }
    }
    return mesh;
}

}  // namespace detail

/// Loads an STL (binary or ASCII) or OBJ triangle mesh, validates it and
/// recomputes unit normals. The format is picked from the extension, with a
/// content sniff to separate binary from ASCII STL.
inline TriangleMesh load_mesh(const std::string& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw ConfigError("mesh file does not exist: " + path);
    std::string ext = fs::path(path).extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    TriangleMesh mesh;
    if (ext == ".obj") {
        mesh = detail::load_obj(path);
    } else if (ext == ".stl") {
        std::ifstream probe(path, std::ios::binary);
        if (detail::file_looks_binary_stl(probe, fs::file_size(path)))
            mesh = detail::load_stl_binary(path);
        else
            mesh = detail::load_stl_ascii(path);
    } else {
        throw ConfigError("unsupported mesh format '" + ext + "' (expected .stl or .obj): " + path);
    }
    mesh.validate_and_finalize();
    return mesh;
}

inline void write_stl_ascii(const TriangleMesh& mesh, const std::string& path,
                            const std::string& name = "part") {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write STL file: " + path);
    out << "solid " << name << "\n";
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto tv = mesh.triangle_vertices(i);
        const Vec3 n = mesh.normals.empty() ? normalized(cross(tv[1] - tv[0], tv[2] - tv[0]))
                                            : mesh.normals[i];
        out << "  facet normal " << n.x << " " << n.y << " " << n.z << "\n"
            << "    outer loop\n";
        for (const Vec3& v : tv) out << "      vertex " << v.x << " " << v.y << " " << v.z << "\n";
        out << "    endloop\n  endfacet\n";
    }
    out << "endsolid " << name << "\n";
}

}  // namespace scanplan
