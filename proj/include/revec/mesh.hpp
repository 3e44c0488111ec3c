#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "revec/errors.hpp"
#include "revec/vec.hpp"

namespace revec {

struct Triangle {
    std::uint32_t a = 0, b = 0, c = 0;
};

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;

    Aabb bounds() const {
        Aabb box;
        for (const Vec3& v : vertices) box.extend(v);
        return box;
    }

    void validate() const {
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (!finite(vertices[i]))
                throw ValidationError("mesh vertex " + std::to_string(i) + " is not finite");
        }
        for (std::size_t i = 0; i < triangles.size(); ++i) {
            const Triangle& t = triangles[i];
            for (std::uint32_t idx : {t.a, t.b, t.c}) {
                if (idx >= vertices.size())
                    throw ValidationError("triangle " + std::to_string(i) +
                                          " references vertex " + std::to_string(idx) +
                                          " but mesh has " + std::to_string(vertices.size()) +
                                          " vertices");
            }
        }
    }

    void append(const Mesh& other) {
        const std::uint32_t base = static_cast<std::uint32_t>(vertices.size());
        vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
        for (const Triangle& t : other.triangles)
            triangles.push_back({t.a + base, t.b + base, t.c + base});
    }
};

namespace detail {

// "3", "3/1", "3//2", "3/1/2" -> vertex index. Negative indices count from the end.
inline long obj_vertex_index(const std::string& token, std::size_t vertex_count, int line_no) {
    std::string head = token.substr(0, token.find('/'));
    long idx = 0;
    try {
        std::size_t pos = 0;
        idx = std::stol(head, &pos);
        if (pos != head.size()) throw std::invalid_argument(head);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad face index '" + token + "'");
    }
    if (idx < 0) idx = static_cast<long>(vertex_count) + idx + 1;
    if (idx < 1 || idx > static_cast<long>(vertex_count))
        throw ValidationError("line " + std::to_string(line_no) + ": face index " + token +
                              " out of range (mesh has " + std::to_string(vertex_count) +
                              " vertices)");
    return idx - 1;
}

}  // namespace detail

/// Wavefront OBJ subset: `v` and `f` records. Polygons are fan-triangulated
/// in file order; normals, texcoords and materials are ignored.
inline Mesh load_obj(std::istream& in, const std::string& name = "<stream>") {
    Mesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z))
                throw ParseError(name + ": line " + std::to_string(line_no) +
                                 ": malformed vertex record");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<long> idx;
            std::string token;
            while (ls >> token)
                idx.push_back(detail::obj_vertex_index(token, mesh.vertices.size(), line_no));
            if (idx.size() < 3)
                throw ParseError(name + ": line " + std::to_string(line_no) +
                                 ": face needs at least 3 vertices");
            for (std::size_t i = 1; i + 1 < idx.size(); ++i)
                mesh.triangles.push_back({static_cast<std::uint32_t>(idx[0]),
                                          static_cast<std::uint32_t>(idx[i]),
                                          static_cast<std::uint32_t>(idx[i + 1])});
        }
        // Other records (vn, vt, o, g, usemtl, s, mtllib) are ignored.
    }
    mesh.validate();
    return mesh;
}

inline Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file: " + path);
    return load_obj(in, path);
}

}  // namespace revec
