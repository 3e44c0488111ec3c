#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "revec/errors.hpp"
#include "revec/mesh.hpp"
#include "revec/raster.hpp"
#include "revec/rbsm.hpp"
#include "revec/scene.hpp"

namespace revec {

/// One mesh placement. Either a file path or an inline mesh (builtins).
/// Transform order: scale, then rotation about x, y, z, then translation.
struct MeshInstance {
    std::string path;
    Mesh inline_mesh;
    Vec3 translate{0, 0, 0};
    Vec3 rotate_deg{0, 0, 0};
    double scale = 1.0;
};

struct SceneDesc {
    std::string name = "scene";
    std::vector<MeshInstance> meshes;
    CameraDesc camera;
    LightKind light_kind = LightKind::directional;
    Vec3 light_vector{0, -1, 0};  // direction (directional) or position (spot)
    int sm_width = 512;
    int sm_height = 512;
    Algorithm mode = Algorithm::sm;
    RbsmParams params;
};

namespace config_detail {

struct Line {
    int number;
    std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::istream& in) {
    std::vector<Line> lines;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.resize(hash);
        std::istringstream ls(raw);
        Line line{number, {}};
        std::string tok;
        while (ls >> tok) line.tokens.push_back(tok);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

inline double to_double(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": expected a number, got '" + s + "'");
    }
}

inline int to_int(const std::string& s, int line) {
    const double v = to_double(s, line);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ParseError("line " + std::to_string(line) + ": expected an integer, got '" + s + "'");
    return i;
}

inline Vec3 to_vec3(const Line& l) {
    if (l.tokens.size() != 4)
        throw ParseError("line " + std::to_string(l.number) + ": '" + l.tokens[0] +
                         "' needs 3 values");
    return {to_double(l.tokens[1], l.number), to_double(l.tokens[2], l.number),
            to_double(l.tokens[3], l.number)};
}

inline void require_values(const Line& l, std::size_t n) {
    if (l.tokens.size() != n + 1)
        throw ParseError("line " + std::to_string(l.number) + ": '" + l.tokens[0] + "' needs " +
                         std::to_string(n) + " value(s)");
}

}  // namespace config_detail

/// Block-style key/value scene config:
///   mesh { path cube.obj  translate 0 1 0  rotate_deg 0 30 0  scale 2 }
///   camera { position .. look_at .. up .. fov_deg .. resolution W H }
///   light { type directional|spot  vector x y z }
///   shadow_map { resolution W H }
///   params { mode sm  maxdist 16  bias 1e-4  pcf_kernel 1 }
/// Blocks may span lines; '#' starts a comment.
inline SceneDesc parse_scene_config(std::istream& in, const std::string& name = "config") {
    using namespace config_detail;
    SceneDesc desc;
    desc.name = name;
    desc.meshes.clear();

    const std::vector<Line> lines = tokenize(in);
    std::size_t i = 0;

    // Re-tokenize into a flat stream so "mesh {" and "mesh\n{" both work.
    std::vector<std::pair<int, std::string>> toks;
    for (const Line& l : lines)
        for (const std::string& t : l.tokens) toks.emplace_back(l.number, t);

    auto fail = [](int line, const std::string& msg) {
        throw ParseError("line " + std::to_string(line) + ": " + msg);
    };
    auto next = [&](const char* what) -> std::pair<int, std::string> {
        if (i >= toks.size())
            throw ParseError("unexpected end of config, expected " + std::string(what));
        return toks[i++];
    };
    auto next_double = [&](const char* what) {
        const auto [ln, t] = next(what);
        return to_double(t, ln);
    };
    auto next_int = [&](const char* what) {
        const auto [ln, t] = next(what);
        return to_int(t, ln);
    };
    auto next_vec3 = [&](const char* what) {
        Vec3 v;
        v.x = next_double(what);
        v.y = next_double(what);
        v.z = next_double(what);
        return v;
    };

    bool saw_camera = false, saw_light = false;
    while (i < toks.size()) {
        const auto [bline, block] = next("block name");
        const auto [oline, open] = next("'{'");
        if (open != "{") fail(oline, "expected '{' after '" + block + "'");

        if (block == "mesh") {
            MeshInstance inst;
            while (true) {
                const auto [ln, key] = next("mesh key or '}'");
                if (key == "}") break;
                if (key == "path") {
                    inst.path = next("path value").second;
                } else if (key == "translate") {
                    inst.translate = next_vec3("translate values");
                } else if (key == "rotate_deg") {
                    inst.rotate_deg = next_vec3("rotate_deg values");
                } else if (key == "scale") {
                    inst.scale = next_double("scale value");
                } else {
                    fail(ln, "unknown mesh key '" + key + "'");
                }
            }
            if (inst.path.empty()) fail(bline, "mesh block needs a path");
            desc.meshes.push_back(std::move(inst));
        } else if (block == "camera") {
            saw_camera = true;
            while (true) {
                const auto [ln, key] = next("camera key or '}'");
                if (key == "}") break;
                if (key == "position") desc.camera.position = next_vec3("position values");
                else if (key == "look_at") desc.camera.look_at = next_vec3("look_at values");
                else if (key == "up") desc.camera.up = next_vec3("up values");
                else if (key == "fov_deg") desc.camera.fov_deg = next_double("fov_deg value");
                else if (key == "resolution") {
                    desc.camera.width = next_int("resolution width");
                    desc.camera.height = next_int("resolution height");
                } else fail(ln, "unknown camera key '" + key + "'");
            }
        } else if (block == "light") {
            saw_light = true;
            while (true) {
                const auto [ln, key] = next("light key or '}'");
                if (key == "}") break;
                if (key == "type") {
                    const auto [tl, t] = next("light type");
                    if (t == "directional") desc.light_kind = LightKind::directional;
                    else if (t == "spot") desc.light_kind = LightKind::spot;
                    else fail(tl, "unknown light type '" + t + "'");
                } else if (key == "vector") {
                    desc.light_vector = next_vec3("light vector");
                } else fail(ln, "unknown light key '" + key + "'");
            }
        } else if (block == "shadow_map") {
            while (true) {
                const auto [ln, key] = next("shadow_map key or '}'");
                if (key == "}") break;
                if (key == "resolution") {
                    desc.sm_width = next_int("shadow map width");
                    desc.sm_height = next_int("shadow map height");
                } else fail(ln, "unknown shadow_map key '" + key + "'");
            }
        } else if (block == "params") {
            while (true) {
                const auto [ln, key] = next("params key or '}'");
                if (key == "}") break;
                if (key == "mode") desc.mode = parse_algorithm(next("mode name").second);
                else if (key == "maxdist") desc.params.maxdist = next_int("maxdist value");
                else if (key == "bias") desc.params.depth_bias = next_double("bias value");
                else if (key == "pcf_kernel") desc.params.pcf_kernel = next_int("pcf_kernel value");
                else fail(ln, "unknown params key '" + key + "'");
            }
        } else {
            fail(bline, "unknown block '" + block + "'");
        }
    }

    if (desc.meshes.empty()) throw ParseError(name + ": config defines no mesh");
    if (!saw_camera) throw ParseError(name + ": config defines no camera");
    if (!saw_light) throw ParseError(name + ": config defines no light");
    desc.params.validate();
    return desc;
}

inline SceneDesc load_scene_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene config: " + path);
    return parse_scene_config(in, path);
}

namespace config_detail {

inline void add_quad(Mesh& m, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const std::uint32_t base = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back(a);
    m.vertices.push_back(b);
    m.vertices.push_back(c);
    m.vertices.push_back(d);
    m.triangles.push_back({base, base + 1, base + 2});
    m.triangles.push_back({base, base + 2, base + 3});
}

inline Mesh ground_quad(double half) {
    Mesh m;
    add_quad(m, {-half, 0.0, -half}, {half, 0.0, -half}, {half, 0.0, half}, {-half, 0.0, half});
    return m;
}

}  // namespace config_detail

/// Procedural acceptance scenes, generated in code so tests need no assets.
/// Names: staircase, bar-grid, fence-like.
inline SceneDesc builtin_scene_desc(const std::string& name) {
    using config_detail::add_quad;
    using config_detail::ground_quad;
    SceneDesc desc;
    desc.name = name;

    if (name == "staircase") {
        // One straight blocker edge, slightly rotated off the shadow map
        // axes, hovering over a ground plane.
        MeshInstance ground;
        ground.inline_mesh = ground_quad(5.2);
        desc.meshes.push_back(std::move(ground));

        const double ang = 0.21;
        const Vec3 d{std::cos(ang), 0.0, std::sin(ang)};
        const Vec3 n{-std::sin(ang), 0.0, std::cos(ang)};
        const double y = 2.03, len = 5.9, depth = 6.3;
        MeshInstance blocker;
        Mesh bm;
        add_quad(bm, {len * d.x, y, len * d.z}, {-len * d.x, y, -len * d.z},
                 {-len * d.x - depth * n.x, y, -len * d.z - depth * n.z},
                 {len * d.x - depth * n.x, y, len * d.z - depth * n.z});
        blocker.inline_mesh = std::move(bm);
        desc.meshes.push_back(std::move(blocker));

        desc.light_vector = {0.0, -1.0, 0.0};
        desc.camera.position = {0.013, 6.1, 6.2};
        desc.camera.look_at = {0.0, 0.0, 0.01};
        desc.camera.fov_deg = 30.0;
        desc.camera.width = 1024;
        desc.camera.height = 1024;
        desc.sm_width = 256;
        desc.sm_height = 256;
        desc.params.depth_bias = 1e-4;
        return desc;
    }

    if (name == "bar-grid") {
        MeshInstance ground;
        ground.inline_mesh = ground_quad(5.2);
        desc.meshes.push_back(std::move(ground));

        const double ang = 0.37;
        const Vec3 d{std::cos(ang), 0.0, std::sin(ang)};
        const Vec3 n{-std::sin(ang), 0.0, std::cos(ang)};
        const double y = 1.52, len = 4.6, half_w = 0.3, spacing = 1.1;
        Mesh bars;
        for (int i = 0; i < 4; ++i) {
            const double off = (i - 1.5) * spacing;
            const Vec3 c = n * off;
            Vec3 q[4] = {c + d * len + n * half_w, c - d * len + n * half_w,
                         c - d * len - n * half_w, c + d * len - n * half_w};
            for (Vec3& v : q) v.y = y;
            add_quad(bars, q[0], q[1], q[2], q[3]);
        }
        MeshInstance bars_inst;
        bars_inst.inline_mesh = std::move(bars);
        desc.meshes.push_back(std::move(bars_inst));

        desc.light_vector = {0.23, -1.0, 0.11};
        desc.camera.position = {0.41, 5.0, 3.4};
        desc.camera.look_at = {0.0, 0.0, 0.0};
        desc.camera.fov_deg = 40.0;
        desc.camera.width = 1024;
        desc.camera.height = 1024;
        desc.sm_width = 512;
        desc.sm_height = 512;
        desc.params.depth_bias = 3e-3;
        return desc;
    }

    if (name == "fence-like") {
        MeshInstance ground;
        ground.inline_mesh = ground_quad(5.2);
        desc.meshes.push_back(std::move(ground));

        const double ang = 0.12;
        const Vec3 ux{std::cos(ang), 0.0, std::sin(ang)};   // along the fence
        const Vec3 uz{-std::sin(ang), 0.0, std::cos(ang)};  // slat thickness
        Mesh fence;
        const double slat_hw = 0.3, slat_h = 1.7, slat_spacing = 0.8;
        for (int i = 0; i < 5; ++i) {
            const double off = (i - 2) * slat_spacing;
            const Vec3 c = ux * off;
            const Vec3 a = c - ux * slat_hw;
            const Vec3 b = c + ux * slat_hw;
            add_quad(fence, {a.x, 0.0, a.z}, {b.x, 0.0, b.z}, {b.x, slat_h, b.z},
                     {a.x, slat_h, a.z});
        }
        const double rail_len = 2.3, rail_hh = 0.06;
        for (double rail_y : {0.55, 1.25}) {
            const Vec3 a = ux * -rail_len;
            const Vec3 b = ux * rail_len;
            const Vec3 o = uz * 0.05;
            add_quad(fence, {a.x + o.x, rail_y - rail_hh, a.z + o.z},
                     {b.x + o.x, rail_y - rail_hh, b.z + o.z},
                     {b.x + o.x, rail_y + rail_hh, b.z + o.z},
                     {a.x + o.x, rail_y + rail_hh, a.z + o.z});
        }
        MeshInstance fence_inst;
        fence_inst.inline_mesh = std::move(fence);
        desc.meshes.push_back(std::move(fence_inst));

        desc.light_vector = {0.3, -0.5, -1.5};
        desc.camera.position = {0.3, 6.5, 1.8};
        desc.camera.look_at = {0.0, 0.0, -2.6};
        desc.camera.fov_deg = 40.0;
        desc.camera.width = 1024;
        desc.camera.height = 1024;
        desc.sm_width = 512;
        desc.sm_height = 512;
        desc.params.depth_bias = 8e-3;
        return desc;
    }

    throw ValidationError("unknown builtin scene '" + name +
                          "' (valid: staircase, bar-grid, fence-like)");
}

namespace config_detail {

inline Mat4 instance_transform(const MeshInstance& inst) {
    const double to_rad = 3.14159265358979323846 / 180.0;
    const double ax = inst.rotate_deg.x * to_rad;
    const double ay = inst.rotate_deg.y * to_rad;
    const double az = inst.rotate_deg.z * to_rad;
    Mat4 s = Mat4::identity();
    s.at(0, 0) = s.at(1, 1) = s.at(2, 2) = inst.scale;
    Mat4 rx = Mat4::identity();
    rx.at(1, 1) = std::cos(ax);
    rx.at(1, 2) = -std::sin(ax);
    rx.at(2, 1) = std::sin(ax);
    rx.at(2, 2) = std::cos(ax);
    Mat4 ry = Mat4::identity();
    ry.at(0, 0) = std::cos(ay);
    ry.at(0, 2) = std::sin(ay);
    ry.at(2, 0) = -std::sin(ay);
    ry.at(2, 2) = std::cos(ay);
    Mat4 rz = Mat4::identity();
    rz.at(0, 0) = std::cos(az);
    rz.at(0, 1) = -std::sin(az);
    rz.at(1, 0) = std::sin(az);
    rz.at(1, 1) = std::cos(az);
    Mat4 t = Mat4::identity();
    t.at(0, 3) = inst.translate.x;
    t.at(1, 3) = inst.translate.y;
    t.at(2, 3) = inst.translate.z;
    return t.mul(rz.mul(ry.mul(rx.mul(s))));
}

}  // namespace config_detail

/// Loads instance meshes, applies transforms, merges into one soup, then
/// fits the light and builds the camera against the merged bounds.
inline Scene build_scene(const SceneDesc& desc) {
    Scene scene;
    for (const MeshInstance& inst : desc.meshes) {
        Mesh m = inst.path.empty() ? inst.inline_mesh : load_mesh(inst.path);
        const Mat4 xf = config_detail::instance_transform(inst);
        for (Vec3& v : m.vertices) v = xf.mul_point(v);
        scene.world.append(m);
    }
    scene.world.validate();
    const Aabb bounds = scene.world.bounds();
    scene.light = fit_light_to_scene(desc.light_kind, desc.light_vector, bounds);
    scene.camera = build_camera(desc.camera, bounds);
    return scene;
}

}  // namespace revec
