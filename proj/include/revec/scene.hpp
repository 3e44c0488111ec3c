#pragma once

#include <cmath>
#include <string>

#include "revec/errors.hpp"
#include "revec/mesh.hpp"
#include "revec/vec.hpp"

namespace revec {

struct Camera {
    Vec3 position;
    Mat4 view_projection;  // world -> clip; ndc x,y in [-1,1], z in [0,1] after divide
    int width = 1;
    int height = 1;

    void validate() const {
        if (width < 1 || height < 1) throw ValidationError("camera resolution must be >= 1");
        if (view_projection.determinant() == 0.0)
            throw ValidationError("camera view-projection is singular");
    }
};

enum class LightKind { directional, spot };

struct Light {
    LightKind kind = LightKind::directional;
    Mat4 view_projection;  // world -> light clip; ndc x,y in [-1,1], z in [0,1] after divide
    Vec3 position_or_direction;  // direction for directional, position for spot

    void validate() const {
        if (view_projection.determinant() == 0.0)
            throw ValidationError("light view-projection is singular");
    }
};

namespace detail {

inline Vec3 light_space_up(const Vec3& forward) {
    return std::abs(forward.y) > 0.99 ? Vec3{0.0, 0.0, 1.0} : Vec3{0.0, 1.0, 0.0};
}

struct Basis {
    Vec3 right, up, forward;
};

inline Basis make_basis(const Vec3& forward_in, const Vec3& up_hint) {
    Basis b;
    b.forward = normalized(forward_in);
    b.right = normalized(cross(b.forward, up_hint));
    b.up = cross(b.right, b.forward);
    return b;
}

}  // namespace detail

/// Fits a light to the scene bounds so that every corner lands in ndc
/// [-1,1]^2 x [0,1] with a 2% margin per side.
inline Light fit_light_to_scene(LightKind kind, const Vec3& direction_or_position,
                                const Aabb& bounds, double margin = 0.02) {
    if (bounds.empty() || bounds.diagonal() == 0.0)
        throw ValidationError("cannot fit light to empty scene bounds");

    Light light;
    light.kind = kind;
    light.position_or_direction = direction_or_position;

    if (kind == LightKind::directional) {
        const detail::Basis b =
            detail::make_basis(direction_or_position, detail::light_space_up(normalized(direction_or_position)));
        double sx_min = 0, sx_max = 0, sy_min = 0, sy_max = 0, sz_min = 0, sz_max = 0;
        bool first = true;
        for (const Vec3& c : bounds.corners()) {
            const double sx = dot(b.right, c);
            const double sy = dot(b.up, c);
            const double sz = dot(b.forward, c);
            if (first) {
                sx_min = sx_max = sx;
                sy_min = sy_max = sy;
                sz_min = sz_max = sz;
                first = false;
            } else {
                sx_min = std::min(sx_min, sx);
                sx_max = std::max(sx_max, sx);
                sy_min = std::min(sy_min, sy);
                sy_max = std::max(sy_max, sy);
                sz_min = std::min(sz_min, sz);
                sz_max = std::max(sz_max, sz);
            }
        }
        const double scale = 1.0 + margin;
        const double cx = (sx_min + sx_max) * 0.5;
        const double cy = (sy_min + sy_max) * 0.5;
        const double hx = std::max((sx_max - sx_min) * 0.5 * scale, 1e-9);
        const double hy = std::max((sy_max - sy_min) * 0.5 * scale, 1e-9);
        const double zm = std::max((sz_max - sz_min) * margin, 1e-9);
        const double z0 = sz_min - zm;
        const double dz = (sz_max - sz_min) + 2.0 * zm;

        Mat4& m = light.view_projection;
        m = Mat4::identity();
        m.at(0, 0) = b.right.x / hx;
        m.at(0, 1) = b.right.y / hx;
        m.at(0, 2) = b.right.z / hx;
        m.at(0, 3) = -cx / hx;
        m.at(1, 0) = b.up.x / hy;
        m.at(1, 1) = b.up.y / hy;
        m.at(1, 2) = b.up.z / hy;
        m.at(1, 3) = -cy / hy;
        m.at(2, 0) = b.forward.x / dz;
        m.at(2, 1) = b.forward.y / dz;
        m.at(2, 2) = b.forward.z / dz;
        m.at(2, 3) = -z0 / dz;
        m.at(3, 0) = m.at(3, 1) = m.at(3, 2) = 0.0;
        m.at(3, 3) = 1.0;
        return light;
    }

    // Spot: perspective frustum from the light position aimed at the bounds center.
    const Vec3 pos = direction_or_position;
    const Vec3 center = (bounds.min + bounds.max) * 0.5;
    const Vec3 to_center = center - pos;
    if (length(to_center) == 0.0) throw ValidationError("spot light placed at scene center");
    const detail::Basis b =
        detail::make_basis(to_center, detail::light_space_up(normalized(to_center)));

    double tan_max = 0.0, z_min = std::numeric_limits<double>::infinity(), z_max = 0.0;
    for (const Vec3& c : bounds.corners()) {
        const Vec3 d = c - pos;
        const double z = dot(b.forward, d);
        if (z <= 0.0) throw ValidationError("spot light lies inside or behind the scene bounds");
        tan_max = std::max(tan_max, std::max(std::abs(dot(b.right, d)), std::abs(dot(b.up, d))) / z);
        z_min = std::min(z_min, z);
        z_max = std::max(z_max, z);
    }
    const double t = tan_max * (1.0 + margin);
    const double near = z_min * (1.0 - margin);
    const double far = z_max * (1.0 + margin);
    const double s = 1.0 / t;

    Mat4& m = light.view_projection;
    for (int j = 0; j < 4; ++j) {
        m.at(0, j) = 0.0;
        m.at(1, j) = 0.0;
        m.at(2, j) = 0.0;
        m.at(3, j) = 0.0;
    }
    // x_clip = s * right . (P - pos), y_clip likewise, w = forward . (P - pos)
    // z_clip/w in [0,1]: z_clip = (far*(z - near)) / (far - near)
    auto set_row = [&](int row, const Vec3& axis, double scale_row) {
        m.at(row, 0) = axis.x * scale_row;
        m.at(row, 1) = axis.y * scale_row;
        m.at(row, 2) = axis.z * scale_row;
        m.at(row, 3) = -dot(axis, pos) * scale_row;
    };
    set_row(0, b.right, s);
    set_row(1, b.up, s);
    const double a = far / (far - near);
    set_row(2, b.forward, a);
    m.at(2, 3) += -a * near;
    set_row(3, b.forward, 1.0);
    return light;
}

/// Light-space position in ndc form: x,y in [-1,1] inside the frustum, z in [0,1].
inline Vec3 light_ndc(const Vec3& world, const Light& light) {
    const Vec4 c = light.view_projection.mul(world);
    if (light.kind == LightKind::directional) return {c.x, c.y, c.z};
    return {c.x / c.w, c.y / c.w, c.z / c.w};
}

/// Shadow-map texture coordinate form: x,y in [0,1] inside the frustum, z in [0,1].
inline Vec3 project_to_light(const Vec3& world, const Light& light) {
    const Vec3 n = light_ndc(world, light);
    return {0.5 * n.x + 0.5, 0.5 * n.y + 0.5, n.z};
}

struct CameraDesc {
    Vec3 position{0, 0, 5};
    Vec3 look_at{0, 0, 0};
    Vec3 up{0, 1, 0};
    double fov_deg = 40.0;
    int width = 512;
    int height = 512;
};

/// Perspective camera; near/far planes are fitted to the scene bounds.
inline Camera build_camera(const CameraDesc& desc, const Aabb& scene_bounds) {
    if (desc.width < 1 || desc.height < 1) throw ValidationError("camera resolution must be >= 1");
    const Vec3 fwd = desc.look_at - desc.position;
    if (length(fwd) == 0.0) throw ValidationError("camera position equals look_at");
    Vec3 up_hint = desc.up;
    if (length(up_hint) == 0.0 || length(cross(normalized(fwd), normalized(up_hint))) < 1e-9)
        up_hint = detail::light_space_up(normalized(fwd));
    const detail::Basis b = detail::make_basis(fwd, up_hint);

    double z_far_fit = 0.0;
    for (const Vec3& c : scene_bounds.corners())
        z_far_fit = std::max(z_far_fit, dot(b.forward, c - desc.position));
    const double far = std::max(z_far_fit * 1.1, 1.0);
    const double near = far * 1e-3;

    const double tan_half = std::tan(desc.fov_deg * (3.14159265358979323846 / 360.0));
    const double sy = 1.0 / tan_half;
    const double sx = sy * static_cast<double>(desc.height) / static_cast<double>(desc.width);

    Camera cam;
    cam.position = desc.position;
    cam.width = desc.width;
    cam.height = desc.height;
    Mat4& m = cam.view_projection;
    auto set_row = [&](int row, const Vec3& axis, double scale_row, double translate_extra) {
        m.at(row, 0) = axis.x * scale_row;
        m.at(row, 1) = axis.y * scale_row;
        m.at(row, 2) = axis.z * scale_row;
        m.at(row, 3) = -dot(axis, desc.position) * scale_row + translate_extra;
    };
    set_row(0, b.right, sx, 0.0);
    set_row(1, b.up, sy, 0.0);
    const double a = far / (far - near);
    set_row(2, b.forward, a, -a * near);
    set_row(3, b.forward, 1.0, 0.0);
    cam.validate();
    return cam;
}

/// A fully assembled world: one triangle soup plus camera and light.
struct Scene {
    Mesh world;
    Camera camera;
    Light light;

    Aabb bounds() const { return world.bounds(); }
};

}  // namespace revec
