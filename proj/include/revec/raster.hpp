#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "revec/errors.hpp"
#include "revec/image.hpp"
#include "revec/rbsm.hpp"
#include "revec/scene.hpp"
#include "revec/shadow_map.hpp"

namespace revec {

/// Per-pixel fragment data from the camera pass. light_p is the fragment's
/// light-space position in ndc form (x,y in [-1,1], z in [0,1]).
struct GBufferPixel {
    bool covered = false;
    Vec3 world;
    Vec3 normal;  // geometric triangle normal
    Vec3 light_p;
};

struct GBuffer {
    int width = 0;
    int height = 0;
    std::vector<GBufferPixel> pixels;

    GBuffer() = default;
    GBuffer(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h) {
        if (w < 1 || h < 1) throw ValidationError("gbuffer resolution must be >= 1");
    }

    GBufferPixel& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    const GBufferPixel& at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

enum class Algorithm { sm, rbsm_recovery, rbsm_filter, pcf };

inline Algorithm parse_algorithm(const std::string& name) {
    if (name == "sm") return Algorithm::sm;
    if (name == "rbsm_recovery") return Algorithm::rbsm_recovery;
    if (name == "rbsm_filter") return Algorithm::rbsm_filter;
    if (name == "pcf") return Algorithm::pcf;
    throw ValidationError("unknown algorithm '" + name +
                          "' (valid: sm, rbsm_recovery, rbsm_filter, pcf)");
}

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::sm: return "sm";
        case Algorithm::rbsm_recovery: return "rbsm_recovery";
        case Algorithm::rbsm_filter: return "rbsm_filter";
        case Algorithm::pcf: return "pcf";
    }
    return "?";
}

/// Visibility value written to pixels nothing was rasterized to.
inline constexpr double kBackgroundVisibility = 0.25;

namespace raster_detail {

// Pixel centers in ndc. Integer numerators keep reflected pixel pairs at
// exactly negated coordinates.
inline double pixel_center_x(int ix, int w) { return static_cast<double>(2 * ix + 1 - w) / w; }
inline double pixel_center_y(int iy, int h) { return static_cast<double>(h - 1 - 2 * iy) / h; }

inline double edge(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Top-left fill rule for y-up ndc with counter-clockwise winding: a
// boundary pixel belongs to the triangle whose edge descends (left edge)
// or runs horizontally right-to-left (top edge).
inline bool edge_accepts(double e, double ax, double ay, double bx, double by) {
    if (e > 0.0) return true;
    if (e < 0.0) return false;
    return (by < ay) || (by == ay && bx < ax);
}

struct ClipVertex {
    Vec4 clip;
    Vec3 world;
};

// Sutherland-Hodgman in homogeneous space against w >= w_min and z >= 0.
inline int clip_triangle(const ClipVertex* in, int n, ClipVertex* out, double w_min) {
    ClipVertex buf[8];
    auto clip_plane = [](const ClipVertex* src, int cnt, ClipVertex* dst, auto dist) {
        int m = 0;
        for (int i = 0; i < cnt; ++i) {
            const ClipVertex& a = src[i];
            const ClipVertex& b = src[(i + 1) % cnt];
            const double da = dist(a), db = dist(b);
            if (da >= 0.0) dst[m++] = a;
            if ((da >= 0.0) != (db >= 0.0)) {
                const double t = da / (da - db);
                ClipVertex v;
                v.clip = {a.clip.x + t * (b.clip.x - a.clip.x), a.clip.y + t * (b.clip.y - a.clip.y),
                          a.clip.z + t * (b.clip.z - a.clip.z), a.clip.w + t * (b.clip.w - a.clip.w)};
                v.world = a.world + (b.world - a.world) * t;
                dst[m++] = v;
            }
        }
        return m;
    };
    int n1 = clip_plane(in, n, buf, [&](const ClipVertex& v) { return v.clip.w - w_min; });
    if (n1 < 3) return 0;
    int n2 = clip_plane(buf, n1, out, [](const ClipVertex& v) { return v.clip.z; });
    return n2 < 3 ? 0 : n2;
}

}  // namespace raster_detail

/// Depth-only light pass: per texel, the minimum normalized depth of all
/// covered triangles, 1.0 where nothing projects. Samples sit at texel
/// x centers on the +y texel edge; deterministic for identical inputs.
inline ShadowMap rasterize_depth(const Mesh& world, const Light& light, int width, int height) {
    using namespace raster_detail;
    ShadowMap sm(width, height);
    sm.light_view_projection = light.view_projection;

    for (const Triangle& tri : world.triangles) {
        Vec3 v[3];
        bool behind = false;
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t idx = k == 0 ? tri.a : (k == 1 ? tri.b : tri.c);
            const Vec4 c = light.view_projection.mul(world.vertices[idx]);
            if (c.w <= 0.0) {
                behind = true;
                break;
            }
            v[k] = {c.x / c.w, c.y / c.w, c.z / c.w};
        }
        if (behind) continue;  // fitted lights enclose the scene; skip degenerate input

        double area = edge(v[0].x, v[0].y, v[1].x, v[1].y, v[2].x, v[2].y);
        if (area == 0.0) continue;
        double sgn = 1.0;
        if (area < 0.0) {
            sgn = -1.0;
            area = -area;
        }

        const double min_x = std::min({v[0].x, v[1].x, v[2].x});
        const double max_x = std::max({v[0].x, v[1].x, v[2].x});
        const double min_y = std::min({v[0].y, v[1].y, v[2].y});
        const double max_y = std::max({v[0].y, v[1].y, v[2].y});
        if (max_x < -1.0 || min_x > 1.0 || max_y < -1.0 || min_y > 1.0) continue;
        const int ix0 = std::max(0, static_cast<int>(std::floor((min_x * 0.5 + 0.5) * width)) - 1);
        const int ix1 = std::min(width - 1, static_cast<int>(std::ceil((max_x * 0.5 + 0.5) * width)) + 1);
        const int iy0 = std::max(0, static_cast<int>(std::floor((min_y * 0.5 + 0.5) * height)) - 2);
        const int iy1 = std::min(height - 1, static_cast<int>(std::ceil((max_y * 0.5 + 0.5) * height)) + 1);

        for (int iy = iy0; iy <= iy1; ++iy) {
            // Row 0 sits at ndc y = -1. Depth is sampled at the texel's +y
            // edge midpoint rather than its center: the shadow edge tips this
            // produces lie on the true silhouette, so the revectorized line
            // joining them reconstructs the silhouette without a half-texel
            // offset.
            const double py = static_cast<double>(2 * iy + 2 - height) / height;
            for (int ix = ix0; ix <= ix1; ++ix) {
                const double px = pixel_center_x(ix, width);
                const double e0 = sgn * edge(v[1].x, v[1].y, v[2].x, v[2].y, px, py);
                const double e1 = sgn * edge(v[2].x, v[2].y, v[0].x, v[0].y, px, py);
                const double e2 = sgn * edge(v[0].x, v[0].y, v[1].x, v[1].y, px, py);
                const bool inside =
                    (sgn > 0.0
                         ? edge_accepts(e0, v[1].x, v[1].y, v[2].x, v[2].y) &&
                               edge_accepts(e1, v[2].x, v[2].y, v[0].x, v[0].y) &&
                               edge_accepts(e2, v[0].x, v[0].y, v[1].x, v[1].y)
                         : edge_accepts(e0, v[2].x, v[2].y, v[1].x, v[1].y) &&
                               edge_accepts(e1, v[0].x, v[0].y, v[2].x, v[2].y) &&
                               edge_accepts(e2, v[1].x, v[1].y, v[0].x, v[0].y));
                if (!inside) continue;
                const double w0 = e0 / area, w1 = e1 / area, w2 = e2 / area;
                const double z = w0 * v[0].z + w1 * v[1].z + w2 * v[2].z;
                const float zf = static_cast<float>(std::clamp(z, 0.0, 1.0));
                if (zf < sm.at(ix, iy)) sm.at(ix, iy) = zf;
            }
        }
    }
    return sm;
}

/// Camera pass: nearest surface per pixel with perspective-correct world
/// position, plus its light-space projection.
inline GBuffer rasterize_camera(const Mesh& world, const Camera& camera, const Light& light) {
    using namespace raster_detail;
    const int width = camera.width, height = camera.height;
    GBuffer gb(width, height);
    std::vector<double> zbuf(static_cast<std::size_t>(width) * height,
                             std::numeric_limits<double>::infinity());

    for (const Triangle& tri : world.triangles) {
        ClipVertex cv[3];
        const std::uint32_t idx[3] = {tri.a, tri.b, tri.c};
        for (int k = 0; k < 3; ++k) {
            cv[k].world = world.vertices[idx[k]];
            cv[k].clip = camera.view_projection.mul(cv[k].world);
        }
        const Vec3 n = cross(cv[1].world - cv[0].world, cv[2].world - cv[0].world);
        if (length(n) == 0.0) continue;
        const Vec3 normal = normalized(n);

        ClipVertex poly[8];
        const int npoly = clip_triangle(cv, 3, poly, 1e-9);
        for (int f = 1; f + 1 < npoly; ++f) {
            const ClipVertex* t[3] = {&poly[0], &poly[f], &poly[f + 1]};
            Vec3 v[3];
            double wc[3];
            for (int k = 0; k < 3; ++k) {
                wc[k] = t[k]->clip.w;
                v[k] = {t[k]->clip.x / wc[k], t[k]->clip.y / wc[k], t[k]->clip.z / wc[k]};
            }
            double area = edge(v[0].x, v[0].y, v[1].x, v[1].y, v[2].x, v[2].y);
            if (area == 0.0) continue;
            double sgn = 1.0;
            if (area < 0.0) {
                sgn = -1.0;
                area = -area;
            }

            const double min_x = std::min({v[0].x, v[1].x, v[2].x});
            const double max_x = std::max({v[0].x, v[1].x, v[2].x});
            const double min_y = std::min({v[0].y, v[1].y, v[2].y});
            const double max_y = std::max({v[0].y, v[1].y, v[2].y});
            if (max_x < -1.0 || min_x > 1.0 || max_y < -1.0 || min_y > 1.0) continue;
            const int ix0 =
                std::max(0, static_cast<int>(std::floor((min_x * 0.5 + 0.5) * width)) - 1);
            const int ix1 = std::min(width - 1,
                                     static_cast<int>(std::ceil((max_x * 0.5 + 0.5) * width)) + 1);
            // Image row 0 is at ndc y near +1.
            const int iy0 = std::max(
                0, height - 1 - static_cast<int>(std::ceil((max_y * 0.5 + 0.5) * height)) - 1);
            const int iy1 = std::min(
                height - 1,
                height - 1 - static_cast<int>(std::floor((min_y * 0.5 + 0.5) * height)) + 1);

            for (int iy = iy0; iy <= iy1; ++iy) {
                const double py = pixel_center_y(iy, height);
                for (int ix = ix0; ix <= ix1; ++ix) {
                    const double px = pixel_center_x(ix, width);
                    const double e0 = sgn * edge(v[1].x, v[1].y, v[2].x, v[2].y, px, py);
                    const double e1 = sgn * edge(v[2].x, v[2].y, v[0].x, v[0].y, px, py);
                    const double e2 = sgn * edge(v[0].x, v[0].y, v[1].x, v[1].y, px, py);
                    const bool inside =
                        (sgn > 0.0
                             ? edge_accepts(e0, v[1].x, v[1].y, v[2].x, v[2].y) &&
                                   edge_accepts(e1, v[2].x, v[2].y, v[0].x, v[0].y) &&
                                   edge_accepts(e2, v[0].x, v[0].y, v[1].x, v[1].y)
                             : edge_accepts(e0, v[2].x, v[2].y, v[1].x, v[1].y) &&
                                   edge_accepts(e1, v[0].x, v[0].y, v[2].x, v[2].y) &&
                                   edge_accepts(e2, v[1].x, v[1].y, v[0].x, v[0].y));
                    if (!inside) continue;
                    const double l0 = e0 / area, l1 = e1 / area, l2 = e2 / area;
                    const double z = l0 * v[0].z + l1 * v[1].z + l2 * v[2].z;
                    double& zstored = zbuf[static_cast<std::size_t>(iy) * width + ix];
                    if (!(z < zstored)) continue;
                    zstored = z;

                    const double q0 = l0 / wc[0], q1 = l1 / wc[1], q2 = l2 / wc[2];
                    const double qs = q0 + q1 + q2;
                    const double p0 = q0 / qs, p1 = q1 / qs, p2 = q2 / qs;
                    GBufferPixel& px_out = gb.at(ix, iy);
                    px_out.covered = true;
                    px_out.world = {
                        p0 * t[0]->world.x + p1 * t[1]->world.x + p2 * t[2]->world.x,
                        p0 * t[0]->world.y + p1 * t[1]->world.y + p2 * t[2]->world.y,
                        p0 * t[0]->world.z + p1 * t[1]->world.z + p2 * t[2]->world.z};
                    px_out.normal = normal;
                    px_out.light_p = light_ndc(px_out.world, light);
                }
            }
        }
    }
    return gb;
}

namespace raster_detail {

inline double shade_pixel(const GBufferPixel& px, const ShadowMap& sm, Algorithm algorithm,
                          const RbsmParams& params) {
    switch (algorithm) {
        case Algorithm::sm: {
            const int ix = sm.index_x(px.light_p.x);
            const int iy = sm.index_y(px.light_p.y);
            return shadow_test(px.light_p.z, sm.fetch(ix, iy), params.depth_bias);
        }
        case Algorithm::pcf:
            return pcf(sm, px.light_p, params.pcf_kernel, params.depth_bias);
        case Algorithm::rbsm_recovery: {
            RbsmParams p = params;
            p.mode = RbsmMode::recovery;
            return rbsm_shade(sm, px.light_p, p);
        }
        case Algorithm::rbsm_filter: {
            RbsmParams p = params;
            p.mode = RbsmMode::filtering;
            return rbsm_shade(sm, px.light_p, p);
        }
    }
    throw ValidationError("unknown algorithm id");
}

// Kernel x kernel box blur over covered pixels; suppresses the skeleton
// artifacts of the filtering mode.
inline void pcf_post_filter(Image& img, const GBuffer& gb, int kernel) {
    const Image src = img;
    const int r = kernel / 2;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!gb.at(x, y).covered) continue;
            double sum = 0.0;
            int count = 0;
            for (int oy = -r; oy <= r; ++oy) {
                for (int ox = -r; ox <= r; ++ox) {
                    const int sx = x + ox, sy = y + oy;
                    if (sx < 0 || sx >= img.width || sy < 0 || sy >= img.height) continue;
                    if (!gb.at(sx, sy).covered) continue;
                    sum += src.at(sx, sy);
                    ++count;
                }
            }
            img.at(x, y) = sum / count;
        }
    }
}

}  // namespace raster_detail

/// Pure per-pixel map over the GBuffer; any thread count produces results
/// identical to sequential execution.
inline Image shade_image(const GBuffer& gb, const ShadowMap& sm, Algorithm algorithm,
                         const RbsmParams& params, int threads = 1) {
    params.validate();
    Image img(gb.width, gb.height);

    auto shade_rows = [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < gb.width; ++x) {
                const GBufferPixel& px = gb.at(x, y);
                img.at(x, y) = px.covered
                                   ? raster_detail::shade_pixel(px, sm, algorithm, params)
                                   : kBackgroundVisibility;
            }
        }
    };

    if (threads <= 1) {
        shade_rows(0, gb.height);
    } else {
        std::vector<std::thread> pool;
        const int n = std::min(threads, gb.height);
        for (int t = 0; t < n; ++t) {
            const int y0 = gb.height * t / n;
            const int y1 = gb.height * (t + 1) / n;
            pool.emplace_back(shade_rows, y0, y1);
        }
        for (std::thread& t : pool) t.join();
    }

    if (algorithm == Algorithm::rbsm_filter && params.pcf_kernel > 1)
        raster_detail::pcf_post_filter(img, gb, params.pcf_kernel);
    return img;
}

}  // namespace revec
