#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "revec/errors.hpp"
#include "revec/image.hpp"
#include "revec/raster.hpp"
#include "revec/scene.hpp"

namespace revec {

namespace oracle_detail {

/// Moller-Trumbore in double precision. Hits strictly inside (t_min, t_max).
inline bool ray_hits_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                              const Vec3& c, double t_min, double t_max) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 pvec = cross(dir, e2);
    const double det = dot(e1, pvec);
    if (det == 0.0) return false;
    const double inv_det = 1.0 / det;
    const Vec3 tvec = origin - a;
    const double u = dot(tvec, pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 qvec = cross(tvec, e1);
    const double v = dot(dir, qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return false;
    const double t = dot(e2, qvec) * inv_det;
    return t > t_min && t < t_max;
}

}  // namespace oracle_detail

/// Exact hard-shadow reference: per covered pixel, 1 iff the ray from the
/// surface point toward the light is unobstructed. Background pixels keep
/// the renderer's sentinel value so diffs line up with shaded images.
inline Image raycast_shadow(const Mesh& world, const GBuffer& gb, const Light& light,
                            int threads = 1) {
    Image img(gb.width, gb.height);
    const double offset = 1e-4 * world.bounds().diagonal();

    auto trace_rows = [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < gb.width; ++x) {
                const GBufferPixel& px = gb.at(x, y);
                if (!px.covered) {
                    img.at(x, y) = kBackgroundVisibility;
                    continue;
                }
                Vec3 dir;
                double t_max;
                if (light.kind == LightKind::directional) {
                    dir = normalized(light.position_or_direction) * -1.0;
                    t_max = std::numeric_limits<double>::infinity();
                } else {
                    dir = light.position_or_direction - px.world;
                    t_max = 1.0;
                }
                // Offset along the light-facing side of the surface.
                Vec3 n = px.normal;
                if (dot(n, dir) < 0.0) n = n * -1.0;
                const Vec3 origin = px.world + n * offset;

                bool blocked = false;
                for (const Triangle& tri : world.triangles) {
                    if (oracle_detail::ray_hits_triangle(origin, dir, world.vertices[tri.a],
                                                         world.vertices[tri.b],
                                                         world.vertices[tri.c], 0.0, t_max)) {
                        blocked = true;
                        break;
                    }
                }
                img.at(x, y) = blocked ? 0.0 : 1.0;
            }
        }
    };

    if (threads <= 1) {
        trace_rows(0, gb.height);
    } else {
        std::vector<std::thread> pool;
        const int n = std::min(threads, gb.height);
        for (int t = 0; t < n; ++t)
            pool.emplace_back(trace_rows, gb.height * t / n, gb.height * (t + 1) / n);
        for (std::thread& t : pool) t.join();
    }
    return img;
}

struct DiffReport {
    double mse = 0.0;
    long misclassified = 0;
    long edge_band_misclassified = 0;
};

namespace oracle_detail {

/// Pixels within band_radius (4-connected steps) of a binarized boundary of
/// the oracle image.
inline std::vector<char> boundary_band(const Image& oracle, int band_radius) {
    const int w = oracle.width, h = oracle.height;
    std::vector<char> band(static_cast<std::size_t>(w) * h, 0);
    if (band_radius < 1) return band;
    auto bin = [&](int x, int y) { return oracle.at(x, y) >= 0.5 ? 1 : 0; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int v = bin(x, y);
            const bool edge = (x + 1 < w && bin(x + 1, y) != v) || (y + 1 < h && bin(x, y + 1) != v);
            if (edge) {
                band[static_cast<std::size_t>(y) * w + x] = 1;
                if (x + 1 < w) band[static_cast<std::size_t>(y) * w + x + 1] = 1;
                if (y + 1 < h) band[static_cast<std::size_t>(y + 1) * w + x] = 1;
            }
        }
    }
    for (int r = 1; r < band_radius; ++r) {
        std::vector<char> next = band;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!band[static_cast<std::size_t>(y) * w + x]) continue;
                if (x > 0) next[static_cast<std::size_t>(y) * w + x - 1] = 1;
                if (x + 1 < w) next[static_cast<std::size_t>(y) * w + x + 1] = 1;
                if (y > 0) next[static_cast<std::size_t>(y - 1) * w + x] = 1;
                if (y + 1 < h) next[static_cast<std::size_t>(y + 1) * w + x] = 1;
            }
        }
        band.swap(next);
    }
    return band;
}

}  // namespace oracle_detail

/// Difference metrics between images a and b; the band restriction comes
/// from boundaries of the oracle image. Binarization threshold is 0.5.
inline DiffReport diff(const Image& a, const Image& b, const Image& oracle, int band_radius) {
    if (a.width != b.width || a.height != b.height || a.width != oracle.width ||
        a.height != oracle.height)
        throw ValidationError("diff requires equal image dimensions");
    const std::vector<char> band = oracle_detail::boundary_band(oracle, band_radius);

    DiffReport r;
    double sq_sum = 0.0;
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            const double d = a.at(x, y) - b.at(x, y);
            sq_sum += d * d;
            const bool mis = (a.at(x, y) >= 0.5) != (b.at(x, y) >= 0.5);
            if (mis) {
                ++r.misclassified;
                if (band[static_cast<std::size_t>(y) * a.width + x]) ++r.edge_band_misclassified;
            }
        }
    }
    r.mse = sq_sum / (static_cast<double>(a.width) * a.height);
    return r;
}

inline void write_diff_report_kv(const DiffReport& r, std::ostream& out) {
    out << "mse=" << r.mse << "\n"
        << "misclassified=" << r.misclassified << "\n"
        << "edge_band_misclassified=" << r.edge_band_misclassified << "\n";
}

inline constexpr const char* kDiffCsvHeader = "mode,mse,misclassified,edge_band_misclassified";

inline std::string diff_csv_row(const std::string& mode, const DiffReport& r) {
    std::ostringstream os;
    os << mode << "," << r.mse << "," << r.misclassified << "," << r.edge_band_misclassified;
    return os.str();
}

}  // namespace revec
