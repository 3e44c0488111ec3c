#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "revec/errors.hpp"
#include "revec/shadow_map.hpp"

namespace revec {

enum class RbsmMode { recovery, filtering };

struct RbsmParams {
    int maxdist = 16;
    double depth_bias = 2.0 / 16777216.0;  // 2 * depth range / 2^24
    RbsmMode mode = RbsmMode::recovery;
    int pcf_kernel = 1;  // post-filter kernel, 1 = off

    void validate() const {
        if (maxdist < 1) throw ValidationError("maxdist must be >= 1");
        if (depth_bias < 0.0) throw ValidationError("depth bias must be >= 0");
        if (pcf_kernel < 1 || pcf_kernel % 2 == 0)
            throw ValidationError("pcf kernel must be odd and >= 1");
    }
};

/// Binary shadow test: 0 (shadowed) iff the fragment is farther from the
/// light than the stored blocker depth, with a normalized-depth bias.
inline int shadow_test(double p_z, double stored_z, double bias) {
    return (p_z - bias > stored_z) ? 0 : 1;
}

/// Compressed per-axis shadow-edge directions. The 0.5 "bit" marks the
/// neighbour that carries the doubled weight (left on x, up on y), the
/// 0.25 bit the other one; 0.75 means both sides differ. dz is 0 for lit,
/// 1 for shadowed fragments.
struct Discontinuity {
    double dx = 0.0;
    double dy = 0.0;
    double dz = 0.0;
};

/// Signed per-direction traversal distances. Positive: steps to a shadow
/// edge end. Negative: the traversal ended (or hit maxdist) without one.
struct EdgeDistances {
    int left = 0, right = 0, down = 0, up = 0;
};

/// Unit-interval distances to the aliasing corner plus per-axis end flags:
/// 1 = ends found in both directions of the axis, 0 = exactly one, -1 = none.
struct NormalizedDistances {
    double x = 0.0;
    double y = 0.0;
    int zflag = 0;  // horizontal axis
    int wflag = 0;  // vertical axis
};

namespace rbsm_detail {

inline bool has_half_bit(double c) { return c == 0.5 || c == 0.75; }
inline bool has_quarter_bit(double c) { return c == 0.25 || c == 0.75; }

inline bool share_direction(double a, double b) {
    return (has_half_bit(a) && has_half_bit(b)) ||
           (has_quarter_bit(a) && has_quarter_bit(b));
}

}  // namespace rbsm_detail

/// Shadow tests of the 4-connected neighbourhood, in the order
/// (x-1, y), (x+1, y), (x, y+1), (x, y-1). Out-of-range lookups clamp.
inline std::array<int, 4> neighborhood(const ShadowMap& sm, int ix, int iy, double p_z,
                                       double bias) {
    return {shadow_test(p_z, sm.fetch(ix - 1, iy), bias),
            shadow_test(p_z, sm.fetch(ix + 1, iy), bias),
            shadow_test(p_z, sm.fetch(ix, iy + 1), bias),
            shadow_test(p_z, sm.fetch(ix, iy - 1), bias)};
}

/// Compressed discontinuity: dx = (2*left + right)/4, dy = (2*up + down)/4
/// over the absolute neighbour shadow-test differences, dz = 1 - s.
inline Discontinuity compute_discontinuity(const ShadowMap& sm, int ix, int iy, double p_z,
                                           double bias) {
    const int s = shadow_test(p_z, sm.fetch(ix, iy), bias);
    const std::array<int, 4> n = neighborhood(sm, ix, iy, p_z, bias);
    const int du_left = std::abs(n[0] - s);
    const int du_right = std::abs(n[1] - s);
    const int du_up = std::abs(n[2] - s);
    const int du_down = std::abs(n[3] - s);
    Discontinuity d;
    d.dx = (2 * du_left + du_right) / 4.0;
    d.dy = (2 * du_up + du_down) / 4.0;
    d.dz = 1.0 - s;
    return d;
}

enum class TraversalAxis { horizontal, vertical };

/// True iff the neighbour fragment at (nx, ny) shares at least one shadow
/// edge direction with the traversal origin on the axis perpendicular to
/// the traversal axis (0.75 counts as both one-sided values).
inline bool check_discontinuity(const ShadowMap& sm, int nx, int ny, const Discontinuity& origin,
                                double p_z, double bias, TraversalAxis axis) {
    const Discontinuity nd = compute_discontinuity(sm, nx, ny, p_z, bias);
    if (axis == TraversalAxis::horizontal) return rbsm_detail::share_direction(nd.dy, origin.dy);
    return rbsm_detail::share_direction(nd.dx, origin.dx);
}

/// Walks the shadow map from (ix, iy) one texel at a time along (step_x,
/// step_y). Returns +distance when a visibility flip (shadow edge end) is
/// found, -distance when the edge ends without one, -(maxdist+1) when the
/// walk is cut off.
inline int traverse(const ShadowMap& sm, int ix, int iy, const Discontinuity& d, int step_x,
                    int step_y, double p_z, double bias, int maxdist) {
    const TraversalAxis axis = step_x != 0 ? TraversalAxis::horizontal : TraversalAxis::vertical;
    int distance = 1;
    int cx = ix, cy = iy;
    for (int i = 0; i < maxdist; ++i) {
        cx += step_x;
        cy += step_y;
        const int s = shadow_test(p_z, sm.fetch(cx, cy), bias);
        if (s == static_cast<int>(d.dz)) return distance;  // visibility differs: end found
        if (!check_discontinuity(sm, cx, cy, d, p_z, bias, axis)) return -distance;
        ++distance;
    }
    return -distance;  // == -(maxdist + 1)
}

/// Four traversal results; directions whose adjacent end is already encoded
/// in the fragment's own discontinuity short-circuit to +1.
inline EdgeDistances compute_edge_distances(const ShadowMap& sm, int ix, int iy,
                                            const Discontinuity& d, double p_z, double bias,
                                            int maxdist) {
    using namespace rbsm_detail;
    EdgeDistances rd;
    rd.left = has_half_bit(d.dx) ? 1 : traverse(sm, ix, iy, d, -1, 0, p_z, bias, maxdist);
    rd.right = has_quarter_bit(d.dx) ? 1 : traverse(sm, ix, iy, d, 1, 0, p_z, bias, maxdist);
    rd.down = has_quarter_bit(d.dy) ? 1 : traverse(sm, ix, iy, d, 0, -1, p_z, bias, maxdist);
    rd.up = has_half_bit(d.dy) ? 1 : traverse(sm, ix, iy, d, 0, 1, p_z, bias, maxdist);
    return rd;
}

namespace rbsm_detail {

// Normalized coordinate along one axis. The origin sits at the aliasing
// corner (the nearest shadow edge end): 0 there, 1 at the open extremity.
inline void axis_normalize(int neg, int pos, double frac, int& flag, double& coord) {
    flag = (neg > 0 && pos > 0) ? 1 : (neg < 0 && pos < 0) ? -1 : 0;
    int t_end, t_far;
    bool end_positive;
    if (flag == 0) {
        end_positive = pos > 0;
        t_end = end_positive ? pos : neg;
        t_far = end_positive ? -neg : -pos;
    } else {
        const int m_neg = std::abs(neg), m_pos = std::abs(pos);
        end_positive = m_pos <= m_neg;
        t_end = end_positive ? m_pos : m_neg;
        t_far = end_positive ? m_neg : m_pos;
    }
    const double edge_len = t_end + t_far - 1;
    const double f_away = end_positive ? 1.0 - frac : frac;
    coord = std::clamp(((t_end - 1) + f_away) / edge_len, 0.0, 1.0);
}

}  // namespace rbsm_detail

/// frac is the fragment's fractional position inside its texel, in [0,1)^2.
inline NormalizedDistances normalize_distances(const EdgeDistances& rd, double frac_x,
                                               double frac_y) {
    NormalizedDistances nrd;
    rbsm_detail::axis_normalize(rd.left, rd.right, frac_x, nrd.zflag, nrd.x);
    rbsm_detail::axis_normalize(rd.down, rd.up, frac_y, nrd.wflag, nrd.y);
    return nrd;
}

/// Silhouette recovery visibility. Binary by construction.
inline double visibility_recovery(const Discontinuity& d, const NormalizedDistances& nrd) {
    // Short U- or O-shape: shadow.
    if (d.dx == 0.75 || d.dy == 0.75) return 0.0;
    // Long U- or O-shape: shadow.
    if (nrd.zflag == 1 || nrd.wflag == 1) return 0.0;
    // I-shape: lit.
    if (nrd.zflag == -1 || nrd.wflag == -1) return 1.0;
    // L-shape: revectorization line.
    return nrd.y < 1.0 - nrd.x ? 0.0 : 1.0;
}

/// Filtering visibility in [0,1]; works on both sides of the edge.
inline double visibility_filtering(const Discontinuity& d, const NormalizedDistances& nrd) {
    const double sign = -2.0 * d.dz + 1.0;
    // Short O-shape: opposite of the shadow test.
    if (d.dx == 0.75 && d.dy == 0.75) return d.dz;
    // Long O-shape: opposite of the shadow test.
    if (nrd.zflag == 1 && nrd.wflag == 1) return d.dz;
    // U-shape: the normalized distance along the crossing axis.
    if (nrd.zflag == 1) return d.dz + sign * nrd.y;
    if (nrd.wflag == 1) return d.dz + sign * nrd.x;
    // I-shape: the shadow test.
    if (nrd.zflag == -1 || nrd.wflag == -1) return 1.0 - d.dz;
    // L-shape.
    return std::clamp(d.dz + sign * nrd.y + sign * nrd.x, 0.0, 1.0);
}

/// Full per-fragment pipeline. p is the fragment's light-space position in
/// ndc form: x,y in [-1,1], z normalized depth in [0,1].
inline double rbsm_shade(const ShadowMap& sm, const Vec3& p, const RbsmParams& params) {
    const int ix = sm.index_x(p.x);
    const int iy = sm.index_y(p.y);
    const double z = sm.fetch(ix, iy);
    const int s = shadow_test(p.z, z, params.depth_bias);
    if (params.mode == RbsmMode::recovery && s == 0) return 0.0;  // stays in shadow
    const Discontinuity d = compute_discontinuity(sm, ix, iy, p.z, params.depth_bias);
    if (d.dx > 0.0 || d.dy > 0.0) {
        const EdgeDistances rd =
            compute_edge_distances(sm, ix, iy, d, p.z, params.depth_bias, params.maxdist);
        const NormalizedDistances nrd =
            normalize_distances(rd, sm.frac_x(p.x), sm.frac_y(p.y));
        return params.mode == RbsmMode::recovery ? visibility_recovery(d, nrd)
                                                 : visibility_filtering(d, nrd);
    }
    return s;
}

/// Percentage-closer filtering: mean shadow test over a kernel x kernel
/// texel neighbourhood centered on the fragment's texel.
inline double pcf(const ShadowMap& sm, const Vec3& p, int kernel, double bias) {
    if (kernel < 1 || kernel % 2 == 0) throw ValidationError("pcf kernel must be odd and >= 1");
    const int ix = sm.index_x(p.x);
    const int iy = sm.index_y(p.y);
    const int r = kernel / 2;
    int lit = 0;
    for (int oy = -r; oy <= r; ++oy)
        for (int ox = -r; ox <= r; ++ox) lit += shadow_test(p.z, sm.fetch(ix + ox, iy + oy), bias);
    return static_cast<double>(lit) / (kernel * kernel);
}

}  // namespace revec
