#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "revec/errors.hpp"
#include "revec/scene.hpp"

namespace revec {

/// Depth grid in light clip space. Depths are normalized to [0,1] and the
/// clear value is 1.0. Lookups are nearest-texel with clamp-to-border.
struct ShadowMap {
    int width = 0;
    int height = 0;
    std::vector<float> depth;  // row-major, row 0 at ndc y = -1
    Mat4 light_view_projection;

    ShadowMap() = default;
    ShadowMap(int w, int h) : width(w), height(h), depth(static_cast<std::size_t>(w) * h, 1.0f) {
        if (w < 1 || h < 1) throw ValidationError("shadow map resolution must be >= 1");
    }

    float& at(int ix, int iy) { return depth[static_cast<std::size_t>(iy) * width + ix]; }
    float at(int ix, int iy) const { return depth[static_cast<std::size_t>(iy) * width + ix]; }

    int clamp_x(int ix) const { return ix < 0 ? 0 : (ix >= width ? width - 1 : ix); }
    int clamp_y(int iy) const { return iy < 0 ? 0 : (iy >= height ? height - 1 : iy); }

    float fetch(int ix, int iy) const { return at(clamp_x(ix), clamp_y(iy)); }

    // Texel index from an ndc coordinate. For even sizes the index is computed
    // on the half-resolution lattice so that ndc negation maps index i to
    // size-1-i exactly; renders are reflection-stable because of this.
    int index_x(double ndc_x) const {
        if ((width & 1) == 0)
            return clamp_x(static_cast<int>(std::floor(ndc_x * (width / 2))) + width / 2);
        return clamp_x(static_cast<int>(std::floor((ndc_x * 0.5 + 0.5) * width)));
    }
    int index_y(double ndc_y) const {
        if ((height & 1) == 0)
            return clamp_y(static_cast<int>(std::floor(ndc_y * (height / 2))) + height / 2);
        return clamp_y(static_cast<int>(std::floor((ndc_y * 0.5 + 0.5) * height)));
    }

    // Fractional position inside the texel, in [0,1) per axis.
    double frac_x(double ndc_x) const {
        const double t = (width & 1) == 0 ? ndc_x * (width / 2) : (ndc_x * 0.5 + 0.5) * width;
        return t - std::floor(t);
    }
    double frac_y(double ndc_y) const {
        const double t = (height & 1) == 0 ? ndc_y * (height / 2) : (ndc_y * 0.5 + 0.5) * height;
        return t - std::floor(t);
    }
};

/// Binary dump: magic "SMAP", u32 width, u32 height, u32 reserved, then
/// width*height little-endian f32 depths. Bit-exact for golden tests.
inline void write_shadow_map(const ShadowMap& sm, std::ostream& out) {
    const char magic[4] = {'S', 'M', 'A', 'P'};
    out.write(magic, 4);
    auto put_u32 = [&](std::uint32_t v) {
        char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
        out.write(b, 4);
    };
    put_u32(static_cast<std::uint32_t>(sm.width));
    put_u32(static_cast<std::uint32_t>(sm.height));
    put_u32(0);
    for (float d : sm.depth) {
        std::uint32_t bits;
        std::memcpy(&bits, &d, 4);
        char b[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                     static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
        out.write(b, 4);
    }
}

inline void write_shadow_map(const ShadowMap& sm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_shadow_map(sm, out);
    if (!out) throw IoError("write failed: " + path);
}

inline ShadowMap read_shadow_map(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SMAP", 4) != 0) throw ParseError("bad shadow map magic");
    auto get_u32 = [&]() {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    };
    const std::uint32_t w = get_u32(), h = get_u32();
    get_u32();  // reserved
    if (!in || w == 0 || h == 0) throw ParseError("bad shadow map header");
    ShadowMap sm(static_cast<int>(w), static_cast<int>(h));
    for (float& d : sm.depth) {
        const std::uint32_t bits = get_u32();
        std::memcpy(&d, &bits, 4);
    }
    if (!in) throw ParseError("truncated shadow map dump");
    return sm;
}

}  // namespace revec
