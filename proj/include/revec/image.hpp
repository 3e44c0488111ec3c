#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "revec/errors.hpp"

namespace revec {

/// Scalar visibility image; values in [0,1]. Row 0 is the top image row.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw ValidationError("image resolution must be >= 1");
    }

    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Grayscale values replicated into RGB, binary PPM (P6).
inline void write_ppm(const Image& img, std::ostream& out) {
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = std::clamp(img.at(x, y), 0.0, 1.0);
            const unsigned char b = static_cast<unsigned char>(std::lround(v * 255.0));
            row[3 * x] = row[3 * x + 1] = row[3 * x + 2] = b;
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
}

inline void write_ppm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_ppm(img, out);
    if (!out) throw IoError("write failed: " + path);
}

inline Image flip_horizontal(const Image& img) {
    Image r(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) r.at(x, y) = img.at(img.width - 1 - x, y);
    return r;
}

}  // namespace revec
