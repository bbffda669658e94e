#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vtrack/errors.hpp"

namespace vtrack {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point& p, const Point& q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

/// Row-major 2D scalar raster. Carries B-scans, filtered images, feature
/// asymmetry maps and level-set fields alike. Input B-scans use the
/// nominal [0,255] range.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t size() const { return data.size(); }

    double& at(int x, int y) {
        assert(x >= 0 && x < width && y >= 0 && y < height);
        return data[static_cast<std::size_t>(y) * width + x];
    }
    double at(int x, int y) const {
        assert(x >= 0 && x < width && y >= 0 && y < height);
        return data[static_cast<std::size_t>(y) * width + x];
    }

    /// Clamp-to-edge access; valid for any integer coordinates.
    double at_clamped(int x, int y) const {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return data[static_cast<std::size_t>(y) * width + x];
    }

    bool in_bounds(double x, double y) const {
        return x >= 0.0 && y >= 0.0 && x <= width - 1.0 && y <= height - 1.0;
    }

    bool same_dims(const GrayImage& other) const {
        return width == other.width && height == other.height;
    }

    /// Bilinear interpolation with clamp-to-edge behavior.
    double sample_bilinear(double x, double y) const {
        const int x0 = static_cast<int>(std::floor(x));
        const int y0 = static_cast<int>(std::floor(y));
        const double fx = x - x0;
        const double fy = y - y0;
        const double v00 = at_clamped(x0, y0);
        const double v10 = at_clamped(x0 + 1, y0);
        const double v01 = at_clamped(x0, y0 + 1);
        const double v11 = at_clamped(x0 + 1, y0 + 1);
        return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
               fy * ((1.0 - fx) * v01 + fx * v11);
    }

    double min_value() const {
        return data.empty() ? 0.0 : *std::min_element(data.begin(), data.end());
    }
    double max_value() const {
        return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end());
    }
};

} // namespace vtrack
