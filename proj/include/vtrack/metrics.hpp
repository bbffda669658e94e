#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "vtrack/image.hpp"

namespace vtrack {

/// Binary region raster: 1 on and inside a contour, 0 elsewhere.
struct RegionMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    RegionMask() = default;
    RegionMask(int w, int h)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (uint8_t b : bits) c += b;
        return c;
    }
    bool same_dims(const RegionMask& o) const {
        return width == o.width && height == o.height;
    }
};

namespace detail {

/// Proper crossing test between open segments (shared endpoints allowed).
inline bool segments_cross(const Point& a, const Point& b, const Point& c,
                           const Point& d) {
    auto orient = [](const Point& p, const Point& q, const Point& r) {
        const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4;
}

} // namespace detail

inline void check_simple_polygon(std::span<const Point> contour) {
    const std::size_t n = contour.size();
    if (n < 3) throw SelfIntersectingContour("contour needs >= 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = contour[i];
        const Point& b = contour[(i + 1) % n];
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent through wrap
            const Point& c = contour[j];
            const Point& d = contour[(j + 1) % n];
            if (detail::segments_cross(a, b, c, d))
                throw SelfIntersectingContour("contour edges cross");
        }
    }
}

/// Scanline fill of a simple closed polygon; lattice points on the
/// boundary are included.
inline RegionMask rasterize(std::span<const Point> contour, int width, int height) {
    check_simple_polygon(contour);
    RegionMask mask(width, height);
    const std::size_t n = contour.size();
    std::vector<double> xs;
    for (int y = 0; y < height; ++y) {
        xs.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& p = contour[i];
            const Point& q = contour[(i + 1) % n];
            const double y0 = p.y, y1 = q.y;
            if (y0 == y1) continue;
            const double lo = std::min(y0, y1), hi = std::max(y0, y1);
            if (y < lo || y >= hi) continue; // half-open vertex rule
            xs.push_back(p.x + (y - y0) / (y1 - y0) * (q.x - p.x));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            const int x_lo = std::max(0, static_cast<int>(std::ceil(xs[i] - 1e-9)));
            const int x_hi =
                std::min(width - 1, static_cast<int>(std::floor(xs[i + 1] + 1e-9)));
            for (int x = x_lo; x <= x_hi; ++x) mask.at(x, y) = 1;
        }
    }
    // Lattice points lying exactly on an edge.
    auto mark = [&](double x, double y) {
        const double rx = std::round(x), ry = std::round(y);
        if (std::abs(x - rx) < 1e-9 && std::abs(y - ry) < 1e-9 && rx >= 0 &&
            rx < width && ry >= 0 && ry < height)
            mask.at(static_cast<int>(rx), static_cast<int>(ry)) = 1;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = contour[i];
        const Point& q = contour[(i + 1) % n];
        mark(p.x, p.y);
        const double dx = q.x - p.x, dy = q.y - p.y;
        if (std::abs(dx) >= std::abs(dy)) {
            const double lo = std::min(p.x, q.x), hi = std::max(p.x, q.x);
            for (int x = static_cast<int>(std::ceil(lo)); x <= std::floor(hi); ++x)
                if (dx != 0.0) mark(x, p.y + (x - p.x) / dx * dy);
        } else {
            const double lo = std::min(p.y, q.y), hi = std::max(p.y, q.y);
            for (int y = static_cast<int>(std::ceil(lo)); y <= std::floor(hi); ++y)
                mark(p.x + (y - p.y) / dy * dx, y);
        }
    }
    return mask;
}

/// Dice similarity coefficient 2|G n S| / (|G| + |S|).
inline double dice(const RegionMask& g, const RegionMask& s) {
    if (!g.same_dims(s)) throw DimensionMismatch("mask dims differ");
    std::size_t inter = 0, total = 0;
    for (std::size_t i = 0; i < g.bits.size(); ++i) {
        inter += g.bits[i] & s.bits[i];
        total += g.bits[i] + s.bits[i];
    }
    if (total == 0) throw BothEmpty("both masks are empty");
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

/// Resample a closed polygon at (roughly) unit arc-length spacing so
/// that point-set distances are insensitive to vertex density.
inline std::vector<Point> resample_contour(std::span<const Point> contour,
                                           double spacing = 1.0) {
    const std::size_t n = contour.size();
    if (n < 2) return {contour.begin(), contour.end()};
    double perimeter = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        perimeter += distance(contour[i], contour[(i + 1) % n]);
    const int samples = std::max<int>(static_cast<int>(std::ceil(perimeter / spacing)),
                                      static_cast<int>(n));
    if (perimeter <= 0.0) return {contour.begin(), contour.end()};
    std::vector<Point> out;
    out.reserve(samples);
    const double step = perimeter / samples;
    std::size_t edge = 0;
    double edge_start = 0.0;
    double edge_len = distance(contour[0], contour[1 % n]);
    for (int k = 0; k < samples; ++k) {
        const double target = k * step;
        while (target > edge_start + edge_len && edge + 1 < n) {
            edge_start += edge_len;
            ++edge;
            edge_len = distance(contour[edge], contour[(edge + 1) % n]);
        }
        const double t = edge_len > 0.0 ? (target - edge_start) / edge_len : 0.0;
        const Point& p = contour[edge];
        const Point& q = contour[(edge + 1) % n];
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
    return out;
}

namespace detail {

inline double directed_max_distance(std::span<const Point> from,
                                    std::span<const Point> to) {
    double worst = 0.0;
    for (const Point& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& q : to) best = std::min(best, distance(p, q));
        worst = std::max(worst, best);
    }
    return worst;
}

inline double directed_mean_distance(std::span<const Point> from,
                                     std::span<const Point> to) {
    double sum = 0.0;
    for (const Point& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& q : to) best = std::min(best, distance(p, q));
        sum += best;
    }
    return sum / static_cast<double>(from.size());
}

} // namespace detail

/// Symmetric Hausdorff distance between contours, in mm.
inline double hausdorff_mm(std::span<const Point> g, std::span<const Point> s,
                           double pitch_mm) {
    if (g.empty() || s.empty()) throw EmptyContour("empty contour");
    if (pitch_mm <= 0.0) throw BadConfig("pitch must be > 0");
    const auto gr = resample_contour(g);
    const auto sr = resample_contour(s);
    return pitch_mm * std::max(detail::directed_max_distance(gr, sr),
                               detail::directed_max_distance(sr, gr));
}

/// Symmetric mean absolute contour deviation, in mm.
inline double mad_mm(std::span<const Point> g, std::span<const Point> s,
                     double pitch_mm) {
    if (g.empty() || s.empty()) throw EmptyContour("empty contour");
    if (pitch_mm <= 0.0) throw BadConfig("pitch must be > 0");
    const auto gr = resample_contour(g);
    const auto sr = resample_contour(s);
    return pitch_mm * (detail::directed_mean_distance(gr, sr) +
                       detail::directed_mean_distance(sr, gr)) / 2.0;
}

namespace detail {

/// 1D squared distance transform (lower envelope of parabolas).
/// Siteless positions carry a large finite sentinel that can never win
/// against a real site, which keeps the arithmetic exact.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d,
                   std::vector<int>& v, std::vector<double>& z, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

} // namespace detail

/// Exact squared Euclidean distance to the nearest 1-pixel, per pixel.
inline std::vector<double> edt_squared(const RegionMask& mask) {
    if (mask.count() == 0) throw EmptyMask("EDT of an empty mask");
    const int w = mask.width, h = mask.height;
    const double big =
        4.0 * (static_cast<double>(w) * w + static_cast<double>(h) * h) + 16.0;
    std::vector<double> dist(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < dist.size(); ++i)
        dist[i] = mask.bits[i] ? 0.0 : big;

    const int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    // Columns, then rows.
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = dist[static_cast<std::size_t>(y) * w + x];
        detail::edt_1d(f, d, v, z, h);
        for (int y = 0; y < h; ++y) dist[static_cast<std::size_t>(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = dist[static_cast<std::size_t>(y) * w + x];
        detail::edt_1d(f, d, v, z, w);
        for (int x = 0; x < w; ++x) dist[static_cast<std::size_t>(y) * w + x] = d[x];
    }
    return dist;
}

/// Euclidean distance transform in pixels.
inline GrayImage edt(const RegionMask& mask) {
    const auto sq = edt_squared(mask);
    GrayImage out(mask.width, mask.height);
    for (std::size_t i = 0; i < sq.size(); ++i) out.data[i] = std::sqrt(sq[i]);
    return out;
}

/// Definite false positive / negative distances: log1p of the L1 mass of
/// the segmentation against the EDT of the truth and of its complement.
/// (log1p rather than log keeps perfect segmentations finite.)
inline std::pair<double, double> dfpd_dfnd(const RegionMask& g, const RegionMask& s) {
    if (!g.same_dims(s)) throw DimensionMismatch("mask dims differ");
    if (g.count() == 0) throw EmptyMask("ground-truth mask empty");
    const GrayImage dist_g = edt(g);
    RegionMask g_inv(g.width, g.height);
    for (std::size_t i = 0; i < g.bits.size(); ++i) g_inv.bits[i] = g.bits[i] ? 0 : 1;
    double fp_mass = 0.0, fn_mass = 0.0;
    for (std::size_t i = 0; i < s.bits.size(); ++i)
        if (s.bits[i]) fp_mass += dist_g.data[i];
    if (g_inv.count() > 0) {
        const GrayImage dist_inv = edt(g_inv);
        for (std::size_t i = 0; i < s.bits.size(); ++i)
            if (s.bits[i]) fn_mass += dist_inv.data[i];
    }
    return {std::log1p(fp_mass), std::log1p(fn_mass)};
}

} // namespace vtrack
