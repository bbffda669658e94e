#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "vtrack/config.hpp"
#include "vtrack/image.hpp"
#include "vtrack/parallel.hpp"

namespace vtrack {

/// Block-mean downsampling by an integer factor; output dims are
/// floor(input/factor) and trailing partial blocks are dropped.
inline GrayImage downsample(const GrayImage& img, int factor) {
    if (factor < 1) throw BadConfig("downsample factor must be >= 1");
    if (img.width < factor || img.height < factor)
        throw ImageTooSmall("image smaller than downsample factor");
    if (factor == 1) return img;
    const int ow = img.width / factor;
    const int oh = img.height / factor;
    GrayImage out(ow, oh);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double sum = 0.0;
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx)
                    sum += img.at(x * factor + dx, y * factor + dy);
            out.at(x, y) = sum * inv;
        }
    }
    return out;
}

/// Edge-preserving smoothing: Gaussian weights in space and intensity
/// over a kernel x kernel window, normalized per pixel. Borders clamp.
inline GrayImage bilateral_filter(const GrayImage& img, int kernel,
                                  double sigma_spatial, double sigma_range,
                                  int threads = 1) {
    if (kernel < 3 || kernel % 2 == 0) throw BadKernel("kernel must be odd and >= 3");
    if (sigma_spatial <= 0.0 || sigma_range <= 0.0)
        throw BadConfig("bilateral sigmas must be > 0");
    const int r = kernel / 2;
    std::vector<double> spatial((kernel) * (kernel));
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            spatial[(dy + r) * kernel + (dx + r)] =
                std::exp(-0.5 * (dx * dx + dy * dy) / (sigma_spatial * sigma_spatial));
    const double inv2sr2 = 0.5 / (sigma_range * sigma_range);

    GrayImage out(img.width, img.height);
    parallel_for(0, img.height, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < img.width; ++x) {
                const double center = img.at(x, y);
                double wsum = 0.0, vsum = 0.0;
                for (int dy = -r; dy <= r; ++dy) {
                    for (int dx = -r; dx <= r; ++dx) {
                        const double v = img.at_clamped(x + dx, y + dy);
                        const double d = v - center;
                        const double w = spatial[(dy + r) * kernel + (dx + r)] *
                                         std::exp(-d * d * inv2sr2);
                        wsum += w;
                        vsum += w * v;
                    }
                }
                out.at(x, y) = vsum / wsum;
            }
        }
    });
    return out;
}

/// Variance-root clustering of a smoothed image into homogeneous patches.
/// Every pixel links to the minimum-variance pixel in its circular
/// neighborhood; chains of links end in fixed points (roots).
struct ClusterMap {
    int width = 0;
    int height = 0;
    std::vector<int> root_of;       // per-pixel root index (row-major)
    std::vector<double> patch_mean; // indexed by root pixel index
    std::vector<int> roots;         // root pixel indices

    bool is_root(int idx) const { return root_of[idx] == idx; }
    Point root_point(int idx) const {
        return {static_cast<double>(idx % width), static_cast<double>(idx / width)};
    }
};

namespace detail {
/// Offsets of the disc inscribed in a kernel x kernel window
/// (center distance <= kernel/2).
inline std::vector<std::pair<int, int>> disc_offsets(int kernel) {
    const int r = kernel / 2;
    const double rad = kernel / 2.0;
    std::vector<std::pair<int, int>> offs;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (std::sqrt(static_cast<double>(dx * dx + dy * dy)) <= rad)
                offs.emplace_back(dx, dy);
    return offs;
}
} // namespace detail

inline ClusterMap cluster(const GrayImage& img, int kernel) {
    if (kernel < 3 || kernel % 2 == 0) throw BadKernel("kernel must be odd and >= 3");
    const auto offs = detail::disc_offsets(kernel);
    const int w = img.width, h = img.height;
    const std::size_t n = img.size();

    // Local mean / population variance over the disc, clamped at borders.
    std::vector<double> variance(n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0, s2 = 0.0;
            for (const auto& [dx, dy] : offs) {
                const double v = img.at_clamped(x + dx, y + dy);
                s += v;
                s2 += v * v;
            }
            const double m = s / offs.size();
            variance[static_cast<std::size_t>(y) * w + x] =
                std::max(0.0, s2 / offs.size() - m * m);
        }
    }

    // Link to the minimum-variance disc neighbor. Ties: self wins if
    // tied, otherwise the lowest row-major index; this makes chains
    // strictly variance-decreasing and therefore acyclic.
    ClusterMap cm;
    cm.width = w;
    cm.height = h;
    std::vector<int> link(n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int self = y * w + x;
            int best = self;
            double best_var = variance[self];
            for (const auto& [dx, dy] : offs) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const int idx = ny * w + nx;
                if (idx == self) continue;
                const double v = variance[idx];
                if (v < best_var || (v == best_var && best != self && idx < best)) {
                    best = idx;
                    best_var = v;
                }
            }
            link[self] = best;
        }
    }

    // Follow links to fixed points.
    cm.root_of.assign(n, -1);
    std::vector<int> path;
    for (std::size_t i = 0; i < n; ++i) {
        if (cm.root_of[i] >= 0) continue;
        path.clear();
        int cur = static_cast<int>(i);
        while (cm.root_of[cur] < 0 && link[cur] != cur) {
            path.push_back(cur);
            cm.root_of[cur] = -2; // on current path
            cur = link[cur];
        }
        const int root = cm.root_of[cur] >= 0 ? cm.root_of[cur] : cur;
        cm.root_of[cur] = root;
        for (int p : path) cm.root_of[p] = root;
    }

    // Patch means over members.
    std::vector<double> sum(n, 0.0);
    std::vector<int> count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        sum[cm.root_of[i]] += img.data[i];
        ++count[cm.root_of[i]];
    }
    cm.patch_mean.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (count[i] > 0) {
            cm.patch_mean[i] = sum[i] / count[i];
            cm.roots.push_back(static_cast<int>(i));
        }
    }
    return cm;
}

} // namespace vtrack
