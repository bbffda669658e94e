#pragma once

#include <algorithm>
#include <numbers>
#include <vector>

#include "vtrack/config.hpp"
#include "vtrack/ellipse.hpp"
#include "vtrack/image.hpp"
#include "vtrack/levelset.hpp"
#include "vtrack/phase.hpp"

namespace vtrack {

/// Casts n equally spaced rays from the seed and returns, per ray, the
/// first strict local maximum of FA (sampled bilinearly at 1-px steps,
/// up to m px) whose value reaches fa_min. Rays with no qualifying
/// sample contribute nothing; fewer than 5 hits is an error.
inline std::vector<Point> radial_search(const GrayImage& fa, Point seed, int n, int m,
                                        double fa_min) {
    if (!fa.in_bounds(seed.x, seed.y))
        throw SeedOutsideImage("radial search seed outside image");
    if (n < 8) throw BadConfig("radial_n must be >= 8");
    std::vector<Point> points;
    points.reserve(n);
    std::vector<double> samples(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / n;
        const double dx = std::cos(angle), dy = std::sin(angle);
        int last = 0;
        samples[0] = fa.sample_bilinear(seed.x, seed.y);
        for (int t = 1; t <= m; ++t) {
            const double x = seed.x + t * dx, y = seed.y + t * dy;
            if (!fa.in_bounds(x, y)) break;
            samples[t] = fa.sample_bilinear(x, y);
            last = t;
        }
        for (int t = 1; t < last; ++t) {
            if (samples[t] >= fa_min && samples[t] > samples[t - 1] &&
                samples[t] > samples[t + 1]) {
                points.push_back({seed.x + t * dx, seed.y + t * dy});
                break;
            }
        }
    }
    if (points.size() < 5)
        throw TooFewBoundaryPoints("radial search found < 5 boundary points");
    return points;
}

struct SegmentResult {
    std::vector<Point> contour;  // ordered CCW, downsampled coordinates
    EllipseParams initial_fit;   // radial-search ellipse
    EllipseParams measured;      // ellipse refit to the evolved contour
};

/// Full single-frame segmentation from a seed, in downsampled
/// coordinates: radial search on FA, ellipse fit, shrunken binary LSF,
/// DRLSE refinement, contour extraction, measurement refit.
inline SegmentResult segment_from_seed(const GrayImage& fa, const GrayImage& img_b,
                                       Point seed, const SequenceConfig& cfg) {
    SegmentResult result;
    const auto boundary =
        radial_search(fa, seed, cfg.radial_n, cfg.radial_m, cfg.fa_min);
    // A seed inside the lumen is surrounded by wall, so nearly every ray
    // finds an edge maximum. Sparse support means the seed is off-vessel
    // and the fit would hallucinate a contour from background clutter.
    if (boundary.size() * 2 < static_cast<std::size_t>(cfg.radial_n))
        throw TooFewBoundaryPoints(
            "boundary support below half the rays: seed is off-vessel");
    // Speckle occasionally produces a qualifying maximum far from the
    // wall; the algebraic fit has no robustness, so trim hits whose
    // radius strays beyond [0.5, 1.5]x the median before fitting.
    std::vector<double> radii(boundary.size());
    for (std::size_t i = 0; i < boundary.size(); ++i)
        radii[i] = distance(boundary[i], seed);
    std::vector<double> sorted = radii;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::vector<Point> kept;
    kept.reserve(boundary.size());
    for (std::size_t i = 0; i < boundary.size(); ++i)
        if (radii[i] >= 0.5 * median && radii[i] <= 1.5 * median)
            kept.push_back(boundary[i]);
    if (kept.size() < 5)
        throw TooFewBoundaryPoints("fewer than 5 boundary points after trimming");
    result.initial_fit = fit_ellipse(kept);
    const LevelSetField phi0 =
        init_lsf(result.initial_fit, cfg.shrink_factor, img_b.width, img_b.height,
                 cfg.drlse.c0);
    const LevelSetField phi = drlse_evolve(phi0, img_b, cfg.drlse, cfg.threads);
    result.contour = extract_contour(phi);
    if (result.contour.size() < 8)
        throw TooFewBoundaryPoints("refined contour has < 8 vertices");
    result.measured = fit_ellipse(result.contour);
    return result;
}

} // namespace vtrack
