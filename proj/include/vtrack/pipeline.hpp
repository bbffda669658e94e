#pragma once

#include <chrono>
#include <vector>

#include "vtrack/config.hpp"
#include "vtrack/image.hpp"
#include "vtrack/phase.hpp"
#include "vtrack/preprocess.hpp"
#include "vtrack/segmentation.hpp"
#include "vtrack/tracking.hpp"

namespace vtrack {

/// Per-frame output in full-resolution pixel coordinates.
struct ContourResult {
    int frame_index = 0;
    std::vector<Point> points;
    EllipseParams ellipse;
    SeedSource seed_used = SeedSource::manual;
};

struct RunStats {
    std::vector<double> frame_ms; // pipeline compute time per frame
};

namespace detail {

struct PreprocessedFrame {
    GrayImage img_b; // downsampled + bilateral filtered
    GrayImage fa;    // feature asymmetry map
};

inline PreprocessedFrame preprocess_frame(const GrayImage& frame,
                                          const SequenceConfig& cfg) {
    PreprocessedFrame out;
    const GrayImage small = downsample(frame, cfg.downsample_factor);
    out.img_b = bilateral_filter(small, cfg.bilateral_kernel, cfg.sigma_spatial(),
                                 cfg.bilateral_sigma_range, cfg.threads);
    const CauchyParams cp{cfg.cauchy_w0, cfg.cauchy_u};
    const FAParams fp{cfg.fa_threshold_mode, cfg.fa_fixed_t, cfg.fa_epsilon};
    out.fa = feature_asymmetry_map(out.img_b, cp, fp);
    return out;
}

inline ContourResult to_full_resolution(int frame_index, const SegmentResult& seg,
                                        SeedSource source, int factor) {
    ContourResult r;
    r.frame_index = frame_index;
    r.seed_used = source;
    r.points.reserve(seg.contour.size());
    for (const Point& p : seg.contour)
        r.points.push_back({p.x * factor, p.y * factor});
    r.ellipse = seg.measured;
    r.ellipse.cx *= factor;
    r.ellipse.cy *= factor;
    r.ellipse.a *= factor;
    r.ellipse.b *= factor;
    return r;
}

} // namespace detail

/// Segment frame 0 from the manual seed, then track frame-to-frame.
/// All coordinates in and out are full-resolution pixels.
inline std::vector<ContourResult> run_sequence(const std::vector<GrayImage>& frames,
                                               Point seed, const SequenceConfig& cfg,
                                               RunStats* stats = nullptr) {
    cfg.validate();
    if (frames.empty()) throw EmptyDirectory("no frames to process");
    for (const auto& f : frames)
        if (!f.same_dims(frames.front()))
            throw DimensionMismatch("frames have mixed dimensions");
    if (!frames.front().in_bounds(seed.x, seed.y))
        throw SeedOutsideImage("seed outside the first frame");

    using clock = std::chrono::steady_clock;
    const int factor = cfg.downsample_factor;
    std::vector<ContourResult> results;
    results.reserve(frames.size());

    // Frame 0: manual seed.
    auto t0 = clock::now();
    const auto pre0 = detail::preprocess_frame(frames[0], cfg);
    const Point seed_ds{seed.x / factor, seed.y / factor};
    const SegmentResult seg0 = segment_from_seed(pre0.fa, pre0.img_b, seed_ds, cfg);
    results.push_back(detail::to_full_resolution(0, seg0, SeedSource::manual, factor));

    // Stationary tracker start: x_prev = x = frame 0 measurement.
    TrackerState state;
    state.x = {seg0.measured.cx, seg0.measured.cy, seg0.measured.a, seg0.measured.b};
    state.x_prev = state.x;
    state.P = cfg.ekf.P0;
    state.seed = seed_ds;
    state.cluster_seed = seed_ds;
    state.seed_source = SeedSource::manual;

    // Vessel-size kernel choice, fixed for the rest of the sequence.
    // Vessel diameter gate is stated in full-resolution pixels; the
    // measured semi-major axis is in downsampled coordinates.
    int kernel = cfg.cluster_kernel;
    if (kernel == 0)
        kernel = (2.0 * seg0.measured.a * factor <= cfg.small_vessel_diameter_px) ? 3 : 7;

    if (stats)
        stats->frame_ms.push_back(
            std::chrono::duration<double, std::milli>(clock::now() - t0).count());

    for (std::size_t t = 1; t < frames.size(); ++t) {
        t0 = clock::now();
        const auto pre = detail::preprocess_frame(frames[t], cfg);
        const ClusterMap cmap = cluster(pre.img_b, kernel);
        TrackFrameResult tf = track_frame(state, cmap, pre.fa, pre.img_b, cfg);
        state = tf.state;
        results.push_back(detail::to_full_resolution(static_cast<int>(t), tf.segment,
                                                     tf.seed_source, factor));
        if (stats)
            stats->frame_ms.push_back(
                std::chrono::duration<double, std::milli>(clock::now() - t0).count());
    }
    return results;
}

} // namespace vtrack
