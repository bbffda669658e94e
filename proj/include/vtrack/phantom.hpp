#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "vtrack/ellipse.hpp"
#include "vtrack/image.hpp"
#include "vtrack/pipeline.hpp"

namespace vtrack {

enum class SpeckleMode { none, rayleigh };
enum class MotionMode { still, longitudinal_drift, compression, jump };

/// Synthetic B-scan sequence: dark elliptical lumen with a bright wall
/// ring on a tissue background, multiplicative Rayleigh speckle, and a
/// scripted motion model. Ground truth is the analytic lumen ellipse.
struct PhantomSpec {
    int width = 832;
    int height = 512;
    int frames = 100;
    EllipseParams vessel{200.0, 256.0, 35.0, 35.0, 0.0}; // frame 0, full-res px
    double lumen_intensity = 25.0;
    double tissue_intensity = 140.0;
    double wall_width = 8.0;
    SpeckleMode speckle = SpeckleMode::rayleigh;
    double speckle_scale = 0.7978845608028654; // sqrt(2/pi): unit-mean speckle
    MotionMode motion = MotionMode::still;
    double drift_vx = 0.0;
    double drift_vy = 0.0; // longitudinal_drift, px/frame
    double compression_amplitude = 0.0;
    double compression_period = 50.0;
    int jump_frame = 50;
    Point jump_offset{0.0, 0.0};
    uint64_t rng_seed = 1234;
};

/// Analytic lumen ellipse at frame t.
inline EllipseParams phantom_ellipse_at(const PhantomSpec& spec, int t) {
    EllipseParams e = spec.vessel;
    switch (spec.motion) {
        case MotionMode::still:
            break;
        case MotionMode::longitudinal_drift:
            e.cx += spec.drift_vx * t;
            e.cy += spec.drift_vy * t;
            break;
        case MotionMode::compression: {
            // Area-preserving axis modulation: a grows as b shrinks.
            const double s = 1.0 + spec.compression_amplitude *
                                       std::sin(2.0 * std::numbers::pi * t /
                                                spec.compression_period);
            e.a = spec.vessel.a * s;
            e.b = spec.vessel.b / s;
            if (e.a < e.b) std::swap(e.a, e.b);
            break;
        }
        case MotionMode::jump:
            if (t >= spec.jump_frame) {
                e.cx += spec.jump_offset.x;
                e.cy += spec.jump_offset.y;
            }
            break;
    }
    return e;
}

struct PhantomResult {
    std::vector<GrayImage> frames;
    std::vector<ContourResult> truth;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    // (0, 1]; explicit mapping for cross-platform determinism.
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
}

inline double rayleigh_sample(std::mt19937_64& rng, double scale) {
    return scale * std::sqrt(-2.0 * std::log(uniform01(rng)));
}

} // namespace detail

inline PhantomResult generate(const PhantomSpec& spec) {
    if (spec.lumen_intensity < 0.0 || spec.lumen_intensity > 255.0 ||
        spec.tissue_intensity < 0.0 || spec.tissue_intensity > 255.0)
        throw BadConfig("phantom intensities must be in [0,255]");
    const double wall_intensity = std::min(255.0, 1.3 * spec.tissue_intensity);

    PhantomResult out;
    out.frames.reserve(spec.frames);
    out.truth.reserve(spec.frames);
    for (int t = 0; t < spec.frames; ++t) {
        const EllipseParams lumen = phantom_ellipse_at(spec, t);
        const double extent = lumen.a + spec.wall_width;
        if (lumen.cx - extent < 0.0 || lumen.cx + extent > spec.width - 1.0 ||
            lumen.cy - extent < 0.0 || lumen.cy + extent > spec.height - 1.0)
            throw VesselOutOfBounds("vessel leaves the image at frame " +
                                    std::to_string(t));
        const EllipseParams wall{lumen.cx, lumen.cy, lumen.a + spec.wall_width,
                                 lumen.b + spec.wall_width, lumen.theta};

        GrayImage img(spec.width, spec.height);
        std::mt19937_64 rng(spec.rng_seed ^
                            (0x9E3779B97F4A7C15ULL * (static_cast<uint64_t>(t) + 1)));
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                double v = spec.tissue_intensity;
                if (lumen.implicit_value(x, y) <= 1.0)
                    v = spec.lumen_intensity;
                else if (wall.implicit_value(x, y) <= 1.0)
                    v = wall_intensity;
                if (spec.speckle == SpeckleMode::rayleigh)
                    v *= detail::rayleigh_sample(rng, spec.speckle_scale);
                img.at(x, y) = std::clamp(v, 0.0, 255.0);
            }
        }
        out.frames.push_back(std::move(img));

        ContourResult truth;
        truth.frame_index = t;
        truth.points = sample_ellipse(lumen, 360);
        truth.ellipse = lumen;
        truth.seed_used = SeedSource::manual;
        out.truth.push_back(std::move(truth));
    }
    return out;
}

} // namespace vtrack
