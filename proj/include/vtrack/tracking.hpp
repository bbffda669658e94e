#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "vtrack/config.hpp"
#include "vtrack/preprocess.hpp"
#include "vtrack/segmentation.hpp"

namespace vtrack {

enum class SeedSource { ekf, cluster, manual };

inline const char* seed_source_name(SeedSource s) {
    switch (s) {
        case SeedSource::ekf: return "ekf";
        case SeedSource::cluster: return "cluster";
        default: return "manual";
    }
}

/// Kalman state over [cx, cy, a, b] plus the dual seed bookkeeping:
/// `seed` is the seed that segmented this frame (and anchors the next
/// frame's cluster-root search); `cluster_seed` records the most
/// recent cluster candidate for introspection.
struct TrackerState {
    Eigen::Vector4d x = Eigen::Vector4d::Zero();
    Eigen::Vector4d x_prev = Eigen::Vector4d::Zero();
    Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
    Point seed;
    Point cluster_seed;
    SeedSource seed_source = SeedSource::manual;
};

/// AR(2) prediction: x_pred = A1 x + A2 x_prev, P_pred = A1 P A1' + Q.
inline std::pair<Eigen::Vector4d, Eigen::Matrix4d>
ekf_predict(const TrackerState& state, const EkfParams& params) {
    const Eigen::Vector4d x_pred = params.A1 * state.x + params.A2 * state.x_prev;
    const Eigen::Matrix4d p_pred =
        params.A1 * state.P * params.A1.transpose() + params.Q;
    return {x_pred, p_pred};
}

struct KalmanUpdate {
    Eigen::Vector4d x;
    Eigen::Matrix4d P;
};

/// Measurement update with identity observation model:
/// K = P_pred (P_pred + R)^-1, x = x_pred + K (z - x_pred),
/// P = (I - K) P_pred, symmetrized.
inline KalmanUpdate ekf_update(const Eigen::Vector4d& x_pred,
                               const Eigen::Matrix4d& p_pred,
                               const Eigen::Vector4d& z, const EkfParams& params) {
    const Eigen::Matrix4d s = p_pred + params.R;
    const Eigen::FullPivLU<Eigen::Matrix4d> lu(s);
    if (!lu.isInvertible()) throw SingularInnovation("P_pred + R is singular");
    const Eigen::Matrix4d k = p_pred * lu.inverse();
    KalmanUpdate out;
    out.x = x_pred + k * (z - x_pred);
    out.P = (Eigen::Matrix4d::Identity() - k) * p_pred;
    out.P = ((out.P + out.P.transpose()) / 2.0).eval();
    return out;
}

/// Lowest-mean root within the axis-aligned elliptical region of
/// semi-axes (1.5 a_pred, b_pred) centered at prev_seed; boundary roots
/// included. Ties broken by distance to prev_seed, then row-major index.
inline Point cluster_seed_search(const ClusterMap& cmap, Point prev_seed,
                                 double a_pred, double b_pred) {
    if (a_pred <= 0.0 || b_pred <= 0.0)
        throw BadConfig("predicted axes must be > 0");
    const double ra = 1.5 * a_pred, rb = b_pred;
    int best = -1;
    double best_mean = 0.0, best_dist = 0.0;
    for (int r : cmap.roots) {
        const Point p = cmap.root_point(r);
        const double nx = (p.x - prev_seed.x) / ra;
        const double ny = (p.y - prev_seed.y) / rb;
        if (nx * nx + ny * ny > 1.0) continue;
        const double mean = cmap.patch_mean[r];
        const double dist = distance(p, prev_seed);
        if (best < 0 || mean < best_mean ||
            (mean == best_mean && dist < best_dist)) {
            best = r;
            best_mean = mean;
            best_dist = dist;
        }
    }
    if (best < 0) throw NoRootsInRegion("no cluster roots in search region");
    return cmap.root_point(best);
}

/// Switching rule: take the cluster seed when it disagrees with the EKF
/// prediction by more than the predicted semi-major axis (strict).
inline std::pair<Point, SeedSource> select_seed(Point s_ekf, Point s_c, double a_pred) {
    if (a_pred <= 0.0) throw BadConfig("a_pred must be > 0");
    if (distance(s_ekf, s_c) > a_pred) return {s_c, SeedSource::cluster};
    return {s_ekf, SeedSource::ekf};
}

struct TrackFrameResult {
    TrackerState state;
    SegmentResult segment;
    SeedSource seed_source = SeedSource::ekf;
};

/// One tracking step: predict, gather both seed candidates, switch,
/// segment, measure, update. Falls back to the other candidate if
/// segmentation fails from the chosen seed.
inline TrackFrameResult track_frame(const TrackerState& state, const ClusterMap& cmap,
                                    const GrayImage& fa, const GrayImage& img_b,
                                    const SequenceConfig& cfg) {
    const auto [x_pred, p_pred] = ekf_predict(state, cfg.ekf);
    const Point s_ekf{x_pred(0), x_pred(1)};
    const double a_pred = std::max(x_pred(2), 1.0);
    const double b_pred = std::max(x_pred(3), 1.0);

    // Anchor the root search at the seed that last segmented the vessel
    // successfully: it is the most reliable "where the vessel was" point
    // and keeps the search region from drifting with speckle noise.
    std::optional<Point> s_c;
    try {
        s_c = cluster_seed_search(cmap, state.seed, a_pred, b_pred);
    } catch (const NoRootsInRegion&) {
    }

    Point seed = s_ekf;
    SeedSource source = SeedSource::ekf;
    if (s_c) {
        auto [chosen, src] = select_seed(s_ekf, *s_c, a_pred);
        seed = chosen;
        source = src;
    }

    std::optional<SegmentResult> seg;
    try {
        seg = segment_from_seed(fa, img_b, seed, cfg);
    } catch (const Error&) {
    }
    if (!seg) {
        // Retry once from the other candidate.
        const Point other = (source == SeedSource::ekf && s_c) ? *s_c : s_ekf;
        const SeedSource other_src =
            (source == SeedSource::ekf && s_c) ? SeedSource::cluster : SeedSource::ekf;
        if (other.x != seed.x || other.y != seed.y) {
            try {
                seg = segment_from_seed(fa, img_b, other, cfg);
                seed = other;
                source = other_src;
            } catch (const Error&) {
            }
        }
    }
    if (!seg) throw TrackingLost("segmentation failed from both seed candidates");

    const EllipseParams& meas = seg->measured;
    const Eigen::Vector4d z{meas.cx, meas.cy, meas.a, meas.b};
    KalmanUpdate upd = ekf_update(x_pred, p_pred, z, cfg.ekf);
    if (upd.x(2) < upd.x(3)) std::swap(upd.x(2), upd.x(3));
    if (!(upd.x(3) > 0.0)) throw TrackingLost("tracked axes collapsed");

    TrackFrameResult out;
    out.state.x = upd.x;
    out.state.x_prev = state.x;
    out.state.P = upd.P;
    out.state.seed = seed;
    out.state.cluster_seed = s_c ? *s_c : seed;
    out.state.seed_source = source;
    out.segment = std::move(*seg);
    out.seed_source = source;
    return out;
}

} // namespace vtrack
