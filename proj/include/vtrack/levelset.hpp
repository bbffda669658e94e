#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "vtrack/config.hpp"
#include "vtrack/ellipse.hpp"
#include "vtrack/image.hpp"
#include "vtrack/metrics.hpp"
#include "vtrack/parallel.hpp"

namespace vtrack {

using LevelSetField = GrayImage;

/// Separable Gaussian blur, clamp-to-edge, radius 3*sigma.
inline GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + r];
    }
    for (auto& v : k) v /= sum;

    GrayImage tmp(img.width, img.height), out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * img.at_clamped(x + i, y);
            tmp.at(x, y) = s;
        }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * tmp.at_clamped(x, y + i);
            out.at(x, y) = s;
        }
    return out;
}

/// Edge indicator g = 1 / (1 + |grad(G_sigma * img)|^2).
inline GrayImage edge_indicator(const GrayImage& img, double sigma) {
    const GrayImage smooth = gaussian_blur(img, sigma);
    GrayImage g(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double gx = (smooth.at_clamped(x + 1, y) - smooth.at_clamped(x - 1, y)) / 2.0;
            const double gy = (smooth.at_clamped(x, y + 1) - smooth.at_clamped(x, y - 1)) / 2.0;
            g.at(x, y) = 1.0 / (1.0 + gx * gx + gy * gy);
        }
    return g;
}

/// Binary elliptical LSF: -c0 inside the ellipse scaled by `shrink`
/// about its center, +c0 outside.
inline LevelSetField init_lsf(const EllipseParams& ellipse, double shrink,
                              int width, int height, double c0) {
    const EllipseParams e = ellipse.scaled(shrink);
    if (e.a < 2.0 || e.b < 2.0)
        throw EllipseTooSmall("shrunken ellipse axes must be >= 2 px");
    LevelSetField phi(width, height, c0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (e.implicit_value(x, y) <= 1.0) phi.at(x, y) = -c0;
    return phi;
}

namespace detail {

/// Narrowband mask: pixels within Chebyshev distance `halfwidth` of a
/// zero crossing (a sign change against a 4-neighbor).
inline std::vector<uint8_t> narrowband_mask(const GrayImage& phi, int halfwidth) {
    const int w = phi.width, h = phi.height;
    std::vector<uint8_t> cross(phi.size(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double v = phi.at(x, y);
            if ((x + 1 < w && v * phi.at(x + 1, y) <= 0.0 && (v != 0.0 || phi.at(x + 1, y) != 0.0)) ||
                (y + 1 < h && v * phi.at(x, y + 1) <= 0.0 && (v != 0.0 || phi.at(x, y + 1) != 0.0))) {
                cross[static_cast<std::size_t>(y) * w + x] = 1;
                if (x + 1 < w) cross[static_cast<std::size_t>(y) * w + x + 1] = 1;
                if (y + 1 < h) cross[static_cast<std::size_t>(y + 1) * w + x] = 1;
            }
        }
    // Separable Chebyshev dilation.
    std::vector<uint8_t> tmp(phi.size(), 0), band(phi.size(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            uint8_t v = 0;
            for (int d = -halfwidth; d <= halfwidth && !v; ++d) {
                const int xx = x + d;
                if (xx >= 0 && xx < w) v = cross[static_cast<std::size_t>(y) * w + xx];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = v;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            uint8_t v = 0;
            for (int d = -halfwidth; d <= halfwidth && !v; ++d) {
                const int yy = y + d;
                if (yy >= 0 && yy < h) v = tmp[static_cast<std::size_t>(yy) * w + x];
            }
            band[static_cast<std::size_t>(y) * w + x] = v;
        }
    return band;
}

/// Derivative ratio p'(s)/s of the double-well potential, with the
/// removable singularity at s = 0 evaluated as 1.
inline double double_well_dp(double s) {
    if (s <= 1.0) {
        if (s < 1e-10) return 1.0;
        return std::sin(2.0 * std::numbers::pi * s) / (2.0 * std::numbers::pi * s);
    }
    return (s - 1.0) / s;
}

/// Marching-squares zero-crossing segments of a scalar field, with
/// linearly interpolated (sub-pixel) endpoints. Saddles are resolved
/// by the sign of the cell-center average.
inline std::vector<std::pair<Point, Point>>
zero_segments(const std::vector<double>& f, int w, int h) {
    auto value = [&](int x, int y) { return f[static_cast<std::size_t>(y) * w + x]; };
    auto inside = [&](int x, int y) { return value(x, y) < 0.0; };
    auto lerp_zero = [](double v0, double v1) {
        const double d = v0 - v1;
        return std::abs(d) < 1e-300 ? 0.5 : v0 / d;
    };
    std::vector<std::pair<Point, Point>> segments;
    for (int y = 0; y + 1 < h; ++y)
        for (int x = 0; x + 1 < w; ++x) {
            const bool i00 = inside(x, y), i10 = inside(x + 1, y);
            const bool i01 = inside(x, y + 1), i11 = inside(x + 1, y + 1);
            const int code = (i00 ? 1 : 0) | (i10 ? 2 : 0) | (i11 ? 4 : 0) | (i01 ? 8 : 0);
            if (code == 0 || code == 15) continue;
            const double v00 = value(x, y), v10 = value(x + 1, y);
            const double v01 = value(x, y + 1), v11 = value(x + 1, y + 1);
            const Point top{x + lerp_zero(v00, v10), static_cast<double>(y)};
            const Point bottom{x + lerp_zero(v01, v11), static_cast<double>(y + 1)};
            const Point left{static_cast<double>(x), y + lerp_zero(v00, v01)};
            const Point right{static_cast<double>(x + 1), y + lerp_zero(v10, v11)};
            switch (code) {
                case 1: case 14: segments.emplace_back(left, top); break;
                case 2: case 13: segments.emplace_back(top, right); break;
                case 3: case 12: segments.emplace_back(left, right); break;
                case 4: case 11: segments.emplace_back(right, bottom); break;
                case 6: case 9: segments.emplace_back(top, bottom); break;
                case 7: case 8: segments.emplace_back(bottom, left); break;
                case 5: // saddle: resolve by cell-center sign
                case 10: {
                    const bool center_in = (v00 + v10 + v01 + v11) < 0.0;
                    const bool diag = (code == 5) == center_in;
                    if (diag) {
                        segments.emplace_back(left, top);
                        segments.emplace_back(right, bottom);
                    } else {
                        segments.emplace_back(left, bottom);
                        segments.emplace_back(right, top);
                    }
                    break;
                }
                default: break;
            }
        }
    return segments;
}

inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const double abx = b.x - a.x, aby = b.y - a.y;
    const double len2 = abx * abx + aby * aby;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
        t = std::clamp(t, 0.0, 1.0);
    }
    const double dx = p.x - (a.x + t * abx), dy = p.y - (a.y + t * aby);
    return std::hypot(dx, dy);
}

/// Rebuilds phi as a signed distance field to its interpolated zero
/// crossing, truncated to +-clamp_value. Near the front the distance
/// is measured to the marching-squares segments of phi, so sub-pixel
/// front positions survive reinitialization; far pixels use a
/// pixel-grid distance transform (they sit at the clamp anyway).
inline void redistance_truncated(GrayImage& phi, double clamp_value) {
    const int w = phi.width, h = phi.height;
    RegionMask neg(w, h), pos(w, h);
    bool any_neg = false, any_pos = false;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (phi.data[i] < 0.0) {
            neg.bits[i] = 1;
            any_neg = true;
        } else {
            pos.bits[i] = 1;
            any_pos = true;
        }
    }
    if (!any_neg || !any_pos) return;
    const std::vector<double> d_to_neg = edt_squared(neg);
    const std::vector<double> d_to_pos = edt_squared(pos);

    const auto segments = zero_segments(phi.data, w, h);
    // Coarse spatial buckets over segment midpoints keep the exact
    // distance query local instead of scanning every segment.
    constexpr int cell = 8;
    const int bw = (w + cell - 1) / cell, bh = (h + cell - 1) / cell;
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(bw) * bh);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const int bx = std::clamp(static_cast<int>(segments[s].first.x) / cell, 0, bw - 1);
        const int by = std::clamp(static_cast<int>(segments[s].first.y) / cell, 0, bh - 1);
        buckets[static_cast<std::size_t>(by) * bw + bx].push_back(static_cast<int>(s));
    }
    // A query at distance <= clamp_value+1 from the front only needs
    // buckets within this radius (bucket anchor offset <= cell+1).
    const int reach = (static_cast<int>(clamp_value) + cell + 2 + cell - 1) / cell;

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double sign = phi.data[i] < 0.0 ? -1.0 : 1.0;
            const double coarse =
                std::sqrt(phi.data[i] < 0.0 ? d_to_pos[i] : d_to_neg[i]) - 0.5;
            if (coarse >= clamp_value + 1.0) {
                phi.data[i] = sign * clamp_value;
                continue;
            }
            double best = clamp_value;
            const int bx0 = x / cell, by0 = y / cell;
            for (int by = std::max(0, by0 - reach); by <= std::min(bh - 1, by0 + reach); ++by)
                for (int bx = std::max(0, bx0 - reach); bx <= std::min(bw - 1, bx0 + reach); ++bx)
                    for (int s : buckets[static_cast<std::size_t>(by) * bw + bx]) {
                        const double d = point_segment_distance(
                            {static_cast<double>(x), static_cast<double>(y)},
                            segments[s].first, segments[s].second);
                        best = std::min(best, d);
                    }
            phi.data[i] = sign * best;
        }
}

} // namespace detail

/// Mean |grad(phi)| over the narrowband; the distance-regularity gauge.
inline double mean_gradient_narrowband(const GrayImage& phi, int halfwidth) {
    const auto band = detail::narrowband_mask(phi, halfwidth);
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < phi.height; ++y)
        for (int x = 0; x < phi.width; ++x) {
            if (!band[static_cast<std::size_t>(y) * phi.width + x]) continue;
            const double px = (phi.at_clamped(x + 1, y) - phi.at_clamped(x - 1, y)) / 2.0;
            const double py = (phi.at_clamped(x, y + 1) - phi.at_clamped(x, y - 1)) / 2.0;
            sum += std::hypot(px, py);
            ++count;
        }
    return count ? sum / static_cast<double>(count) : 0.0;
}

/// Distance-regularized level set evolution (gradient flow with the
/// double-well potential), explicit Euler, Jacobi updates restricted to
/// the narrowband around the current zero crossing. The field is
/// rebuilt as a truncated signed distance function before the first
/// step and between steps, which keeps |grad(phi)| near 1 on the band
/// and lets a binary (+-c0) initialization engage the compact Dirac
/// window immediately.
inline LevelSetField drlse_evolve(const LevelSetField& phi0, const GrayImage& img_b,
                                  const DrlseParams& params, int threads = 1) {
    if (params.iterations < 1) throw BadConfig("drlse iterations must be >= 1");
    if (params.mu <= 0.0 || params.mu >= 0.25)
        throw BadConfig("drlse mu must be in (0, 0.25)");
    if (!phi0.same_dims(img_b)) throw DimensionMismatch("phi and image dims differ");

    const int w = phi0.width, h = phi0.height;
    const std::size_t n = phi0.size();
    const GrayImage g = edge_indicator(img_b, params.edge_sigma);
    const double clamp_value = params.narrowband_halfwidth + 2.0;

    GrayImage phi = phi0;
    GrayImage next = phi0;
    detail::redistance_truncated(phi, clamp_value);
    std::vector<double> fx(n), fy(n), gnx(n), gny(n);

    const double eps = params.epsilon;
    const double delta_norm = 1.0 / (2.0 * eps);

    for (int iter = 0; iter < params.iterations; ++iter) {
        const auto band = detail::narrowband_mask(phi, params.narrowband_halfwidth);

        parallel_for(0, h, threads, [&](int y0, int y1) {
            for (int y = y0; y < y1; ++y)
                for (int x = 0; x < w; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    const double dx = (phi.at_clamped(x + 1, y) - phi.at_clamped(x - 1, y)) / 2.0;
                    const double dy = (phi.at_clamped(x, y + 1) - phi.at_clamped(x, y - 1)) / 2.0;
                    const double s = std::hypot(dx, dy);
                    const double dps = detail::double_well_dp(s);
                    fx[i] = dps * dx;
                    fy[i] = dps * dy;
                    const double inv = 1.0 / (s + 1e-10);
                    gnx[i] = g.data[i] * dx * inv;
                    gny[i] = g.data[i] * dy * inv;
                }
        });

        bool finite = true;
        parallel_for(0, h, threads, [&](int y0, int y1) {
            auto field_at = [&](const std::vector<double>& f, int x, int y) {
                x = std::clamp(x, 0, w - 1);
                y = std::clamp(y, 0, h - 1);
                return f[static_cast<std::size_t>(y) * w + x];
            };
            for (int y = y0; y < y1; ++y)
                for (int x = 0; x < w; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    if (!band[i]) {
                        next.data[i] = phi.data[i];
                        continue;
                    }
                    const double dist_reg =
                        (field_at(fx, x + 1, y) - field_at(fx, x - 1, y)) / 2.0 +
                        (field_at(fy, x, y + 1) - field_at(fy, x, y - 1)) / 2.0;
                    const double div_gn =
                        (field_at(gnx, x + 1, y) - field_at(gnx, x - 1, y)) / 2.0 +
                        (field_at(gny, x, y + 1) - field_at(gny, x, y - 1)) / 2.0;
                    const double v = phi.data[i];
                    const double delta =
                        std::abs(v) <= eps
                            ? delta_norm * (1.0 + std::cos(std::numbers::pi * v / eps))
                            : 0.0;
                    const double upd =
                        v + params.mu * dist_reg +
                        params.timestep * delta *
                            (params.lambda * div_gn + params.alpha * g.data[i]);
                    next.data[i] = upd;
                    if (!std::isfinite(upd)) finite = false;
                }
        });
        if (!finite) throw NumericalBlowup("non-finite level-set value");
        std::swap(phi.data, next.data);
        if (iter + 1 < params.iterations)
            detail::redistance_truncated(phi, clamp_value);
    }
    return phi;
}

namespace detail {

inline int64_t quantize_coord(double v) { return llround(v * 1048576.0); }

} // namespace detail

/// Sub-pixel zero-crossing polygon of the largest negative region of
/// phi, ordered counterclockwise (positive shoelace area in x-right,
/// y-down image coordinates). Other negative components are discarded.
inline std::vector<Point> extract_contour(const LevelSetField& phi) {
    const int w = phi.width, h = phi.height;
    bool has_neg = false, has_pos = false;
    for (double v : phi.data) {
        has_neg |= v < 0.0;
        has_pos |= v >= 0.0;
    }
    if (!has_neg || !has_pos) throw NoZeroCrossing("phi has no sign change");

    // Label negative components (4-connectivity), keep the largest.
    std::vector<int> label(phi.size(), 0);
    int next_label = 0, best_label = 0;
    std::size_t best_size = 0;
    std::vector<int> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (phi.data[i] >= 0.0 || label[i] != 0) continue;
            ++next_label;
            std::size_t size = 0;
            stack.push_back(static_cast<int>(i));
            label[i] = next_label;
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                ++size;
                const int cx = cur % w, cy = cur / w;
                const int nbr[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
                for (const auto& nb : nbr) {
                    if (nb[0] < 0 || nb[0] >= w || nb[1] < 0 || nb[1] >= h) continue;
                    const std::size_t j = static_cast<std::size_t>(nb[1]) * w + nb[0];
                    if (phi.data[j] < 0.0 && label[j] == 0) {
                        label[j] = next_label;
                        stack.push_back(static_cast<int>(j));
                    }
                }
            }
            if (size > best_size) {
                best_size = size;
                best_label = next_label;
            }
        }

    // Field that is negative exactly on the largest component.
    std::vector<double> psi(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i)
        psi[i] = (phi.data[i] < 0.0 && label[i] != best_label) ? -phi.data[i] : phi.data[i];

    const auto segments = detail::zero_segments(psi, w, h);
    if (segments.empty()) throw NoZeroCrossing("no boundary segments");

    // Chain segments into loops by shared endpoints.
    std::map<std::pair<int64_t, int64_t>, std::vector<int>> by_endpoint;
    auto key = [](const Point& p) {
        return std::make_pair(detail::quantize_coord(p.x), detail::quantize_coord(p.y));
    };
    for (std::size_t i = 0; i < segments.size(); ++i) {
        by_endpoint[key(segments[i].first)].push_back(static_cast<int>(i));
        by_endpoint[key(segments[i].second)].push_back(static_cast<int>(i));
    }
    std::vector<uint8_t> used(segments.size(), 0);
    std::vector<Point> best_loop;
    double best_area = 0.0;
    for (std::size_t start = 0; start < segments.size(); ++start) {
        if (used[start]) continue;
        std::vector<Point> loop;
        used[start] = 1;
        loop.push_back(segments[start].first);
        Point cur = segments[start].second;
        const auto start_key = key(segments[start].first);
        while (key(cur) != start_key) {
            loop.push_back(cur);
            const auto& cands = by_endpoint[key(cur)];
            int next_seg = -1;
            for (int c : cands)
                if (!used[c]) {
                    next_seg = c;
                    break;
                }
            if (next_seg < 0) break; // open chain (touches border); drop
            used[next_seg] = 1;
            cur = key(segments[next_seg].first) == key(cur) ? segments[next_seg].second
                                                            : segments[next_seg].first;
        }
        if (key(cur) != start_key || loop.size() < 3) continue;
        double area2 = 0.0;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Point& p = loop[i];
            const Point& q = loop[(i + 1) % loop.size()];
            area2 += p.x * q.y - q.x * p.y;
        }
        if (std::abs(area2) > std::abs(best_area)) {
            best_area = area2;
            best_loop = std::move(loop);
            if (best_area < 0.0) {
                std::reverse(best_loop.begin(), best_loop.end());
                best_area = -best_area;
            }
        }
    }
    if (best_loop.empty()) throw NoZeroCrossing("no closed boundary loop");
    return best_loop;
}

} // namespace vtrack
