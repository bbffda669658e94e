#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "vtrack/errors.hpp"
#include "vtrack/image.hpp"

namespace vtrack {

struct EllipseParams {
    double cx = 0.0;
    double cy = 0.0;
    double a = 1.0; // semi-major
    double b = 1.0; // semi-minor
    double theta = 0.0; // major-axis angle, [-pi/2, pi/2)

    /// <= 1 inside, 1 on the boundary, > 1 outside.
    double implicit_value(double x, double y) const {
        const double ct = std::cos(theta), st = std::sin(theta);
        const double dx = x - cx, dy = y - cy;
        const double u = ct * dx + st * dy;
        const double v = -st * dx + ct * dy;
        return (u * u) / (a * a) + (v * v) / (b * b);
    }

    bool contains(double x, double y) const { return implicit_value(x, y) <= 1.0; }

    Point point_at(double angle) const {
        const double ct = std::cos(theta), st = std::sin(theta);
        const double u = a * std::cos(angle), v = b * std::sin(angle);
        return {cx + ct * u - st * v, cy + st * u + ct * v};
    }

    EllipseParams scaled(double factor) const {
        return {cx, cy, a * factor, b * factor, theta};
    }
};

inline std::vector<Point> sample_ellipse(const EllipseParams& e, int n) {
    std::vector<Point> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i)
        pts.push_back(e.point_at(2.0 * std::numbers::pi * i / n));
    return pts;
}

namespace detail {

/// Geometric parameters from conic coefficients
/// A x^2 + B x y + C y^2 + D x + E y + F = 0.
inline EllipseParams conic_to_ellipse(double A, double B, double C, double D,
                                      double E, double F) {
    const double disc = B * B - 4.0 * A * C;
    if (!(disc < 0.0)) throw DegenerateConfiguration("conic is not an ellipse");
    EllipseParams e;
    e.cx = (2.0 * C * D - B * E) / disc;
    e.cy = (2.0 * A * E - B * D) / disc;
    // Constant term of the conic translated to its center.
    const double f0 = A * e.cx * e.cx + B * e.cx * e.cy + C * e.cy * e.cy +
                      D * e.cx + E * e.cy + F;
    Eigen::Matrix2d m;
    m << A, B / 2.0, B / 2.0, C;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    const Eigen::Vector2d evals = es.eigenvalues();
    // Axis^2 = -f0 / lambda; both must be positive for a real ellipse.
    const double q0 = -f0 / evals(0), q1 = -f0 / evals(1);
    if (!(q0 > 0.0) || !(q1 > 0.0) || !std::isfinite(q0) || !std::isfinite(q1))
        throw DegenerateConfiguration("degenerate ellipse axes");
    double len0 = std::sqrt(q0), len1 = std::sqrt(q1);
    Eigen::Vector2d major_dir;
    if (len0 >= len1) {
        e.a = len0;
        e.b = len1;
        major_dir = es.eigenvectors().col(0);
    } else {
        e.a = len1;
        e.b = len0;
        major_dir = es.eigenvectors().col(1);
    }
    double theta = std::atan2(major_dir(1), major_dir(0));
    // Normalize to [-pi/2, pi/2).
    while (theta >= std::numbers::pi / 2.0) theta -= std::numbers::pi;
    while (theta < -std::numbers::pi / 2.0) theta += std::numbers::pi;
    e.theta = theta;
    return e;
}

} // namespace detail

/// Direct least-squares ellipse fit (conic with the 4ac - b^2 = 1
/// constraint), using the numerically stable reduced 3x3 eigenproblem.
/// Points are centered on their centroid before fitting.
inline EllipseParams fit_ellipse(std::span<const Point> points) {
    const std::size_t n = points.size();
    if (n < 5) throw TooFewPoints("ellipse fit needs >= 5 points");

    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    Eigen::MatrixXd d1(n, 3), d2(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = points[i].x - mx, y = points[i].y - my;
        d1(i, 0) = x * x;
        d1(i, 1) = x * y;
        d1(i, 2) = y * y;
        d2(i, 0) = x;
        d2(i, 1) = y;
        d2(i, 2) = 1.0;
    }
    const Eigen::Matrix3d s1 = d1.transpose() * d1;
    const Eigen::Matrix3d s2 = d1.transpose() * d2;
    const Eigen::Matrix3d s3 = d2.transpose() * d2;
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
    if (!lu.isInvertible())
        throw DegenerateConfiguration("collinear or coincident points");
    const Eigen::Matrix3d t = -lu.solve(s2.transpose());
    const Eigen::Matrix3d m0 = s1 + s2 * t;
    Eigen::Matrix3d m;
    m.row(0) = m0.row(2) / 2.0;
    m.row(1) = -m0.row(1);
    m.row(2) = m0.row(0) / 2.0;

    const Eigen::EigenSolver<Eigen::Matrix3d> es(m);
    int best = -1;
    double best_cond = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(es.eigenvalues()(i).imag()) > 1e-9) continue;
        const Eigen::Vector3d v = es.eigenvectors().col(i).real();
        const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
        if (cond > 0.0 && (best < 0 || cond > best_cond)) {
            best = i;
            best_cond = cond;
        }
    }
    if (best < 0) throw DegenerateConfiguration("no ellipse satisfies the constraint");
    const Eigen::Vector3d a1 = es.eigenvectors().col(best).real();
    const Eigen::Vector3d a2 = t * a1;

    // Conic in centered coordinates; shift back to image coordinates.
    const double A = a1(0), B = a1(1), C = a1(2);
    const double D = a2(0) - 2.0 * A * mx - B * my;
    const double E = a2(1) - 2.0 * C * my - B * mx;
    const double F = a2(2) + A * mx * mx + B * mx * my + C * my * my -
                     a2(0) * mx - a2(1) * my;
    return detail::conic_to_ellipse(A, B, C, D, E, F);
}

} // namespace vtrack
