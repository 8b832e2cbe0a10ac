#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "palmid/errors.hpp"
#include "palmid/image.hpp"

namespace palmid {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline constexpr std::size_t kKeypointCount = 9;

/// The nine palmar boundary keypoints, in source-image pixel coordinates.
using KeypointSet = std::array<Point2, kKeypointCount>;

struct Homography {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

    Point2 apply(const Point2& p) const {
        const Eigen::Vector3d v = m * Eigen::Vector3d(p.x, p.y, 1.0);
        return {v.x() / v.z(), v.y() / v.z()};
    }
};

/// Default ROI-frame destination layout: eight points on the boundary of the
/// central square plus the centroid, in a 224x224 frame.
inline KeypointSet default_destination_points() {
    const double lo = 32.0, hi = 192.0, mid = 112.0;
    return {{{lo, lo}, {mid, lo}, {hi, lo},
             {hi, mid}, {hi, hi}, {mid, hi},
             {lo, hi}, {lo, mid}, {mid, mid}}};
}

namespace detail {
// Hartley normalization: centroid to origin, mean distance sqrt(2).
inline Eigen::Matrix3d normalizing_transform(const KeypointSet& pts) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pts) { cx += p.x; cy += p.y; }
    cx /= kKeypointCount;
    cy /= kKeypointCount;
    double mean_dist = 0.0;
    for (const auto& p : pts)
        mean_dist += std::hypot(p.x - cx, p.y - cy);
    mean_dist /= kKeypointCount;
    const double s = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}
}  // namespace detail

/// Least-squares DLT over all nine correspondences.
inline Homography estimate_homography(const KeypointSet& src, const KeypointSet& dst) {
    for (const auto& p : src)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw DegenerateKeypoints("non-finite keypoint");

    const Eigen::Matrix3d ts = detail::normalizing_transform(src);
    const Eigen::Matrix3d td = detail::normalizing_transform(dst);

    Eigen::Matrix<double, 2 * kKeypointCount, 9> a;
    for (std::size_t i = 0; i < kKeypointCount; ++i) {
        const Eigen::Vector3d s = ts * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
        const Eigen::Vector3d d = td * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
        const double x = s.x(), y = s.y(), u = d.x(), v = d.y();
        a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 2 * kKeypointCount, 9>> svd(
        a, Eigen::ComputeFullV);
    // A unique solution needs rank 8; collinear or coincident keypoints
    // leave a larger null space.
    if (svd.singularValues()(7) < 1e-8)
        throw DegenerateKeypoints("degenerate keypoint configuration");
    const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);

    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    Eigen::Matrix3d out = td.inverse() * hn * ts;
    if (std::abs(out(2, 2)) > 1e-12) out /= out(2, 2);
    if (std::abs(out.determinant()) <= 1e-12)
        throw DegenerateKeypoints("degenerate keypoint configuration");
    return {out};
}

/// Warps the source into a 224x224 ROI.  h maps source to ROI coordinates;
/// each ROI pixel is inverse-mapped and sampled bilinearly, zero outside.
inline Image warp_to_roi(const Image& src, const Homography& h) {
    if (std::abs(h.m.determinant()) <= 1e-12)
        throw SingularHomography("homography not invertible");
    const Eigen::Matrix3d inv = h.m.inverse();
    Image out(kRoiSize, kRoiSize, src.channels);
    for (int y = 0; y < kRoiSize; ++y)
        for (int x = 0; x < kRoiSize; ++x) {
            const Eigen::Vector3d s = inv * Eigen::Vector3d(x, y, 1.0);
            const double sx = s.x() / s.z();
            const double sy = s.y() / s.z();
            for (int c = 0; c < src.channels; ++c)
                out.at(x, y, c) = sample_bilinear(src, sx, sy, c);
        }
    return out;
}

/// Thin-plate spline with kernel U(r) = r^2 log(r^2), U(0) = 0.
/// Maps points from the control_src frame; at lambda=0 it interpolates the
/// control displacements exactly.
class TpsWarp {
public:
    TpsWarp() = default;

    Point2 apply(const Point2& p) const {
        double x = affine_(0, 0) + affine_(1, 0) * p.x + affine_(2, 0) * p.y;
        double y = affine_(0, 1) + affine_(1, 1) * p.x + affine_(2, 1) * p.y;
        for (std::size_t i = 0; i < src_.size(); ++i) {
            const double u = kernel(p, src_[i]);
            x += coeff_(static_cast<Eigen::Index>(i), 0) * u;
            y += coeff_(static_cast<Eigen::Index>(i), 1) * u;
        }
        return {x, y};
    }

    /// w^T K w, the discrete bending energy (summed over x and y).
    double bending_energy() const {
        const std::size_t n = src_.size();
        Eigen::MatrixXd k(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    kernel(src_[i], src_[j]);
        double e = 0.0;
        for (int d = 0; d < 2; ++d)
            e += (coeff_.col(d).transpose() * k * coeff_.col(d))(0, 0);
        return e;
    }

    const Eigen::MatrixXd& radial_coefficients() const { return coeff_; }
    const Eigen::Matrix<double, 3, 2>& affine_part() const { return affine_; }

    static double kernel(const Point2& a, const Point2& b) {
        const double r2 = (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
        return r2 > 0.0 ? r2 * std::log(r2) : 0.0;
    }

    friend TpsWarp fit_tps(const std::vector<Point2>&, const std::vector<Point2>&, double);

private:
    std::vector<Point2> src_;
    Eigen::MatrixXd coeff_;  // n x 2 radial coefficients
    Eigen::Matrix<double, 3, 2> affine_ = Eigen::Matrix<double, 3, 2>::Zero();
};

inline TpsWarp fit_tps(const std::vector<Point2>& control_src,
                       const std::vector<Point2>& control_dst, double lambda = 0.0) {
    const std::size_t n = control_src.size();
    if (n < 3 || control_dst.size() != n)
        throw DegenerateControlPoints("TPS needs >= 3 matched control points");
    if (lambda < 0.0) throw Error("TPS regularization must be >= 0");

    // [K + lambda*I  P] [w]   [dst]
    // [P^T           0] [a] = [0]
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n + 3, n + 3);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 3, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < n; ++j)
            sys(ii, static_cast<Eigen::Index>(j)) =
                TpsWarp::kernel(control_src[i], control_src[j]);
        sys(ii, ii) += lambda;
        sys(ii, n) = 1.0;
        sys(ii, n + 1) = control_src[i].x;
        sys(ii, n + 2) = control_src[i].y;
        sys(n, ii) = 1.0;
        sys(n + 1, ii) = control_src[i].x;
        sys(n + 2, ii) = control_src[i].y;
        rhs(ii, 0) = control_dst[i].x;
        rhs(ii, 1) = control_dst[i].y;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    if (!lu.isInvertible())
        throw DegenerateControlPoints("singular TPS system (collinear control points?)");
    const Eigen::MatrixXd sol = lu.solve(rhs);

    TpsWarp w;
    w.src_ = control_src;
    w.coeff_ = sol.topRows(static_cast<Eigen::Index>(n));
    w.affine_ = sol.bottomRows(3);
    return w;
}

/// Resamples the ROI through the warp.  The warp is the backward map: it is
/// evaluated at each output pixel and the result sampled from the input.
inline Image apply_tps(const TpsWarp& warp, const Image& roi) {
    Image out(roi.width, roi.height, roi.channels);
    for (int y = 0; y < roi.height; ++y)
        for (int x = 0; x < roi.width; ++x) {
            const Point2 s = warp.apply({static_cast<double>(x), static_cast<double>(y)});
            for (int c = 0; c < roi.channels; ++c)
                out.at(x, y, c) = sample_bilinear(roi, s.x, s.y, c);
        }
    return out;
}

}  // namespace palmid
