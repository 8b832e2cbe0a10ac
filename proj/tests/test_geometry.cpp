#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "palmid/geometry.hpp"

using namespace palmid;

namespace {

KeypointSet random_keypoints(std::mt19937& rng, double lo = 20.0, double hi = 400.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    KeypointSet pts;
    for (auto& p : pts) p = {u(rng), u(rng)};
    return pts;
}

Eigen::Matrix3d random_homography(std::mt19937& rng) {
    std::uniform_real_distribution<double> small(-0.3, 0.3);
    std::uniform_real_distribution<double> tiny(-5e-4, 5e-4);
    std::uniform_real_distribution<double> shift(-30.0, 30.0);
    Eigen::Matrix3d h;
    h << 1.0 + small(rng), small(rng), shift(rng),
         small(rng), 1.0 + small(rng), shift(rng),
         tiny(rng), tiny(rng), 1.0;
    return h;
}

KeypointSet map_points(const KeypointSet& pts, const Eigen::Matrix3d& h) {
    KeypointSet out;
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = Homography{h}.apply(pts[i]);
    return out;
}

double rel_error(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    // Compare up to scale via normalization on the bottom-right element.
    const Eigen::Matrix3d an = a / a(2, 2);
    const Eigen::Matrix3d bn = b / b(2, 2);
    return (an - bn).norm() / bn.norm();
}

Image smooth_gradient(int w = kRoiSize, int h = kRoiSize) {
    Image img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = 0.5f + 0.4f * std::sin(x / 37.0f) * std::cos(y / 29.0f);
    return img;
}

}  // namespace

TEST_CASE("identity correspondences recover the identity homography") {
    std::mt19937 rng(1);
    const KeypointSet pts = random_keypoints(rng);
    const Homography h = estimate_homography(pts, pts);
    CHECK((h.m - Eigen::Matrix3d::Identity()).norm() < 1e-9);
}

TEST_CASE("pure translation is recovered exactly") {
    std::mt19937 rng(2);
    const KeypointSet src = random_keypoints(rng);
    KeypointSet dst = src;
    for (auto& p : dst) {
        p.x += 10.0;
        p.y += 5.0;
    }
    const Homography h = estimate_homography(src, dst);
    Eigen::Matrix3d expect = Eigen::Matrix3d::Identity();
    expect(0, 2) = 10.0;
    expect(1, 2) = 5.0;
    CHECK((h.m - expect).norm() < 1e-9);
}

TEST_CASE("known random homographies are recovered within 1e-6") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const KeypointSet src = random_keypoints(rng);
        const Eigen::Matrix3d truth = random_homography(rng);
        const KeypointSet dst = map_points(src, truth);
        const Homography est = estimate_homography(src, dst);
        REQUIRE(rel_error(est.m, truth) < 1e-6);
    }
}

TEST_CASE("estimation is scale-covariant in its inputs") {
    std::mt19937 rng(4);
    const KeypointSet src = random_keypoints(rng);
    const Eigen::Matrix3d truth = random_homography(rng);
    const KeypointSet dst = map_points(src, truth);
    const Homography base = estimate_homography(src, dst);

    const double c = 3.5;
    KeypointSet src_s = src, dst_s = dst;
    for (auto& p : src_s) { p.x *= c; p.y *= c; }
    for (auto& p : dst_s) { p.x *= c; p.y *= c; }
    const Homography scaled = estimate_homography(src_s, dst_s);

    Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
    s(0, 0) = s(1, 1) = c;
    CHECK(rel_error(scaled.m, s * base.m * s.inverse()) < 1e-6);
}

TEST_CASE("degenerate keypoints are rejected") {
    KeypointSet collinear;
    for (std::size_t i = 0; i < collinear.size(); ++i)
        collinear[i] = {double(i), 2.0 * double(i)};
    std::mt19937 rng(5);
    CHECK_THROWS_AS(estimate_homography(collinear, collinear), DegenerateKeypoints);
}

TEST_CASE("identity warp copies the image exactly") {
    const Image img = smooth_gradient();
    const Image out = warp_to_roi(img, Homography{});
    CHECK(out == img);
}

TEST_CASE("integer translation shifts with zero fill") {
    const Image img = smooth_gradient();
    Homography h;
    h.m(0, 2) = 7.0;  // source x maps to x+7 in the ROI
    h.m(1, 2) = 3.0;
    const Image out = warp_to_roi(img, h);
    for (int y = 3; y < kRoiSize; ++y)
        for (int x = 7; x < kRoiSize; ++x)
            REQUIRE(out.at(x, y) == Catch::Approx(img.at(x - 7, y - 3)).margin(1e-6));
    for (int x = 0; x < 7; ++x) CHECK(out.at(x, 100) == 0.0f);
}

TEST_CASE("warp then inverse-warp reproduces a smooth image") {
    const Image img = smooth_gradient();
    std::mt19937 rng(6);
    const Eigen::Matrix3d m = random_homography(rng);
    const Image warped = warp_to_roi(img, Homography{m});
    const Image back = warp_to_roi(warped, Homography{m.inverse().eval()});
    double err = 0.0;
    int count = 0;
    for (int y = 40; y < kRoiSize - 40; ++y)
        for (int x = 40; x < kRoiSize - 40; ++x) {
            err += std::abs(back.at(x, y) - img.at(x, y));
            ++count;
        }
    CHECK(err / count < 0.01);
}

TEST_CASE("warping preserves the [0,1] pixel range") {
    const Image img = smooth_gradient();
    std::mt19937 rng(7);
    const Image out = warp_to_roi(img, Homography{random_homography(rng)});
    for (float v : out.px) {
        REQUIRE(v >= 0.0f);
        REQUIRE(v <= 1.0f);
    }
}

TEST_CASE("TPS with zero displacement is the identity") {
    const std::vector<Point2> pts{{10, 10}, {200, 15}, {100, 210}, {30, 120}};
    const TpsWarp w = fit_tps(pts, pts, 0.0);
    CHECK(w.radial_coefficients().norm() < 1e-9);
    for (double x : {0.0, 57.3, 223.0})
        for (double y : {0.0, 91.1, 223.0}) {
            const Point2 p = w.apply({x, y});
            CHECK(p.x == Catch::Approx(x).margin(1e-8));
            CHECK(p.y == Catch::Approx(y).margin(1e-8));
        }
}

TEST_CASE("3-point TPS reduces to pure affine") {
    const std::vector<Point2> src{{0, 0}, {100, 0}, {0, 100}};
    const std::vector<Point2> dst{{10, 5}, {115, 8}, {-3, 112}};
    const TpsWarp w = fit_tps(src, dst, 0.0);
    CHECK(w.radial_coefficients().norm() < 1e-9);
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Point2 p = w.apply(src[i]);
        CHECK(p.x == Catch::Approx(dst[i].x).margin(1e-6));
        CHECK(p.y == Catch::Approx(dst[i].y).margin(1e-6));
    }
}

TEST_CASE("unregularized TPS interpolates control points exactly") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(10.0, 210.0);
    std::uniform_real_distribution<double> d(-8.0, 8.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Point2> src, dst;
        for (int i = 0; i < 5; ++i) {
            const Point2 p{u(rng), u(rng)};
            src.push_back(p);
            dst.push_back({p.x + d(rng), p.y + d(rng)});
        }
        const TpsWarp w = fit_tps(src, dst, 0.0);
        for (std::size_t i = 0; i < src.size(); ++i) {
            const Point2 q = w.apply(src[i]);
            REQUIRE(std::hypot(q.x - dst[i].x, q.y - dst[i].y) < 1e-6);
        }
    }
}

TEST_CASE("regularization trades interpolation for smoothness") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(10.0, 210.0);
    std::uniform_real_distribution<double> d(-10.0, 10.0);
    std::vector<Point2> src, dst;
    for (int i = 0; i < 8; ++i) {
        const Point2 p{u(rng), u(rng)};
        src.push_back(p);
        dst.push_back({p.x + d(rng), p.y + d(rng)});
    }
    const double e0 = fit_tps(src, dst, 0.0).bending_energy();
    const double e1 = fit_tps(src, dst, 1.0).bending_energy();
    const double e10 = fit_tps(src, dst, 10.0).bending_energy();
    CHECK(e1 <= e0);
    CHECK(e10 <= e1);
}

TEST_CASE("identity TPS resampling copies the image") {
    const Image img = smooth_gradient();
    const std::vector<Point2> pts{{10, 10}, {200, 15}, {100, 210}, {30, 120}};
    const Image out = apply_tps(fit_tps(pts, pts, 0.0), img);
    for (std::size_t i = 0; i < img.px.size(); ++i)
        REQUIRE(out.px[i] == Catch::Approx(img.px[i]).margin(1e-6));
}

TEST_CASE("translation-only TPS matches the equivalent homography warp") {
    const Image img = smooth_gradient();
    const double tx = 6.0, ty = -4.0;

    // Backward maps: the TPS sends output pixels to source locations.
    std::vector<Point2> src{{0, 0}, {223, 0}, {0, 223}, {223, 223}};
    std::vector<Point2> dst;
    for (const auto& p : src) dst.push_back({p.x + tx, p.y + ty});
    const Image tps_out = apply_tps(fit_tps(src, dst, 0.0), img);

    Homography h;  // forward map for warp_to_roi: source -> ROI
    h.m(0, 2) = -tx;
    h.m(1, 2) = -ty;
    const Image hom_out = warp_to_roi(img, h);
    for (std::size_t i = 0; i < img.px.size(); ++i)
        REQUIRE(tps_out.px[i] == Catch::Approx(hom_out.px[i]).margin(1e-6));
}

TEST_CASE("TPS fit rejects degenerate configurations") {
    const std::vector<Point2> two{{0, 0}, {1, 1}};
    CHECK_THROWS_AS(fit_tps(two, two, 0.0), DegenerateControlPoints);
    const std::vector<Point2> collinear{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    CHECK_THROWS_AS(fit_tps(collinear, collinear, 0.0), DegenerateControlPoints);
}
