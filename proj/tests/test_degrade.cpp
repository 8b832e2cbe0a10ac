#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "palmid/degrade.hpp"
#include "palmid/quality.hpp"
#include "palmid/synthetic.hpp"

using namespace palmid;

TEST_CASE("no-op spec leaves the image untouched") {
    const Image roi = make_class_texture(1);
    DegradationSpec spec;  // defaults: no blur, factor 1, no overlay
    const DegradedSample s = degrade(roi, spec);
    CHECK(s.degraded == roi);
    CHECK(s.clean == roi);
}

TEST_CASE("degradation is deterministic in the seed") {
    const Image roi = make_class_texture(2);
    DegradationSpec spec;
    spec.sigma_min = 0.5;
    spec.sigma_max = 2.5;
    spec.factor_min = 1.0;
    spec.factor_max = 3.0;
    spec.overlay = OverlayKind::Lines;
    spec.seed = 42;
    const DegradedSample a = degrade(roi, spec);
    const DegradedSample b = degrade(roi, spec);
    CHECK(a.degraded == b.degraded);

    spec.seed = 43;
    const DegradedSample c = degrade(roi, spec);
    CHECK_FALSE(a.degraded == c.degraded);
}

TEST_CASE("blur reduces sharpness as measured by LoG variance") {
    const Image roi = make_class_texture(3);
    DegradationSpec spec;
    spec.sigma_min = spec.sigma_max = 2.0;
    const DegradedSample s = degrade(roi, spec);
    CHECK(quality_log_variance(s.degraded).value < quality_log_variance(roi).value);
}

TEST_CASE("down-up resampling reduces sharpness") {
    const Image roi = make_class_texture(4);
    DegradationSpec spec;
    spec.factor_min = spec.factor_max = 4.0;
    const DegradedSample s = degrade(roi, spec);
    CHECK(quality_log_variance(s.degraded).value < quality_log_variance(roi).value);
    CHECK(down_up_sample(roi, 1.0) == roi);
}

TEST_CASE("opaque compositing replaces masked pixels with the overlay color") {
    Image roi(kRoiSize, kRoiSize, 1, 0.7f);
    Mask mask(kRoiSize, kRoiSize, 1);
    mask.at(10, 20) = 1.0f;
    mask.at(100, 100) = 1.0f;
    const Image out = composite_mask(roi, mask, {0.9f, 0.9f, 0.9f}, 1.0);
    CHECK(out.at(10, 20) == Catch::Approx(0.9f));
    CHECK(out.at(100, 100) == Catch::Approx(0.9f));
    CHECK(out.at(0, 0) == 0.7f);
}

TEST_CASE("half-transparent compositing blends to the midpoint") {
    Image roi(kRoiSize, kRoiSize, 1, 0.2f);
    Mask mask(kRoiSize, kRoiSize, 1, 1.0f);
    const Image out = composite_mask(roi, mask, {1.0f, 1.0f, 1.0f}, 0.5);
    for (float v : out.px) REQUIRE(v == Catch::Approx(0.6f).margin(1e-6));
}

TEST_CASE("empty mask leaves the image unchanged") {
    const Image roi = make_class_texture(5);
    const Mask mask(kRoiSize, kRoiSize, 1);
    CHECK(composite_mask(roi, mask, {0.0f, 0.0f, 0.0f}, 1.0) == roi);
}

TEST_CASE("compositing validates its inputs") {
    const Image roi(kRoiSize, kRoiSize, 1, 0.5f);
    const Mask full(kRoiSize, kRoiSize, 1, 1.0f);
    CHECK_THROWS_AS(composite_mask(roi, full, {0.0f, 0.0f, 0.0f}, 0.05), Error);
    CHECK_THROWS_AS(composite_mask(roi, full, {0.0f, 0.0f, 0.0f}, 1.5), Error);
    const Mask wrong(100, 100, 1);
    CHECK_THROWS_AS(composite_mask(roi, wrong, {0.0f, 0.0f, 0.0f}, 1.0), DimMismatch);
}

TEST_CASE("zero-segment line overlay produces an empty mask") {
    std::mt19937_64 rng(1);
    const Mask m = gen_line_overlay(rng, kRoiSize, kRoiSize, 1.0, 6.0, 0, 0);
    for (float v : m.px) REQUIRE(v == 0.0f);
}

TEST_CASE("a horizontal segment rasterizes as a band of the given thickness") {
    Mask m(64, 64, 1);
    detail::rasterize_segment(m, {5.0, 32.0}, {58.0, 32.0}, 3.0);
    // Rows 31..33 are within 1.5px of the center line along its length.
    for (int x = 6; x <= 57; ++x) {
        REQUIRE(m.at(x, 31) == 1.0f);
        REQUIRE(m.at(x, 32) == 1.0f);
        REQUIRE(m.at(x, 33) == 1.0f);
        REQUIRE(m.at(x, 29) == 0.0f);
        REQUIRE(m.at(x, 35) == 0.0f);
    }
}

TEST_CASE("line overlays stay within plausible pixel-count bounds") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        const Mask m = gen_line_overlay(rng, kRoiSize, kRoiSize, 1.0, 6.0, 2, 6);
        std::size_t set = 0;
        for (float v : m.px) set += v > 0.5f;
        REQUIRE(set > 0);
        // 6 segments x max diagonal length x max thickness is a loose cap.
        REQUIRE(set < std::size_t(6 * 317 * 7));
    }
}

TEST_CASE("text overlays are deterministic and vary across seeds") {
    std::mt19937_64 r1(7), r2(7), r3(8);
    const Mask a = gen_text_overlay(r1, kRoiSize, kRoiSize, 4, 12);
    const Mask b = gen_text_overlay(r2, kRoiSize, kRoiSize, 4, 12);
    const Mask c = gen_text_overlay(r3, kRoiSize, kRoiSize, 4, 12);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    std::size_t set = 0;
    for (float v : a.px) set += v > 0.5f;
    CHECK(set > 0);

    std::mt19937_64 r4(9);
    const Mask empty = gen_text_overlay(r4, kRoiSize, kRoiSize, 0, 0);
    for (float v : empty.px) REQUIRE(v == 0.0f);
}

TEST_CASE("henna-style masks threshold and stay binary") {
    Image mask_img(64, 64, 1);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) mask_img.at(x, y) = (x < 32) ? 0.9f : 0.1f;
    std::mt19937_64 rng(11);
    const Mask m = prepare_henna_mask(mask_img, kRoiSize, kRoiSize, rng);
    for (float v : m.px) REQUIRE((v == 0.0f || v == 1.0f));

    const Image roi = make_class_texture(6);
    DegradationSpec spec;
    spec.overlay = OverlayKind::HennaMask;
    CHECK_THROWS_AS(degrade(roi, spec), Error);  // mask image required
    const DegradedSample s = degrade(roi, spec, &mask_img);
    CHECK(s.degraded.width == kRoiSize);
}

TEST_CASE("degradation never mutates its input and keeps pixels in range") {
    const Image roi = make_class_texture(7);
    const Image copy = roi;
    DegradationSpec spec;
    spec.sigma_min = spec.sigma_max = 1.5;
    spec.factor_min = spec.factor_max = 2.0;
    spec.overlay = OverlayKind::Text;
    spec.seed = 3;
    const DegradedSample s = degrade(roi, spec);
    CHECK(roi == copy);
    CHECK(s.clean == copy);
    for (float v : s.degraded.px) {
        REQUIRE(v >= 0.0f);
        REQUIRE(v <= 1.0f);
    }
}

TEST_CASE("overlay transparency is sampled inside the configured range") {
    // With alpha pinned at the minimum, masked pixels move only 10% toward
    // the overlay color.
    Image roi(kRoiSize, kRoiSize, 1, 0.0f);
    DegradationSpec spec;
    spec.overlay = OverlayKind::Lines;
    spec.alpha_min = spec.alpha_max = 0.1;
    spec.random_color = false;
    spec.color = {1.0f, 1.0f, 1.0f};
    const DegradedSample s = degrade(roi, spec);
    float peak = 0.0f;
    for (float v : s.degraded.px) peak = std::max(peak, v);
    CHECK(peak == Catch::Approx(0.1f).margin(1e-6));
}
