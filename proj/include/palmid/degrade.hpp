#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "palmid/errors.hpp"
#include "palmid/geometry.hpp"
#include "palmid/image.hpp"
#include "palmid/quality.hpp"

namespace palmid {

enum class OverlayKind { None, Text, Lines, HennaMask };

struct DegradationSpec {
    double sigma_min = 0.0;  // Gaussian blur
    double sigma_max = 0.0;
    double factor_min = 1.0;  // down-up resampling, >= 1
    double factor_max = 1.0;
    OverlayKind overlay = OverlayKind::None;
    double alpha_min = 0.1;  // overlay transparency, within [0.1, 1]
    double alpha_max = 1.0;
    std::array<float, 3> color{0.0f, 0.0f, 0.0f};
    bool random_color = true;
    std::uint64_t seed = 0;
};

/// Binary mask, 1 channel, values 0 or 1.
using Mask = Image;

/// out = (1-alpha)*roi + alpha*color where mask is set; untouched elsewhere.
inline Image composite_mask(const Image& roi, const Mask& mask,
                            const std::array<float, 3>& color, double alpha) {
    if (mask.width != roi.width || mask.height != roi.height)
        throw DimMismatch("mask dimensions differ from image");
    if (!(alpha >= 0.1 && alpha <= 1.0)) throw Error("alpha outside [0.1, 1]");
    Image out = roi;
    for (int y = 0; y < roi.height; ++y)
        for (int x = 0; x < roi.width; ++x) {
            if (mask.at(x, y) < 0.5f) continue;
            for (int c = 0; c < roi.channels; ++c) {
                const float col = roi.channels == 3 ? color[c] : (color[0] + color[1] + color[2]) / 3.0f;
                out.at(x, y, c) =
                    static_cast<float>((1.0 - alpha) * roi.at(x, y, c) + alpha * col);
            }
        }
    return out;
}

namespace detail {
inline void rasterize_segment(Mask& m, Point2 a, Point2 b, double thickness) {
    const double half = thickness / 2.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half)));
    const int x1 = std::min(m.width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half)));
    const int y1 = std::min(m.height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half)));
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double t = len2 > 0.0 ? ((x - a.x) * dx + (y - a.y) * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double px = a.x + t * dx, py = a.y + t * dy;
            const double d = std::hypot(x - px, y - py);
            if (d <= half) m.at(x, y) = 1.0f;
        }
}
}  // namespace detail

/// Random connected polyline rasterized at the sampled thickness.
inline Mask gen_line_overlay(std::mt19937_64& rng, int width, int height,
                             double thickness_min, double thickness_max,
                             int segments_min, int segments_max) {
    Mask m(width, height, 1);
    std::uniform_int_distribution<int> seg_count(segments_min, segments_max);
    std::uniform_real_distribution<double> px(0.0, width - 1.0);
    std::uniform_real_distribution<double> py(0.0, height - 1.0);
    std::uniform_real_distribution<double> th(thickness_min, thickness_max);
    const int n = seg_count(rng);
    if (n <= 0) return m;
    Point2 prev{px(rng), py(rng)};
    const double thickness = th(rng);
    for (int i = 0; i < n; ++i) {
        Point2 next{px(rng), py(rng)};
        detail::rasterize_segment(m, prev, next, thickness);
        prev = next;
    }
    return m;
}

/// Procedural glyph-like stroke clusters on a baseline; a stand-in for real
/// font rendering.
inline Mask gen_text_overlay(std::mt19937_64& rng, int width, int height,
                             int glyphs_min, int glyphs_max) {
    Mask m(width, height, 1);
    std::uniform_int_distribution<int> glyph_count(glyphs_min, glyphs_max);
    const int n = glyph_count(rng);
    if (n <= 0) return m;
    std::uniform_real_distribution<double> base_y(height * 0.2, height * 0.8);
    std::uniform_real_distribution<double> glyph_h(8.0, 22.0);
    std::uniform_real_distribution<double> jitter(-3.0, 3.0);
    std::uniform_int_distribution<int> strokes(2, 4);
    const double baseline = base_y(rng);
    double cursor = 6.0;
    for (int g = 0; g < n && cursor < width - 8.0; ++g) {
        const double gh = glyph_h(rng);
        const double gw = gh * 0.6;
        const int ns = strokes(rng);
        for (int s = 0; s < ns; ++s) {
            Point2 a{cursor + jitter(rng) + gw / 2, baseline - gh + jitter(rng)};
            Point2 b{cursor + jitter(rng) + gw / 2, baseline + jitter(rng)};
            if (s % 2 == 1) std::swap(a.x, b.y);  // mix vertical and slanted strokes
            detail::rasterize_segment(m, a, b, 2.0);
        }
        cursor += gw + 4.0;
    }
    return m;
}

/// Threshold at 0.5 after grayscale conversion, then random resize in
/// [0.5, 1.5] and random crop/placement to the target size.
inline Mask prepare_henna_mask(const Image& mask_image, int width, int height,
                               std::mt19937_64& rng) {
    const Image gray = to_gray(mask_image);
    std::uniform_real_distribution<double> rf(0.5, 1.5);
    const double f = rf(rng);
    const int rw = std::max(1, static_cast<int>(std::lround(gray.width * f)));
    const int rh = std::max(1, static_cast<int>(std::lround(gray.height * f)));
    std::uniform_int_distribution<int> ox_d(0, std::max(0, rw - 1));
    std::uniform_int_distribution<int> oy_d(0, std::max(0, rh - 1));
    const int ox = ox_d(rng) - rw / 2 + width / 2;
    const int oy = oy_d(rng) - rh / 2 + height / 2;
    Mask m(width, height, 1);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double sx = (x - ox) / f;
            const double sy = (y - oy) / f;
            if (sx < 0 || sy < 0 || sx >= gray.width || sy >= gray.height) continue;
            m.at(x, y) = sample_bilinear(gray, sx, sy) >= 0.5f ? 1.0f : 0.0f;
        }
    return m;
}

/// Box-filter downsample by `factor`, bilinear upsample back to size.
inline Image down_up_sample(const Image& img, double factor) {
    if (factor <= 1.0) return img;
    const int dw = std::max(1, static_cast<int>(std::lround(img.width / factor)));
    const int dh = std::max(1, static_cast<int>(std::lround(img.height / factor)));
    Image small(dw, dh, img.channels);
    const double sx = static_cast<double>(img.width) / dw;
    const double sy = static_cast<double>(img.height) / dh;
    for (int y = 0; y < dh; ++y)
        for (int x = 0; x < dw; ++x) {
            const int x0 = static_cast<int>(x * sx);
            const int x1 = std::min(img.width, static_cast<int>(std::ceil((x + 1) * sx)));
            const int y0 = static_cast<int>(y * sy);
            const int y1 = std::min(img.height, static_cast<int>(std::ceil((y + 1) * sy)));
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                int cnt = 0;
                for (int yy = y0; yy < y1; ++yy)
                    for (int xx = x0; xx < x1; ++xx) {
                        acc += img.at(xx, yy, c);
                        ++cnt;
                    }
                small.at(x, y, c) = static_cast<float>(acc / std::max(1, cnt));
            }
        }
    Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double ux = (x + 0.5) * dw / img.width - 0.5;
            const double uy = (y + 0.5) * dh / img.height - 0.5;
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = sample_bilinear(small, ux, uy, c);
        }
    return out;
}

struct DegradedSample {
    Image degraded;
    Image clean;
};

/// Applies overlay, then down-up resampling, then blur.  Fully determined by
/// (spec, seed); the clean image is returned untouched.
inline DegradedSample degrade(const Image& roi, const DegradationSpec& spec,
                              const Image* henna_mask = nullptr) {
    std::mt19937_64 rng(spec.seed);
    Image out = roi;

    if (spec.overlay != OverlayKind::None) {
        Mask mask;
        switch (spec.overlay) {
            case OverlayKind::Lines:
                mask = gen_line_overlay(rng, roi.width, roi.height, 1.0, 6.0, 2, 6);
                break;
            case OverlayKind::Text:
                mask = gen_text_overlay(rng, roi.width, roi.height, 4, 12);
                break;
            case OverlayKind::HennaMask: {
                if (henna_mask == nullptr) throw Error("henna overlay needs a mask image");
                mask = prepare_henna_mask(*henna_mask, roi.width, roi.height, rng);
                break;
            }
            default:
                break;
        }
        std::uniform_real_distribution<double> ad(spec.alpha_min, spec.alpha_max);
        const double alpha = ad(rng);
        std::array<float, 3> color = spec.color;
        if (spec.random_color) {
            std::uniform_real_distribution<float> cd(0.0f, 1.0f);
            color = {cd(rng), cd(rng), cd(rng)};
        }
        out = composite_mask(out, mask, color, alpha);
    }

    std::uniform_real_distribution<double> fd(spec.factor_min, spec.factor_max);
    const double factor = spec.factor_min == spec.factor_max ? spec.factor_min : fd(rng);
    out = down_up_sample(out, factor);

    std::uniform_real_distribution<double> sd(spec.sigma_min, spec.sigma_max);
    const double sigma = spec.sigma_min == spec.sigma_max ? spec.sigma_min : sd(rng);
    if (sigma > 0.0) out = gaussian_blur(out, sigma);

    return {std::move(out), roi};
}

}  // namespace palmid
