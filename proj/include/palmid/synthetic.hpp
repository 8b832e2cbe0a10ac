#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "palmid/embedding.hpp"
#include "palmid/extractor.hpp"
#include "palmid/geometry.hpp"
#include "palmid/image.hpp"

namespace palmid {

// Synthetic data used by the CLI's built-in protocols, the benchmark, and
// the test suites.  Everything here is seed-deterministic.

/// Line-textured fake palmprint: dark crease-like strokes on a light
/// background with a low-frequency illumination ramp.
inline Image make_class_texture(std::uint64_t class_seed) {
    detail::DetRng rng(class_seed * 0x9E3779B97F4A7C15ull + 1);
    Image img(kRoiSize, kRoiSize, 1, 0.8f);
    for (int y = 0; y < kRoiSize; ++y)
        for (int x = 0; x < kRoiSize; ++x)
            img.at(x, y) += static_cast<float>(0.1 * std::sin((x + 2.0 * y) / 60.0));

    const int lines = 8 + static_cast<int>(rng.next() % 8);
    for (int l = 0; l < lines; ++l) {
        const double x0 = rng.unit() * kRoiSize, y0 = rng.unit() * kRoiSize;
        const double ang = rng.unit() * 2.0 * 3.14159265358979323846;
        const double len = 40.0 + rng.unit() * 160.0;
        const double x1 = x0 + len * std::cos(ang), y1 = y0 + len * std::sin(ang);
        const double half = 0.8 + rng.unit() * 2.2;
        const float depth = static_cast<float>(0.3 + rng.unit() * 0.4);
        const int bx0 = std::max(0, static_cast<int>(std::min(x0, x1) - half - 1));
        const int bx1 = std::min(kRoiSize - 1, static_cast<int>(std::max(x0, x1) + half + 1));
        const int by0 = std::max(0, static_cast<int>(std::min(y0, y1) - half - 1));
        const int by1 = std::min(kRoiSize - 1, static_cast<int>(std::max(y0, y1) + half + 1));
        const double dx = x1 - x0, dy = y1 - y0;
        const double len2 = dx * dx + dy * dy;
        for (int y = by0; y <= by1; ++y)
            for (int x = bx0; x <= bx1; ++x) {
                double t = len2 > 0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
                t = std::clamp(t, 0.0, 1.0);
                const double d = std::hypot(x - (x0 + t * dx), y - (y0 + t * dy));
                if (d <= half) {
                    const double fade = 1.0 - d / half;
                    img.at(x, y) -= static_cast<float>(depth * fade);
                }
            }
    }
    for (auto& v : img.px) v = std::clamp(v, 0.0f, 1.0f);
    return img;
}

/// Same class texture plus per-sample pixel noise.
inline Image make_texture_sample(std::uint64_t class_seed, std::uint64_t sample_index,
                                 double noise_sigma = 0.02) {
    Image img = make_class_texture(class_seed);
    detail::DetRng rng(class_seed * 0x2545F4914F6CDD1Dull + sample_index + 17);
    for (auto& v : img.px)
        v = std::clamp(v + static_cast<float>(rng.gauss() * noise_sigma), 0.0f, 1.0f);
    return img;
}

struct LabeledEmbeddings {
    std::vector<Embedding> embeddings;
    std::vector<std::size_t> labels;
};

/// Gaussian blobs: class centers at N(0, spread^2 I), samples at
/// center + N(0, sigma^2 I).
inline LabeledEmbeddings make_blobs(std::size_t n_classes, std::size_t per_class,
                                    std::size_t dim, double spread, double sigma,
                                    std::uint64_t seed) {
    LabeledEmbeddings out;
    detail::DetRng center_rng(seed);
    std::vector<std::vector<double>> centers(n_classes, std::vector<double>(dim));
    for (auto& c : centers)
        for (auto& v : c) v = center_rng.gauss() * spread;
    detail::DetRng rng(seed + 0x51ED270B2ull);
    for (std::size_t k = 0; k < n_classes; ++k)
        for (std::size_t s = 0; s < per_class; ++s) {
            std::vector<float> v(dim);
            for (std::size_t i = 0; i < dim; ++i)
                v[i] = static_cast<float>(centers[k][i] + rng.gauss() * sigma);
            out.embeddings.emplace_back(std::move(v));
            out.labels.push_back(k);
        }
    return out;
}

inline std::vector<float> random_unit_vector(std::size_t dim, detail::DetRng& rng) {
    std::vector<float> v(dim);
    double ss = 0.0;
    for (auto& x : v) {
        x = static_cast<float>(rng.gauss());
        ss += static_cast<double>(x) * x;
    }
    const float inv = static_cast<float>(1.0 / std::sqrt(ss));
    for (auto& x : v) x *= inv;
    return v;
}

}  // namespace palmid
