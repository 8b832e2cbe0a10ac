#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "palmid/embedding.hpp"
#include "palmid/errors.hpp"
#include "palmid/image.hpp"

namespace palmid {

enum class QualityMethod { EmbeddingNorm, LogVariance, External };

struct QualityValue {
    double value = 0.0;
    QualityMethod method = QualityMethod::EmbeddingNorm;
};

/// L2 norm of the raw (pre-normalization) embedding as a quality surrogate.
inline QualityValue quality_from_embedding(const Embedding& e) {
    return {static_cast<double>(e.raw_norm()), QualityMethod::EmbeddingNorm};
}

inline std::vector<double> gaussian_kernel_1d(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (auto& v : k) v /= sum;
    return k;
}

/// Separable Gaussian blur, edge samples clamped.
inline Image gaussian_blur(const Image& img, double sigma) {
    if (sigma <= 0.0) return img;
    const auto k = gaussian_kernel_1d(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    Image tmp(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    const int xi = std::clamp(x + i, 0, img.width - 1);
                    acc += k[i + radius] * img.at(xi, y, c);
                }
                tmp.at(x, y, c) = static_cast<float>(acc);
            }
    Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    const int yi = std::clamp(y + i, 0, img.height - 1);
                    acc += k[i + radius] * tmp.at(x, yi, c);
                }
                out.at(x, y, c) = static_cast<float>(acc);
            }
    return out;
}

/// Variance of a Laplacian-of-Gaussian response over the ROI interior.
/// Crops 32 pixels from each side first, then blurs (default sigma 1.0) and
/// applies the 5-point Laplacian on valid pixels only.
inline QualityValue quality_log_variance(const Image& roi, double sigma = 1.0) {
    const int crop = 32;
    const int w = roi.width - 2 * crop;
    const int h = roi.height - 2 * crop;
    if (w < 65 || h < 65) throw RoiTooSmall("ROI below 65x65 after 32px crop");
    Image inner(w, h, 1);
    const Image gray = to_gray(roi);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) inner.at(x, y) = gray.at(x + crop, y + crop);

    const Image blurred = gaussian_blur(inner, sigma);
    std::vector<double> response;
    response.reserve(static_cast<std::size_t>(w - 2) * (h - 2));
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x) {
            const double lap = blurred.at(x - 1, y) + blurred.at(x + 1, y) +
                               blurred.at(x, y - 1) + blurred.at(x, y + 1) -
                               4.0 * blurred.at(x, y);
            response.push_back(lap);
        }
    const double mean =
        std::accumulate(response.begin(), response.end(), 0.0) / response.size();
    double var = 0.0;
    for (double r : response) var += (r - mean) * (r - mean);
    var /= response.size();
    return {var, QualityMethod::LogVariance};
}

/// Drops the floor(f*n) lowest-quality samples.  Ties keep ingestion order,
/// so equal qualities are rejected earliest-first.  Returns (kept, rejected)
/// as index lists into the input.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> reject_by_quality(
    const std::vector<QualityValue>& samples, double fraction) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw Error("reject fraction outside [0,1)");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].method != samples[0].method)
            throw MixedQualityMethods("quality methods differ across samples");

    const std::size_t n = samples.size();
    const std::size_t k = static_cast<std::size_t>(fraction * static_cast<double>(n));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return samples[a].value < samples[b].value;
    });
    std::vector<std::size_t> rejected(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<std::size_t> kept(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    std::sort(rejected.begin(), rejected.end());
    std::sort(kept.begin(), kept.end());
    return {kept, rejected};
}

}  // namespace palmid
