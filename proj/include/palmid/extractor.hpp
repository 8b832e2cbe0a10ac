#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "palmid/errors.hpp"
#include "palmid/image.hpp"
#include "palmid/similarity.hpp"

namespace palmid {

struct PatchSequence {
    int patch_size = 0;
    std::vector<Image> patches;  // row-major patch order
};

/// Non-overlapping row-major tiling of the ROI.
inline PatchSequence tokenize(const Image& roi, int p) {
    if (!roi.is_roi()) throw BadImage("tokenize expects a 224x224 ROI");
    if (p <= 0 || kRoiSize % p != 0) throw BadPatchSize("patch size must divide 224");
    PatchSequence seq;
    seq.patch_size = p;
    const int per_side = kRoiSize / p;
    seq.patches.reserve(static_cast<std::size_t>(per_side) * per_side);
    const Image gray = to_gray(roi);
    for (int py = 0; py < per_side; ++py)
        for (int px = 0; px < per_side; ++px) {
            Image patch(p, p, 1);
            for (int y = 0; y < p; ++y)
                for (int x = 0; x < p; ++x)
                    patch.at(x, y) = gray.at(px * p + x, py * p + y);
            seq.patches.push_back(std::move(patch));
        }
    return seq;
}

class ExtractorInterface {
public:
    virtual ~ExtractorInterface() = default;
    virtual ConcatTemplate extract(const Image& roi) const = 0;
    virtual std::size_t branch_dim() const = 0;
};

namespace detail {

// splitmix64-based generator; bit-exact across platforms, unlike the
// std:: distributions.
struct DetRng {
    std::uint64_t state;
    explicit DetRng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double gauss() {
        const double u1 = std::max(unit(), 1e-300);
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }
};

inline std::vector<float> random_projection(std::size_t out_dim, std::size_t in_dim,
                                            std::uint64_t seed) {
    DetRng rng(seed);
    std::vector<float> w(out_dim * (in_dim + 1));  // last column is the bias
    const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
    for (auto& v : w) v = static_cast<float>(rng.gauss() * scale);
    return w;
}

inline std::vector<float> project(const std::vector<float>& w, std::size_t out_dim,
                                  const std::vector<float>& features) {
    const std::size_t in_dim = features.size();
    std::vector<float> out(out_dim);
    for (std::size_t o = 0; o < out_dim; ++o) {
        double acc = static_cast<double>(w[o * (in_dim + 1) + in_dim]);  // bias
        const float* row = &w[o * (in_dim + 1)];
        for (std::size_t i = 0; i < in_dim; ++i)
            acc += static_cast<double>(row[i]) * features[i];
        out[o] = static_cast<float>(acc);
    }
    return out;
}

// mean, stddev, and an 8-bin gradient-orientation histogram per patch.
inline void patch_statistics(const Image& patch, std::vector<float>& out) {
    const int p = patch.width;
    double sum = 0.0, sum2 = 0.0;
    for (float v : patch.px) {
        sum += v;
        sum2 += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(patch.px.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    out.push_back(static_cast<float>(mean));
    out.push_back(static_cast<float>(std::sqrt(var)));

    double hist[8] = {0};
    for (int y = 1; y < p - 1; ++y)
        for (int x = 1; x < p - 1; ++x) {
            const double gx = patch.at(x + 1, y) - patch.at(x - 1, y);
            const double gy = patch.at(x, y + 1) - patch.at(x, y - 1);
            const double mag = std::hypot(gx, gy);
            if (mag < 1e-12) continue;
            double ang = std::atan2(gy, gx);  // [-pi, pi]
            int bin = static_cast<int>((ang + 3.14159265358979323846) /
                                       (2.0 * 3.14159265358979323846) * 8.0);
            bin = std::min(bin, 7);
            hist[bin] += mag;
        }
    for (double h : hist) out.push_back(static_cast<float>(h));
}

inline void block_mean_pyramid(const Image& gray, int blocks_per_side,
                               std::vector<float>& out) {
    const int b = kRoiSize / blocks_per_side;
    for (int by = 0; by < blocks_per_side; ++by)
        for (int bx = 0; bx < blocks_per_side; ++bx) {
            double acc = 0.0;
            for (int y = 0; y < b; ++y)
                for (int x = 0; x < b; ++x) acc += gray.at(bx * b + x, by * b + y);
            out.push_back(static_cast<float>(acc / (b * b)));
        }
}

}  // namespace detail

/// Deterministic stand-in for the learned feature branches.  Branch v uses
/// multi-scale patch statistics (sizes 16 and 32), branch r a 3-level
/// block-mean pyramid; both feed fixed seeded random projections to 384 dims.
class ToyExtractor : public ExtractorInterface {
public:
    explicit ToyExtractor(std::size_t out_dim = 384)
        : out_dim_(out_dim),
          proj_v_(detail::random_projection(out_dim, kVFeatures, 0x70616C6D6964763ull)),
          proj_r_(detail::random_projection(out_dim, kRFeatures, 0x70616C6D6964723ull)) {}

    ConcatTemplate extract(const Image& roi) const override {
        const Image gray = to_gray(roi);

        std::vector<float> fv;
        fv.reserve(kVFeatures);
        for (int p : {16, 32}) {
            const PatchSequence seq = tokenize(gray, p);
            for (const auto& patch : seq.patches) detail::patch_statistics(patch, fv);
        }
        std::vector<float> fr;
        fr.reserve(kRFeatures);
        for (int bs : {28, 14, 7}) detail::block_mean_pyramid(gray, bs, fr);

        Embedding branch_v(detail::project(proj_v_, out_dim_, fv));
        Embedding branch_r(detail::project(proj_r_, out_dim_, fr));
        return ConcatTemplate(branch_v, branch_r);
    }

    std::size_t branch_dim() const override { return out_dim_; }

private:
    // (196 + 49) patches x 10 stats; 28^2 + 14^2 + 7^2 block means.
    static constexpr std::size_t kVFeatures = (196 + 49) * 10;
    static constexpr std::size_t kRFeatures = 784 + 196 + 49;

    std::size_t out_dim_;
    std::vector<float> proj_v_;
    std::vector<float> proj_r_;
};

}  // namespace palmid
