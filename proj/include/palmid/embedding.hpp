#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "palmid/errors.hpp"

namespace palmid {

/// Fixed-length feature vector.  Keeps the L2 norm it had at construction
/// time so quality estimation can use it after normalization.
class Embedding {
public:
    Embedding() = default;

    explicit Embedding(std::vector<float> values) : values_(std::move(values)) {
        if (values_.empty()) throw InvalidEmbedding("embedding has dimension 0");
        double ss = 0.0;
        for (float v : values_) {
            if (!std::isfinite(v)) throw InvalidEmbedding("non-finite embedding value");
            ss += static_cast<double>(v) * v;
        }
        raw_norm_ = static_cast<float>(std::sqrt(ss));
    }

    std::size_t dim() const { return values_.size(); }
    const std::vector<float>& values() const { return values_; }
    float raw_norm() const { return raw_norm_; }

    /// Unit-length copy; the original raw norm is carried along.  Divides by
    /// the current norm of the values, so it is idempotent even though
    /// raw_norm_ keeps its pre-normalization meaning.
    Embedding normalized() const {
        double ss = 0.0;
        for (float v : values_) ss += static_cast<double>(v) * v;
        const float cur = static_cast<float>(std::sqrt(ss));
        if (cur == 0.0f) throw ZeroNorm("cannot normalize zero embedding");
        Embedding out;
        out.values_.reserve(values_.size());
        for (float v : values_) out.values_.push_back(v / cur);
        out.raw_norm_ = raw_norm_;
        return out;
    }

    bool operator==(const Embedding& o) const { return values_ == o.values_; }

private:
    std::vector<float> values_;
    float raw_norm_ = 0.0f;
};

}  // namespace palmid
