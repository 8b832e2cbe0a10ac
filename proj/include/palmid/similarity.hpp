#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "palmid/embedding.hpp"
#include "palmid/errors.hpp"

namespace palmid {

/// Score in [0,1] after the affine re-normalization of the concatenated dot
/// product: s = (dot + 2) / 4.
struct SimilarityScore {
    double value = 0.0;
};

inline double cosine(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) throw DimMismatch("cosine: dimension mismatch");
    if (a.raw_norm() == 0.0f || b.raw_norm() == 0.0f)
        throw ZeroNorm("cosine: zero vector");
    double dot = 0.0, na = 0.0, nb = 0.0;
    const auto& av = a.values();
    const auto& bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) {
        dot += static_cast<double>(av[i]) * bv[i];
        na += static_cast<double>(av[i]) * av[i];
        nb += static_cast<double>(bv[i]) * bv[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline double dot_product(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        dot += static_cast<double>(a[i]) * b[i];
    return dot;
}

/// Two unit-normalized branch embeddings matched as one concatenated vector.
class ConcatTemplate {
public:
    ConcatTemplate(const Embedding& branch_v, const Embedding& branch_r)
        : branch_v_(branch_v.normalized()), branch_r_(branch_r.normalized()) {
        concat_.reserve(branch_v_.dim() + branch_r_.dim());
        concat_.insert(concat_.end(), branch_v_.values().begin(), branch_v_.values().end());
        concat_.insert(concat_.end(), branch_r_.values().begin(), branch_r_.values().end());
    }

    const Embedding& branch_v() const { return branch_v_; }
    const Embedding& branch_r() const { return branch_r_; }
    const std::vector<float>& concat() const { return concat_; }
    std::size_t branch_dim() const { return branch_v_.dim(); }
    std::size_t total_dim() const { return concat_.size(); }

    /// Pre-normalization norms summed over both branches; the quality
    /// surrogate when the concatenated template is the matching unit.
    double raw_norm_sum() const {
        return static_cast<double>(branch_v_.raw_norm()) + branch_r_.raw_norm();
    }

private:
    Embedding branch_v_;
    Embedding branch_r_;
    std::vector<float> concat_;
};

// Unit-branch dots live in [-2, 2] mathematically, but float-normalized
// branches can overshoot by a few ulp, so the score is clamped to [0, 1].
inline double score_from_dot(double dot) {
    return std::clamp((dot + 2.0) / 4.0, 0.0, 1.0);
}

inline SimilarityScore concat_score(const ConcatTemplate& p, const ConcatTemplate& q) {
    if (p.branch_dim() != q.branch_dim() || p.total_dim() != q.total_dim())
        throw DimMismatch("concat_score: branch dimension mismatch");
    return {score_from_dot(dot_product(p.concat(), q.concat()))};
}

inline SimilarityScore fuse_scores(SimilarityScore s_primary, SimilarityScore s_external,
                                   double w = 0.7) {
    if (!(w >= 0.0 && w <= 1.0)) throw InvalidWeight("fusion weight outside [0,1]");
    return {w * s_primary.value + (1.0 - w) * s_external.value};
}

}  // namespace palmid
