#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "palmid/codec.hpp"
#include "palmid/errors.hpp"
#include "palmid/quality.hpp"
#include "palmid/reducer.hpp"
#include "palmid/similarity.hpp"

namespace palmid {

struct LabeledScoreSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
};

struct TarFarResult {
    double tar_percent = 0.0;
    double threshold = 0.0;
    double achieved_far_percent = 0.0;
    bool degenerate = false;  // far_target below 1/|impostors| resolution
};

namespace detail {
inline double rate_at_or_above(const std::vector<double>& scores, double t) {
    if (scores.empty()) return 0.0;
    std::size_t n = 0;
    for (double s : scores)
        if (s >= t) ++n;
    return 100.0 * static_cast<double>(n) / static_cast<double>(scores.size());
}
}  // namespace detail

/// Smallest threshold (from the observed scores plus sentinels) whose FAR is
/// at or below the target; TAR is the genuine rate at that threshold.
inline TarFarResult tar_at_far(const LabeledScoreSet& scores, double far_target_percent) {
    if (scores.genuine.empty() || scores.impostor.empty())
        throw EmptyScoreSet("tar_at_far needs genuine and impostor scores");
    if (!(far_target_percent > 0.0 && far_target_percent <= 100.0))
        throw Error("FAR target must be in (0, 100]");

    std::vector<double> candidates;
    candidates.reserve(scores.genuine.size() + scores.impostor.size() + 2);
    candidates.push_back(-std::numeric_limits<double>::infinity());
    candidates.insert(candidates.end(), scores.genuine.begin(), scores.genuine.end());
    candidates.insert(candidates.end(), scores.impostor.begin(), scores.impostor.end());
    candidates.push_back(std::numeric_limits<double>::infinity());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    TarFarResult r;
    r.degenerate =
        far_target_percent < 100.0 / static_cast<double>(scores.impostor.size());
    for (double t : candidates) {
        const double far = detail::rate_at_or_above(scores.impostor, t);
        if (far <= far_target_percent) {
            r.threshold = t;
            r.achieved_far_percent = far;
            r.tar_percent = detail::rate_at_or_above(scores.genuine, t);
            return r;
        }
    }
    // Unreachable: +inf always yields FAR 0.
    r.threshold = std::numeric_limits<double>::infinity();
    return r;
}

/// One open-set search outcome: the ranked candidate list plus ground truth.
struct IdentTrial {
    std::string probe_subject;
    bool mated = false;
    std::vector<std::pair<std::string, double>> candidates;  // (subject, score), rank order
};

namespace detail {
// Rank (1-based) and score of the probe subject's best entry; rank 0 when
// the subject does not appear in the candidate list.
inline std::pair<std::size_t, double> mate_rank_and_score(const IdentTrial& t) {
    for (std::size_t i = 0; i < t.candidates.size(); ++i)
        if (t.candidates[i].first == t.probe_subject)
            return {i + 1, t.candidates[i].second};
    return {0, -std::numeric_limits<double>::infinity()};
}
}  // namespace detail

inline double rank_r_rate(const std::vector<IdentTrial>& trials, std::size_t r) {
    std::size_t mated = 0, hits = 0;
    for (const auto& t : trials) {
        if (!t.mated) continue;
        ++mated;
        const auto [rank, score] = detail::mate_rank_and_score(t);
        if (rank >= 1 && rank <= r) ++hits;
    }
    if (mated == 0) throw NoMatedTrials("rank_r_rate needs mated trials");
    return 100.0 * static_cast<double>(hits) / static_cast<double>(mated);
}

struct FnirFpirResult {
    double fnir_percent = 0.0;
    double fpir_percent = 0.0;
};

inline FnirFpirResult fnir_fpir(const std::vector<IdentTrial>& trials, double threshold,
                                std::size_t r) {
    std::size_t mated = 0, nonmated = 0, fn = 0, fp = 0;
    for (const auto& t : trials) {
        if (t.mated) {
            ++mated;
            const auto [rank, score] = detail::mate_rank_and_score(t);
            if (rank == 0 || rank > r || score < threshold) ++fn;
        } else {
            ++nonmated;
            if (!t.candidates.empty() && t.candidates.front().second >= threshold) ++fp;
        }
    }
    if (mated == 0 || nonmated == 0)
        throw InsufficientTrials("fnir_fpir needs both mated and nonmated trials");
    return {100.0 * static_cast<double>(fn) / static_cast<double>(mated),
            100.0 * static_cast<double>(fp) / static_cast<double>(nonmated)};
}

struct FnirSweepResult {
    double threshold = 0.0;
    double fnir_percent = 0.0;
    double fpir_percent = 0.0;
};

/// Sweeps T over the observed nonmated top-1 scores (plus sentinels) and
/// reports FNIR at the T whose FPIR is closest to the target.
inline FnirSweepResult fnir_at_fpir_target(const std::vector<IdentTrial>& trials,
                                           double fpir_target_percent, std::size_t r) {
    std::vector<double> candidates{-std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity()};
    for (const auto& t : trials)
        if (!t.candidates.empty()) candidates.push_back(t.candidates.front().second);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    FnirSweepResult best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (double t : candidates) {
        const FnirFpirResult res = fnir_fpir(trials, t, r);
        const double gap = std::abs(res.fpir_percent - fpir_target_percent);
        if (gap < best_gap || (gap == best_gap && t > best.threshold)) {
            best_gap = gap;
            best = {t, res.fnir_percent, res.fpir_percent};
        }
    }
    return best;
}

/// Per-probe verification scores with a quality value for rejection studies.
struct ProbeScores {
    QualityValue quality;
    std::vector<double> genuine;
    std::vector<double> impostor;
};

struct RejectCurvePoint {
    double reject_fraction = 0.0;
    double error_percent = 0.0;  // FNMR at the fixed threshold
};

/// FNMR at a threshold fixed from the 0-rejection FAR operating point, as a
/// function of the fraction of lowest-quality probes rejected.
inline std::vector<RejectCurvePoint> error_reject_curve(
    const std::vector<ProbeScores>& probes, const std::vector<double>& reject_fractions,
    double far_target_percent = 0.01) {
    LabeledScoreSet all;
    std::vector<QualityValue> qualities;
    for (const auto& p : probes) {
        all.genuine.insert(all.genuine.end(), p.genuine.begin(), p.genuine.end());
        all.impostor.insert(all.impostor.end(), p.impostor.begin(), p.impostor.end());
        qualities.push_back(p.quality);
    }
    const double threshold = tar_at_far(all, far_target_percent).threshold;

    std::vector<RejectCurvePoint> curve;
    for (double f : reject_fractions) {
        const auto [kept, rejected] = reject_by_quality(qualities, f);
        std::size_t genuine_total = 0, misses = 0;
        for (std::size_t i : kept)
            for (double s : probes[i].genuine) {
                ++genuine_total;
                if (s < threshold) ++misses;
            }
        if (kept.empty() || genuine_total == 0)
            throw AllRejected("no genuine comparisons left after rejection");
        curve.push_back({f, 100.0 * static_cast<double>(misses) /
                                static_cast<double>(genuine_total)});
    }
    std::sort(curve.begin(), curve.end(), [](const auto& a, const auto& b) {
        return a.reject_fraction < b.reject_fraction;
    });
    return curve;
}

/// One subject's raw branch embeddings, the sweep's unit of enrollment.
struct BranchSample {
    std::string subject_id;
    Embedding branch_v;
    Embedding branch_r;
};

struct SweepRow {
    std::size_t total_dim = 0;   // per-branch dim x 2
    std::size_t template_bytes = 0;  // total_dim + 4
    double tar_percent = 0.0;
    double threshold = 0.0;
};

/// Per-branch reducer pair for one sweep row; null models mean identity.
struct ReducerPair {
    const ReducerModel* v = nullptr;
    const ReducerModel* r = nullptr;
};

/// Reduces, compresses, round-trips, scores all pairs and tabulates TAR@FAR
/// per template size.
inline std::vector<SweepRow> template_size_sweep(
    const std::vector<BranchSample>& samples,
    const std::vector<std::pair<std::size_t, ReducerPair>>& dims_and_models,
    double far_target_percent = 0.01) {
    std::vector<SweepRow> rows;
    for (const auto& [per_branch_dim, models] : dims_and_models) {
        std::vector<std::string> ids;
        std::vector<std::vector<float>> vectors;
        for (const auto& s : samples) {
            Embedding v = s.branch_v;
            Embedding r = s.branch_r;
            if (models.v != nullptr) v = reduce(*models.v, v);
            else if (v.dim() != per_branch_dim)
                throw MissingModel("no reducer for requested branch dimension");
            if (models.r != nullptr) r = reduce(*models.r, r);
            else if (r.dim() != per_branch_dim)
                throw MissingModel("no reducer for requested branch dimension");
            const ConcatTemplate t(v, r);
            // Round-trip through the codec so the sweep measures deployed
            // template fidelity, not float scores.
            const Embedding back = decompress(compress(Embedding(t.concat())));
            ids.push_back(s.subject_id);
            vectors.push_back(back.values());
        }
        LabeledScoreSet scores;
        for (std::size_t i = 0; i < vectors.size(); ++i)
            for (std::size_t j = i + 1; j < vectors.size(); ++j) {
                const double s = score_from_dot(dot_product(vectors[i], vectors[j]));
                (ids[i] == ids[j] ? scores.genuine : scores.impostor).push_back(s);
            }
        const TarFarResult t = tar_at_far(scores, far_target_percent);
        rows.push_back({2 * per_branch_dim, 2 * per_branch_dim + 4, t.tar_percent,
                        t.threshold});
    }
    return rows;
}

}  // namespace palmid
