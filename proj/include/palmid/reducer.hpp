#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "palmid/embedding.hpp"
#include "palmid/errors.hpp"

namespace palmid {

/// Small MLP with a leaky rectifier between layers, trained to preserve
/// pairwise Euclidean distances (MDS stress).
class ReducerModel {
public:
    struct Layer {
        Eigen::MatrixXd w;  // out x in
        Eigen::VectorXd b;
    };

    ReducerModel() = default;

    /// widths, e.g. {384, 320, 256}; weights drawn from a seeded uniform.
    ReducerModel(const std::vector<std::size_t>& widths, double leaky_slope = 0.2,
                 std::uint64_t seed = 1) : slope_(leaky_slope) {
        if (widths.size() < 2) throw Error("reducer needs at least input and output widths");
        std::mt19937_64 rng(seed);
        for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
            const auto in = static_cast<Eigen::Index>(widths[l]);
            const auto out = static_cast<Eigen::Index>(widths[l + 1]);
            const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
            std::uniform_real_distribution<double> u(-bound, bound);
            Layer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
            for (Eigen::Index i = 0; i < out; ++i)
                for (Eigen::Index j = 0; j < in; ++j) layer.w(i, j) = u(rng);
            layers_.push_back(std::move(layer));
        }
    }

    std::size_t input_dim() const { return static_cast<std::size_t>(layers_.front().w.cols()); }
    std::size_t output_dim() const { return static_cast<std::size_t>(layers_.back().w.rows()); }
    double leaky_slope() const { return slope_; }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers_) n += static_cast<std::size_t>(l.w.size() + l.b.size());
        return n;
    }

    /// Columns are samples.  Leaky rectifier on every layer but the last.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd h = x;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            h = (layers_[l].w * h).colwise() + layers_[l].b;
            if (l + 1 < layers_.size()) h = leaky(h);
        }
        return h;
    }

    bool operator==(const ReducerModel& o) const {
        if (layers_.size() != o.layers_.size() || slope_ != o.slope_) return false;
        for (std::size_t l = 0; l < layers_.size(); ++l)
            if (layers_[l].w != o.layers_[l].w || layers_[l].b != o.layers_[l].b) return false;
        return true;
    }

    // File layout (little-endian): "PMDS" | version u16 = 1 | slope f32 |
    // layer_count u32 | widths (layer_count+1) u32 | per layer: weights
    // row-major f32, then biases f32.
    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open model file for writing: " + path);
        f.write("PMDS", 4);
        const std::uint16_t version = 1;
        f.write(reinterpret_cast<const char*>(&version), 2);
        const float slope = static_cast<float>(slope_);
        f.write(reinterpret_cast<const char*>(&slope), 4);
        const std::uint32_t nl = static_cast<std::uint32_t>(layers_.size());
        f.write(reinterpret_cast<const char*>(&nl), 4);
        std::uint32_t w = static_cast<std::uint32_t>(input_dim());
        f.write(reinterpret_cast<const char*>(&w), 4);
        for (const auto& l : layers_) {
            w = static_cast<std::uint32_t>(l.w.rows());
            f.write(reinterpret_cast<const char*>(&w), 4);
        }
        for (const auto& l : layers_) {
            for (Eigen::Index i = 0; i < l.w.rows(); ++i)
                for (Eigen::Index j = 0; j < l.w.cols(); ++j) {
                    const float v = static_cast<float>(l.w(i, j));
                    f.write(reinterpret_cast<const char*>(&v), 4);
                }
            for (Eigen::Index i = 0; i < l.b.size(); ++i) {
                const float v = static_cast<float>(l.b(i));
                f.write(reinterpret_cast<const char*>(&v), 4);
            }
        }
    }

    static ReducerModel load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open model file: " + path);
        char magic[4];
        f.read(magic, 4);
        if (f.gcount() != 4 || std::string(magic, 4) != "PMDS")
            throw MissingModel("bad reducer model magic: " + path);
        std::uint16_t version = 0;
        f.read(reinterpret_cast<char*>(&version), 2);
        if (version != 1) throw MissingModel("unsupported reducer model version");
        float slope = 0.0f;
        f.read(reinterpret_cast<char*>(&slope), 4);
        std::uint32_t nl = 0;
        f.read(reinterpret_cast<char*>(&nl), 4);
        std::vector<std::uint32_t> widths(nl + 1);
        f.read(reinterpret_cast<char*>(widths.data()), static_cast<std::streamsize>(4 * widths.size()));
        ReducerModel m;
        m.slope_ = slope;
        for (std::uint32_t l = 0; l < nl; ++l) {
            Layer layer{Eigen::MatrixXd(widths[l + 1], widths[l]),
                        Eigen::VectorXd(widths[l + 1])};
            for (Eigen::Index i = 0; i < layer.w.rows(); ++i)
                for (Eigen::Index j = 0; j < layer.w.cols(); ++j) {
                    float v = 0.0f;
                    f.read(reinterpret_cast<char*>(&v), 4);
                    layer.w(i, j) = v;
                }
            for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
                float v = 0.0f;
                f.read(reinterpret_cast<char*>(&v), 4);
                layer.b(i) = v;
            }
            if (!f) throw MissingModel("truncated reducer model: " + path);
            m.layers_.push_back(std::move(layer));
        }
        return m;
    }

    Eigen::MatrixXd leaky(const Eigen::MatrixXd& x) const {
        return x.unaryExpr([s = slope_](double v) { return v > 0.0 ? v : s * v; });
    }
    Eigen::MatrixXd leaky_grad(const Eigen::MatrixXd& pre) const {
        return pre.unaryExpr([s = slope_](double v) { return v > 0.0 ? 1.0 : s; });
    }

private:
    std::vector<Layer> layers_;
    double slope_ = 0.2;
};

/// Forward pass on one embedding; output unit-normalized, raw norm retained.
inline Embedding reduce(const ReducerModel& m, const Embedding& e) {
    if (e.dim() != m.input_dim()) throw DimMismatch("reduce: embedding dimension mismatch");
    Eigen::VectorXd x(static_cast<Eigen::Index>(e.dim()));
    for (std::size_t i = 0; i < e.dim(); ++i) x(static_cast<Eigen::Index>(i)) = e.values()[i];
    const Eigen::VectorXd y = m.forward(x);
    std::vector<float> out(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(y(i));
    return Embedding(std::move(out)).normalized();
}

/// Batch of index pairs into a sample matrix (columns are points).
struct PairBatch {
    Eigen::MatrixXd x1;  // input_dim x pairs
    Eigen::MatrixXd x2;
};

/// Mean squared difference between input-space and reduced-space pairwise
/// Euclidean distances (the stress objective).
inline double mds_loss(const ReducerModel& m, const PairBatch& batch) {
    const Eigen::MatrixXd y1 = m.forward(batch.x1);
    const Eigen::MatrixXd y2 = m.forward(batch.x2);
    const Eigen::ArrayXd d_in = (batch.x1 - batch.x2).colwise().norm().array();
    const Eigen::ArrayXd d_out = (y1 - y2).colwise().norm().array();
    return ((d_in - d_out) * (d_in - d_out)).mean();
}

namespace detail {

struct ForwardCache {
    std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
    std::vector<Eigen::MatrixXd> post;  // post-activation per layer (post[0] = input)
};

inline Eigen::MatrixXd forward_cached(const ReducerModel& m, const Eigen::MatrixXd& x,
                                      ForwardCache& cache) {
    cache.pre.clear();
    cache.post.clear();
    cache.post.push_back(x);
    Eigen::MatrixXd h = x;
    const auto& layers = m.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::MatrixXd z = (layers[l].w * h).colwise() + layers[l].b;
        cache.pre.push_back(z);
        h = (l + 1 < layers.size()) ? m.leaky(z) : z;
        cache.post.push_back(h);
    }
    return h;
}

inline void backprop(const ReducerModel& m, const ForwardCache& cache,
                     Eigen::MatrixXd delta, std::vector<Eigen::MatrixXd>& grad_w,
                     std::vector<Eigen::VectorXd>& grad_b) {
    const auto& layers = m.layers();
    for (std::size_t l = layers.size(); l-- > 0;) {
        if (l + 1 < layers.size())
            delta = delta.cwiseProduct(m.leaky_grad(cache.pre[l]));
        grad_w[l] += delta * cache.post[l].transpose();
        grad_b[l] += delta.rowwise().sum();
        if (l > 0) delta = layers[l].w.transpose() * delta;
    }
}

}  // namespace detail

/// Analytic gradient of mds_loss with respect to every parameter.
/// Returns the loss; gradients are accumulated into grad_w / grad_b.
inline double mds_loss_grad(const ReducerModel& m, const PairBatch& batch,
                            std::vector<Eigen::MatrixXd>& grad_w,
                            std::vector<Eigen::VectorXd>& grad_b) {
    detail::ForwardCache c1, c2;
    const Eigen::MatrixXd y1 = detail::forward_cached(m, batch.x1, c1);
    const Eigen::MatrixXd y2 = detail::forward_cached(m, batch.x2, c2);
    const Eigen::Index pairs = batch.x1.cols();

    const Eigen::ArrayXd d_in = (batch.x1 - batch.x2).colwise().norm().array();
    const Eigen::MatrixXd diff = y1 - y2;
    const Eigen::ArrayXd d_out = diff.colwise().norm().array();
    const double loss = ((d_in - d_out) * (d_in - d_out)).mean();

    // dL/d(d_out) = 2 (d_out - d_in) / P; dL/dy1 = that * (y1-y2)/d_out.
    Eigen::ArrayXd scale = 2.0 * (d_out - d_in) / static_cast<double>(pairs);
    for (Eigen::Index i = 0; i < pairs; ++i)
        scale(i) = d_out(i) > 1e-12 ? scale(i) / d_out(i) : 0.0;
    const Eigen::MatrixXd dy1 = diff.array().rowwise() * scale.transpose();

    detail::backprop(m, c1, dy1, grad_w, grad_b);
    detail::backprop(m, c2, -dy1, grad_w, grad_b);
    return loss;
}

/// Central finite-difference check of mds_loss_grad; returns the max
/// relative error over all parameters.
inline double grad_check(ReducerModel m, const PairBatch& batch, double step = 1e-5) {
    std::vector<Eigen::MatrixXd> gw;
    std::vector<Eigen::VectorXd> gb;
    for (const auto& l : m.layers()) {
        gw.emplace_back(Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()));
        gb.emplace_back(Eigen::VectorXd::Zero(l.b.size()));
    }
    mds_loss_grad(m, batch, gw, gb);

    // Central differences carry cancellation noise of roughly eps*|loss|/step,
    // so near-zero gradient components need an absolute floor scaled by the
    // loss magnitude or the relative error is pure noise.
    const double floor = 1e-5 * std::max(1.0, std::abs(mds_loss(m, batch)));
    double max_rel = 0.0;
    auto check_param = [&](double& p, double analytic) {
        const double saved = p;
        p = saved + step;
        const double lp = mds_loss(m, batch);
        p = saved - step;
        const double lm = mds_loss(m, batch);
        p = saved;
        const double numeric = (lp - lm) / (2.0 * step);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
        max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
    };
    for (std::size_t l = 0; l < m.layers().size(); ++l) {
        auto& layer = m.layers()[l];
        for (Eigen::Index i = 0; i < layer.w.rows(); ++i)
            for (Eigen::Index j = 0; j < layer.w.cols(); ++j)
                check_param(layer.w(i, j), gw[l](i, j));
        for (Eigen::Index i = 0; i < layer.b.size(); ++i)
            check_param(layer.b(i), gb[l](i));
    }
    return max_rel;
}

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t epochs = 30;
    std::size_t batch_size = 64;       // pairs per step
    std::size_t steps_per_epoch = 50;  // pair-sampling rule: uniform with replacement
    double holdout_fraction = 0.1;
    std::vector<std::size_t> widths;   // defaults to {d, (d+out)/2, out}
    std::size_t output_dim = 256;
    double leaky_slope = 0.2;
    std::uint64_t seed = 1;
};

struct TrainResult {
    ReducerModel model;                 // best held-out model
    std::vector<double> holdout_curve;  // per-epoch held-out stress
    double initial_holdout = 0.0;
    double best_holdout = 0.0;
};

/// Plain mini-batch gradient descent on the stress objective.  Returns the
/// model with the lowest held-out loss seen at any epoch boundary.
inline TrainResult train_reducer(const std::vector<Embedding>& data, const TrainConfig& cfg) {
    if (data.size() < 2) throw Error("train_reducer needs >= 2 embeddings");
    if (cfg.learning_rate <= 0.0 || cfg.epochs < 1) throw Error("bad train config");
    const std::size_t d = data[0].dim();
    for (const auto& e : data)
        if (e.dim() != d) throw DimMismatch("training embeddings differ in dimension");

    std::vector<std::size_t> widths = cfg.widths;
    if (widths.empty()) widths = {d, (d + cfg.output_dim) / 2, cfg.output_dim};

    Eigen::MatrixXd all(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = 0; j < d; ++j)
            all(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = data[i].values()[j];

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> perm(data.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::size_t n_hold = static_cast<std::size_t>(cfg.holdout_fraction * data.size());
    n_hold = std::min(n_hold, data.size() - 2);
    const std::size_t n_train = data.size() - n_hold;

    // Fixed held-out pair set (all pairs when small, sampled otherwise).
    std::vector<std::pair<std::size_t, std::size_t>> hold_pairs;
    if (n_hold >= 2) {
        for (std::size_t i = 0; i < n_hold && hold_pairs.size() < 2000; ++i)
            for (std::size_t j = i + 1; j < n_hold && hold_pairs.size() < 2000; ++j)
                hold_pairs.emplace_back(perm[n_train + i], perm[n_train + j]);
    } else {
        hold_pairs.emplace_back(perm[0], perm[1]);
    }
    auto batch_from = [&](const std::vector<std::pair<std::size_t, std::size_t>>& idx) {
        PairBatch b;
        b.x1.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(idx.size()));
        b.x2.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            b.x1.col(static_cast<Eigen::Index>(k)) = all.col(static_cast<Eigen::Index>(idx[k].first));
            b.x2.col(static_cast<Eigen::Index>(k)) = all.col(static_cast<Eigen::Index>(idx[k].second));
        }
        return b;
    };
    const PairBatch hold_batch = batch_from(hold_pairs);

    ReducerModel model(widths, cfg.leaky_slope, cfg.seed);
    TrainResult result;
    result.initial_holdout = mds_loss(model, hold_batch);
    result.best_holdout = result.initial_holdout;
    result.model = model;

    std::uniform_int_distribution<std::size_t> pick(0, n_train - 1);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t step = 0; step < cfg.steps_per_epoch; ++step) {
            std::vector<std::pair<std::size_t, std::size_t>> idx(cfg.batch_size);
            for (auto& pr : idx) {
                std::size_t a = pick(rng), b = pick(rng);
                while (b == a) b = pick(rng);
                pr = {perm[a], perm[b]};
            }
            const PairBatch batch = batch_from(idx);
            std::vector<Eigen::MatrixXd> gw;
            std::vector<Eigen::VectorXd> gb;
            for (const auto& l : model.layers()) {
                gw.emplace_back(Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()));
                gb.emplace_back(Eigen::VectorXd::Zero(l.b.size()));
            }
            const double loss = mds_loss_grad(model, batch, gw, gb);
            if (!std::isfinite(loss)) throw TrainingDiverged("stress became non-finite");
            for (std::size_t l = 0; l < model.layers().size(); ++l) {
                model.layers()[l].w -= cfg.learning_rate * gw[l];
                model.layers()[l].b -= cfg.learning_rate * gb[l];
            }
        }
        const double hold = mds_loss(model, hold_batch);
        if (!std::isfinite(hold)) throw TrainingDiverged("held-out stress became non-finite");
        result.holdout_curve.push_back(hold);
        if (hold < result.best_holdout) {
            result.best_holdout = hold;
            result.model = model;
        }
    }
    return result;
}

}  // namespace palmid
