// Command-line surface for the palm template engine: enrollment, 1:1
// verification, 1:N search, protocol evaluation, reducer training, synthetic
// corpus generation, and search benchmarking.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "palmid/palmid.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string gallery_path;
    std::string extractor = "toy";  // toy | file
    std::string embeddings_path;
    double threshold = 0.5;
    std::size_t rank = 1;
    double fusion_weight = 0.7;
    std::string quality_method = "embedding-norm";  // embedding-norm | log-variance
    std::string reducer_v_path;
    std::string reducer_r_path;
    unsigned threads = 0;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

unsigned resolve_threads(unsigned flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("PALM_ENGINE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--gallery", o.gallery_path, "gallery file path");
    cmd->add_option("--extractor", o.extractor, "toy | file")
        ->check(CLI::IsMember({"toy", "file"}));
    cmd->add_option("--embeddings", o.embeddings_path, "embeddings file (CSV or PEMB)");
    cmd->add_option("--threshold", o.threshold, "open-set acceptance threshold T")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--rank", o.rank, "rank budget R")->check(CLI::PositiveNumber);
    cmd->add_option("--fusion-weight", o.fusion_weight, "weight for the primary score")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--quality", o.quality_method, "embedding-norm | log-variance")
        ->check(CLI::IsMember({"embedding-norm", "log-variance"}));
    cmd->add_option("--reducer-v", o.reducer_v_path, "ViT-branch reducer model");
    cmd->add_option("--reducer-r", o.reducer_r_path, "CNN-branch reducer model");
    cmd->add_option("--threads", o.threads, "thread count (default: PALM_ENGINE_THREADS)");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--out-dir", o.out_dir, "output directory for reports");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct LoadedReducers {
    std::optional<palmid::ReducerModel> v;
    std::optional<palmid::ReducerModel> r;
};

LoadedReducers load_reducers(const CommonOpts& o) {
    LoadedReducers lr;
    if (!o.reducer_v_path.empty()) lr.v = palmid::ReducerModel::load(o.reducer_v_path);
    if (!o.reducer_r_path.empty()) lr.r = palmid::ReducerModel::load(o.reducer_r_path);
    return lr;
}

palmid::ConcatTemplate template_from_branches(const palmid::Embedding& v,
                                              const palmid::Embedding& r,
                                              const LoadedReducers& lr) {
    palmid::Embedding bv = lr.v ? palmid::reduce(*lr.v, v) : v;
    palmid::Embedding br = lr.r ? palmid::reduce(*lr.r, r) : r;
    return palmid::ConcatTemplate(bv, br);
}

palmid::ConcatTemplate extract_from_image(const std::string& path,
                                          const LoadedReducers& lr) {
    static const palmid::ToyExtractor extractor;
    const palmid::Image img = palmid::read_pnm(path);
    const palmid::ConcatTemplate raw = extractor.extract(img);
    if (!lr.v && !lr.r) return raw;
    return template_from_branches(raw.branch_v(), raw.branch_r(), lr);
}

// Embedding files carry one row per (id, branch); both branches are required
// per id.
std::map<std::string, palmid::ConcatTemplate> templates_from_file(
    const std::string& path, const LoadedReducers& lr) {
    std::vector<palmid::EmbeddingRecord> records;
    std::ifstream probe(path, std::ios::binary);
    char magic[4] = {};
    probe.read(magic, 4);
    if (std::string(magic, 4) == "PEMB") {
        records = palmid::read_embeddings_pemb(path);
    } else {
        records = palmid::read_embeddings_csv(path);
    }
    std::map<std::string, std::map<std::string, palmid::Embedding>> by_id;
    for (auto& r : records) by_id[r.id].emplace(r.branch, r.embedding);
    std::map<std::string, palmid::ConcatTemplate> out;
    for (auto& [id, branches] : by_id) {
        auto v = branches.find("v");
        auto r = branches.find("r");
        if (v == branches.end() || r == branches.end())
            throw palmid::Error("id " + id + " is missing a branch embedding");
        out.emplace(id, template_from_branches(v->second, r->second, lr));
    }
    return out;
}

// ---------- evaluate ----------

struct ProtocolResult {
    palmid::LabeledScoreSet scores;
    std::vector<palmid::IdentTrial> trials;
    std::vector<palmid::ProbeScores> probe_scores;
    std::vector<int> probe_degraded;  // 1 when the probe was degraded
    std::size_t gallery_size = 0;
};

// Built-in synthetic texture protocol: `classes` enrolled subjects with
// `enroll_per_class` gallery samples and the rest probing mated; an extra
// `nonmated_classes` probe without enrollment.  Optionally degrades a known
// fraction of probes before extraction.
ProtocolResult run_synthetic_protocol(const json& p, const CommonOpts& o,
                                      unsigned threads) {
    const std::size_t classes = p.value("classes", 50);
    const std::size_t samples = p.value("samples_per_class", 10);
    const std::size_t enroll_n = p.value("enroll_per_class", 5);
    const std::size_t nonmated_classes = p.value("nonmated_classes", 10);
    const double degrade_fraction = p.value("degrade_fraction", 0.0);
    const std::uint64_t seed = p.value("seed", o.seed);
    const double noise = p.value("noise_sigma", 0.02);

    const palmid::ToyExtractor extractor;
    palmid::Gallery gallery;
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t s = 0; s < enroll_n; ++s) {
            const palmid::Image img =
                palmid::make_texture_sample(seed + c, s, noise);
            const palmid::ConcatTemplate t = extractor.extract(img);
            gallery.enroll("subj" + std::to_string(c),
                           palmid::compress(palmid::Embedding(t.concat())));
        }

    struct Probe {
        std::string subject;
        bool mated;
        palmid::Image image;
        bool degraded = false;
    };
    std::vector<Probe> probes;
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t s = enroll_n; s < samples; ++s)
            probes.push_back({"subj" + std::to_string(c), true,
                              palmid::make_texture_sample(seed + c, s, noise)});
    for (std::size_t c = 0; c < nonmated_classes; ++c)
        probes.push_back({"unk" + std::to_string(c), false,
                          palmid::make_texture_sample(seed + classes + 1000 + c, 0, noise)});

    if (degrade_fraction > 0.0) {
        const std::size_t k =
            static_cast<std::size_t>(degrade_fraction * probes.size());
        for (std::size_t i = 0; i < k; ++i) {
            // Deterministic spread over the probe list.
            const std::size_t idx = (i * probes.size()) / k;
            palmid::DegradationSpec spec;
            spec.sigma_min = spec.sigma_max = 3.0;
            spec.factor_min = spec.factor_max = 4.0;
            spec.overlay = palmid::OverlayKind::Lines;
            spec.seed = seed + 7000 + idx;
            probes[idx].image = palmid::degrade(probes[idx].image, spec).degraded;
            probes[idx].degraded = true;
        }
    }

    ProtocolResult res;
    res.gallery_size = gallery.size();
    for (const auto& probe : probes) {
        const palmid::ConcatTemplate t = extractor.extract(probe.image);
        const auto candidates = gallery.search_raw(t.concat(), gallery.size(), threads);

        palmid::IdentTrial trial;
        trial.probe_subject = probe.subject;
        trial.mated = probe.mated;
        for (const auto& c : candidates) trial.candidates.emplace_back(c.subject_id, c.score);
        res.trials.push_back(std::move(trial));

        palmid::ProbeScores ps;
        ps.quality = {t.raw_norm_sum(), palmid::QualityMethod::EmbeddingNorm};
        for (const auto& c : candidates)
            (c.subject_id == probe.subject ? ps.genuine : ps.impostor).push_back(c.score);
        res.scores.genuine.insert(res.scores.genuine.end(), ps.genuine.begin(),
                                  ps.genuine.end());
        res.scores.impostor.insert(res.scores.impostor.end(), ps.impostor.begin(),
                                   ps.impostor.end());
        res.probe_scores.push_back(std::move(ps));
        res.probe_degraded.push_back(probe.degraded ? 1 : 0);
    }
    return res;
}

int cmd_evaluate(const CommonOpts& o, const std::string& protocol_path) {
    std::ifstream pf(protocol_path);
    if (!pf) {
        std::cerr << "error: cannot open protocol file: " << protocol_path << "\n";
        return 1;
    }
    json protocol = json::parse(pf);
    const unsigned threads = resolve_threads(o.threads);

    ProtocolResult res;
    if (protocol.contains("synthetic")) {
        res = run_synthetic_protocol(protocol["synthetic"], o, threads);
    } else {
        std::cerr << "error: protocol must contain a \"synthetic\" section\n";
        return 1;
    }

    fs::create_directories(o.out_dir);
    const double far_target = protocol.value("far_target_percent", 0.01);
    const double fpir_target = protocol.value("fpir_target_percent", 1.0);

    const palmid::TarFarResult tf = palmid::tar_at_far(res.scores, far_target);
    const double rank1 = palmid::rank_r_rate(res.trials, o.rank);
    const palmid::FnirFpirResult ff = palmid::fnir_fpir(res.trials, o.threshold, o.rank);
    const palmid::FnirSweepResult sweep =
        palmid::fnir_at_fpir_target(res.trials, fpir_target, o.rank);
    const std::vector<double> fractions = {0.0, 0.05, 0.10, 0.15, 0.20};
    const auto curve = palmid::error_reject_curve(res.probe_scores, fractions, far_target);

    {
        std::ofstream f(fs::path(o.out_dir) / "tar_far.csv", std::ios::trunc);
        f << "far_target_percent,tar_percent,threshold,achieved_far_percent,degenerate\n";
        f << fmt(far_target) << ',' << fmt(tf.tar_percent) << ',' << fmt(tf.threshold)
          << ',' << fmt(tf.achieved_far_percent) << ',' << (tf.degenerate ? 1 : 0) << '\n';
    }
    {
        std::ofstream f(fs::path(o.out_dir) / "rank_r.csv", std::ios::trunc);
        f << "rank,rate_percent\n";
        for (std::size_t r : {std::size_t{1}, std::size_t{5}, std::size_t{10}})
            f << r << ',' << fmt(palmid::rank_r_rate(res.trials, r)) << '\n';
    }
    {
        std::ofstream f(fs::path(o.out_dir) / "fnir_fpir.csv", std::ios::trunc);
        f << "threshold,rank,fnir_percent,fpir_percent\n";
        f << fmt(o.threshold) << ',' << o.rank << ',' << fmt(ff.fnir_percent) << ','
          << fmt(ff.fpir_percent) << '\n';
        f << fmt(sweep.threshold) << ',' << o.rank << ',' << fmt(sweep.fnir_percent)
          << ',' << fmt(sweep.fpir_percent) << '\n';
    }
    {
        std::ofstream f(fs::path(o.out_dir) / "reject_curve.csv", std::ios::trunc);
        f << "reject_fraction,fnmr_percent\n";
        for (const auto& pt : curve)
            f << fmt(pt.reject_fraction) << ',' << fmt(pt.error_percent) << '\n';
    }
    {
        std::ofstream f(fs::path(o.out_dir) / "per_probe.csv", std::ios::trunc);
        f << "probe_index,subject,mated,degraded,quality,top1_score\n";
        for (std::size_t i = 0; i < res.trials.size(); ++i) {
            const auto& t = res.trials[i];
            f << i << ',' << t.probe_subject << ',' << (t.mated ? 1 : 0) << ','
              << res.probe_degraded[i] << ',' << fmt(res.probe_scores[i].quality.value)
              << ',' << fmt(t.candidates.empty() ? 0.0 : t.candidates.front().second)
              << '\n';
        }
    }
    json summary = {
        {"config",
         {{"threshold", o.threshold},
          {"rank", o.rank},
          {"gallery_size", res.gallery_size},
          {"quality_method", "embedding-norm"},
          {"far_target_percent", far_target},
          {"fpir_target_percent", fpir_target},
          {"seed", o.seed}}},
        {"tar_at_far", {{"tar_percent", tf.tar_percent}, {"threshold", tf.threshold}}},
        {"rank_1_percent", rank1},
        {"fnir_fpir_at_config",
         {{"fnir_percent", ff.fnir_percent}, {"fpir_percent", ff.fpir_percent}}},
        {"fnir_at_fpir_target",
         {{"threshold", sweep.threshold},
          {"fnir_percent", sweep.fnir_percent},
          {"fpir_percent", sweep.fpir_percent}}},
    };
    std::ofstream(fs::path(o.out_dir) / "summary.json", std::ios::trunc)
        << summary.dump(2) << '\n';
    std::cout << "evaluate: wrote reports to " << o.out_dir << "\n"
              << "  TAR@FAR=" << fmt(far_target) << "%: " << fmt(tf.tar_percent) << "%\n"
              << "  rank-" << o.rank << ": " << fmt(rank1) << "%\n"
              << "  FNIR@FPIR=" << fmt(fpir_target) << "%: " << fmt(sweep.fnir_percent)
              << "%\n";
    return 0;
}

// ---------- enroll / verify / search ----------

int cmd_enroll(const CommonOpts& o, const std::vector<std::string>& inputs) {
    if (o.gallery_path.empty()) {
        std::cerr << "error: --gallery is required\n";
        return 1;
    }
    palmid::Gallery g;
    if (fs::exists(o.gallery_path)) g = palmid::Gallery::load(o.gallery_path);
    const LoadedReducers lr = load_reducers(o);

    std::size_t added = 0;
    if (o.extractor == "file") {
        for (auto& [id, t] : templates_from_file(o.embeddings_path, lr)) {
            g.enroll(id, palmid::compress(palmid::Embedding(t.concat())));
            ++added;
        }
    } else {
        for (const auto& path : inputs) {
            const palmid::ConcatTemplate t = extract_from_image(path, lr);
            g.enroll(fs::path(path).stem().string(),
                     palmid::compress(palmid::Embedding(t.concat())));
            ++added;
        }
    }
    g.save(o.gallery_path);
    std::cout << "enrolled " << added << " templates; gallery size " << g.size() << "\n";
    return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& probe_path,
               const std::string& claimed_id) {
    const palmid::Gallery g = palmid::Gallery::load(o.gallery_path);
    const LoadedReducers lr = load_reducers(o);
    const palmid::ConcatTemplate probe = extract_from_image(probe_path, lr);

    double best = -1.0;
    bool found = false;
    for (const auto& e : g.entries()) {
        if (e.subject_id != claimed_id) continue;
        found = true;
        const palmid::Embedding stored = palmid::decompress(e.tmpl);
        best = std::max(best, palmid::score_from_dot(palmid::dot_product(
                                  probe.concat(), stored.values())));
    }
    if (!found) throw palmid::UnknownSubject("id not enrolled: " + claimed_id);
    const bool accept = best >= o.threshold;
    std::cout << "score " << fmt(best) << " -> " << (accept ? "ACCEPT" : "REJECT") << "\n";
    return accept ? 0 : 2;
}

int cmd_search(const CommonOpts& o, const std::string& probe_path) {
    const palmid::Gallery g = palmid::Gallery::load(o.gallery_path);
    const LoadedReducers lr = load_reducers(o);
    const palmid::ConcatTemplate probe = extract_from_image(probe_path, lr);
    const palmid::SearchPolicy policy{o.threshold, o.rank};
    const auto candidates = g.search(probe, policy, resolve_threads(o.threads));
    for (const auto& c : candidates)
        std::cout << "rank " << c.rank << ": " << c.subject_id << " score "
                  << fmt(c.score) << "\n";
    const auto decision = palmid::Gallery::decide_open_set(candidates, policy);
    if (decision.accepted)
        std::cout << "ACCEPT " << decision.subject_id << "\n";
    else
        std::cout << "REJECT (below threshold)\n";
    return 0;
}

// ---------- reduce-train ----------

int cmd_reduce_train(const CommonOpts& o, const std::string& out_model,
                     const std::string& branch, std::size_t output_dim,
                     double lr, std::size_t epochs, bool synthetic_blobs) {
    std::vector<palmid::Embedding> data;
    if (synthetic_blobs) {
        const auto blobs = palmid::make_blobs(10, 40, 384, 1.0, 0.15, o.seed);
        data = blobs.embeddings;
    } else {
        for (auto& r : palmid::read_embeddings_csv(o.embeddings_path))
            if (r.branch == branch) data.push_back(r.embedding);
    }
    palmid::TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.epochs = epochs;
    cfg.output_dim = output_dim;
    cfg.seed = o.seed;
    const palmid::TrainResult result = palmid::train_reducer(data, cfg);
    result.model.save(out_model);

    fs::create_directories(o.out_dir);
    std::ofstream curve(fs::path(o.out_dir) / "train_curve.csv", std::ios::trunc);
    curve << "epoch,holdout_stress\n";
    for (std::size_t e = 0; e < result.holdout_curve.size(); ++e)
        curve << e << ',' << fmt(result.holdout_curve[e]) << '\n';
    std::cout << "trained reducer on " << data.size() << " embeddings; held-out stress "
              << fmt(result.initial_holdout) << " -> " << fmt(result.best_holdout)
              << "; saved " << out_model << "\n";
    return 0;
}

// ---------- synth-corpus ----------

int cmd_synth_corpus(const CommonOpts& o, std::size_t count, const std::string& overlay,
                     double sigma_max, double factor_max, const std::string& henna_path) {
    fs::create_directories(o.out_dir);
    palmid::DegradationSpec spec;
    spec.sigma_max = sigma_max;
    spec.factor_max = factor_max;
    if (overlay == "lines") spec.overlay = palmid::OverlayKind::Lines;
    else if (overlay == "text") spec.overlay = palmid::OverlayKind::Text;
    else if (overlay == "henna") spec.overlay = palmid::OverlayKind::HennaMask;

    std::optional<palmid::Image> henna;
    if (spec.overlay == palmid::OverlayKind::HennaMask) {
        if (henna_path.empty()) {
            std::cerr << "error: henna overlay requires --henna-mask\n";
            return 1;
        }
        henna = palmid::read_pnm(henna_path);
    }

    std::ofstream manifest(fs::path(o.out_dir) / "manifest.csv", std::ios::trunc);
    manifest << "sample_id,seed,overlay,sigma_min,sigma_max,factor_min,factor_max,"
                "alpha_min,alpha_max\n";
    for (std::size_t i = 0; i < count; ++i) {
        spec.seed = o.seed + i;
        const palmid::Image clean = palmid::make_texture_sample(o.seed + i / 4, i % 4);
        const palmid::DegradedSample s =
            palmid::degrade(clean, spec, henna ? &*henna : nullptr);
        char name[64];
        std::snprintf(name, sizeof(name), "sample_%05zu", i);
        palmid::write_pnm(s.clean, (fs::path(o.out_dir) / (std::string(name) + "_clean.pgm")).string());
        palmid::write_pnm(s.degraded,
                          (fs::path(o.out_dir) / (std::string(name) + "_degraded.pgm")).string());
        manifest << name << ',' << spec.seed << ',' << overlay << ','
                 << fmt(spec.sigma_min) << ',' << fmt(spec.sigma_max) << ','
                 << fmt(spec.factor_min) << ',' << fmt(spec.factor_max) << ','
                 << fmt(spec.alpha_min) << ',' << fmt(spec.alpha_max) << '\n';
    }
    std::cout << "wrote " << count << " paired samples to " << o.out_dir << "\n";
    return 0;
}

// ---------- bench ----------

int cmd_bench(const CommonOpts& o, std::size_t size, std::vector<unsigned> thread_counts,
              std::size_t n_probes) {
    if (size == 0) {
        std::cerr << "error: gallery size must be positive\n";
        return 1;
    }
    if (thread_counts.empty()) thread_counts = {1, 2, 4, 8};

    palmid::detail::DetRng rng(o.seed);
    palmid::Gallery g;
    const std::size_t dim = 512;
    for (std::size_t i = 0; i < size; ++i)
        g.enroll("s" + std::to_string(i),
                 palmid::compress(palmid::Embedding(palmid::random_unit_vector(dim, rng))));
    std::vector<std::vector<float>> probes;
    for (std::size_t i = 0; i < n_probes; ++i)
        probes.push_back(palmid::random_unit_vector(dim, rng));

    std::cout << "gallery " << size << " x " << dim << "-dim, " << n_probes
              << " probes\nthreads,mean_ms,median_ms,min_ms,max_ms\n";
    for (unsigned t : thread_counts) {
        const palmid::BenchStats s = palmid::bench_search(g, probes, t);
        std::cout << t << ',' << fmt(s.mean_ms) << ',' << fmt(s.median_ms) << ','
                  << fmt(s.min_ms) << ',' << fmt(s.max_ms) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"palm template engine and evaluation harness"};
    app.require_subcommand(1);
    CommonOpts o;

    auto* enroll = app.add_subcommand("enroll", "extract, compress, and add to a gallery");
    std::vector<std::string> enroll_inputs;
    add_common(enroll, o);
    enroll->add_option("inputs", enroll_inputs, "PGM/PPM image files");

    auto* verify = app.add_subcommand("verify", "1:1 verification against a claimed id");
    std::string probe_path, claimed_id;
    add_common(verify, o);
    verify->add_option("probe", probe_path, "probe image")->required();
    verify->add_option("claimed-id", claimed_id, "claimed subject id")->required();

    auto* search = app.add_subcommand("search", "1:N open-set search");
    std::string search_probe;
    add_common(search, o);
    search->add_option("probe", search_probe, "probe image")->required();

    auto* evaluate = app.add_subcommand("evaluate", "run a declared protocol");
    std::string protocol_path;
    add_common(evaluate, o);
    evaluate->add_option("protocol", protocol_path, "protocol JSON file")->required();

    auto* reduce_train = app.add_subcommand("reduce-train", "train a reducer model");
    std::string out_model, branch = "v";
    std::size_t output_dim = 256, epochs = 30;
    double lr = 0.01;
    bool synthetic_blobs = false;
    add_common(reduce_train, o);
    reduce_train->add_option("--out-model", out_model, "PMDS output path")->required();
    reduce_train->add_option("--branch", branch, "branch column to train on (v|r)");
    reduce_train->add_option("--output-dim", output_dim, "reduced dimension");
    reduce_train->add_option("--learning-rate", lr, "gradient descent step size");
    reduce_train->add_option("--epochs", epochs, "training epochs");
    reduce_train->add_flag("--synthetic-blobs", synthetic_blobs,
                           "train on built-in synthetic blobs");

    auto* synth = app.add_subcommand("synth-corpus", "generate a degradation corpus");
    std::size_t count = 16;
    std::string overlay = "lines", henna_path;
    double sigma_max = 2.0, factor_max = 3.0;
    add_common(synth, o);
    synth->add_option("--count", count, "number of paired samples");
    synth->add_option("--overlay", overlay, "none | lines | text | henna")
        ->check(CLI::IsMember({"none", "lines", "text", "henna"}));
    synth->add_option("--blur-sigma-max", sigma_max, "max Gaussian blur sigma");
    synth->add_option("--downsample-max", factor_max, "max downsample factor");
    synth->add_option("--henna-mask", henna_path, "henna mask image (PGM/PPM)");

    auto* bench = app.add_subcommand("bench", "1:N search latency benchmark");
    std::size_t bench_size = 10000, bench_probes = 20;
    std::vector<unsigned> bench_threads;
    add_common(bench, o);
    bench->add_option("--size", bench_size, "synthetic gallery size");
    bench->add_option("--threads-list", bench_threads, "thread counts to sweep");
    bench->add_option("--probes", bench_probes, "probes per measurement");

    CLI11_PARSE(app, argc, argv);

    try {
        if (enroll->parsed()) return cmd_enroll(o, enroll_inputs);
        if (verify->parsed()) return cmd_verify(o, probe_path, claimed_id);
        if (search->parsed()) return cmd_search(o, search_probe);
        if (evaluate->parsed()) return cmd_evaluate(o, protocol_path);
        if (reduce_train->parsed())
            return cmd_reduce_train(o, out_model, branch, output_dim, lr, epochs,
                                    synthetic_blobs);
        if (synth->parsed())
            return cmd_synth_corpus(o, count, overlay, sigma_max, factor_max, henna_path);
        if (bench->parsed()) return cmd_bench(o, bench_size, bench_threads, bench_probes);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
