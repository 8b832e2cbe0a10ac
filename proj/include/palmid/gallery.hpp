#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "palmid/codec.hpp"
#include "palmid/errors.hpp"
#include "palmid/similarity.hpp"

namespace palmid {

struct GalleryEntry {
    std::string subject_id;
    CompressedTemplate tmpl;
    std::uint64_t enroll_seq = 0;
};

struct SearchPolicy {
    double threshold = 0.5;  // T
    std::size_t rank_budget = 1;  // R, >= 1
};

struct Candidate {
    std::string subject_id;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based
    std::uint64_t enroll_seq = 0;
};

struct OpenSetDecision {
    bool accepted = false;
    std::string subject_id;  // empty on reject
    double score = 0.0;
};

/// Enrollment store with exhaustive 1:N search.  The compressed templates are
/// authoritative on disk; decompressed vectors are cached in memory so the
/// search inner loop is a plain dot product.
class Gallery {
public:
    Gallery() = default;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t embedding_dim() const { return embedding_dim_; }
    const std::vector<GalleryEntry>& entries() const { return entries_; }

    void enroll(const std::string& id, const CompressedTemplate& t) {
        if (id.empty()) throw Error("enroll: empty subject id");
        if (entries_.empty()) {
            embedding_dim_ = t.dim();
        } else if (t.dim() != embedding_dim_) {
            throw DimMismatch("enroll: template dimension mismatch");
        }
        GalleryEntry e{id, t, next_seq_++};
        cache_.push_back(decompress(t).values());
        entries_.push_back(std::move(e));
    }

    /// Scores of the probe against every entry, in enrollment order.
    std::vector<double> score_all(const std::vector<float>& probe_concat,
                                  unsigned threads = 1) const {
        if (probe_concat.size() != embedding_dim_)
            throw DimMismatch("search: probe dimension mismatch");
        std::vector<double> scores(entries_.size());
        auto worker = [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i)
                scores[i] = score_from_dot(dot_product(probe_concat, cache_[i]));
        };
        if (threads <= 1 || entries_.size() < 2 * threads) {
            worker(0, entries_.size());
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (entries_.size() + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t) {
                const std::size_t b = std::min<std::size_t>(t * chunk, entries_.size());
                const std::size_t e = std::min<std::size_t>(b + chunk, entries_.size());
                if (b < e) pool.emplace_back(worker, b, e);
            }
            for (auto& th : pool) th.join();
        }
        return scores;
    }

    std::vector<Candidate> search(const ConcatTemplate& probe, const SearchPolicy& policy,
                                  unsigned threads = 1) const {
        return search_raw(probe.concat(), policy.rank_budget, threads);
    }

    /// Top-R candidates by descending score; ties broken by ascending
    /// enroll_seq.  Results are identical for any thread count.
    std::vector<Candidate> search_raw(const std::vector<float>& probe_concat,
                                      std::size_t rank_budget, unsigned threads = 1) const {
        if (entries_.empty()) throw EmptyGallery("search on empty gallery");
        const std::vector<double> scores = score_all(probe_concat, threads);

        std::vector<std::size_t> order(entries_.size());
        std::iota(order.begin(), order.end(), 0);
        const std::size_t r = std::min(rank_budget, entries_.size());
        auto better = [&](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return entries_[a].enroll_seq < entries_[b].enroll_seq;
        };
        std::partial_sort(order.begin(), order.begin() + r, order.end(), better);

        std::vector<Candidate> out;
        out.reserve(r);
        for (std::size_t k = 0; k < r; ++k) {
            const auto& e = entries_[order[k]];
            out.push_back({e.subject_id, scores[order[k]], k + 1, e.enroll_seq});
        }
        return out;
    }

    static OpenSetDecision decide_open_set(const std::vector<Candidate>& candidates,
                                           const SearchPolicy& policy) {
        if (candidates.empty()) return {};
        const Candidate& top = candidates.front();
        if (top.score >= policy.threshold) return {true, top.subject_id, top.score};
        return {false, "", top.score};
    }

    // File format (little-endian):
    //   "PGAL" | version u16 = 1 | embedding_dim u32 | entry_count u64 |
    //   entries, each: id_len u16 | id bytes | template (dim + 4 bytes)
    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open gallery file for writing: " + path);
        std::vector<std::uint8_t> buf;
        buf.insert(buf.end(), {'P', 'G', 'A', 'L'});
        put_u16(buf, 1);
        put_u32(buf, static_cast<std::uint32_t>(embedding_dim_));
        put_u64(buf, entries_.size());
        for (const auto& e : entries_) {
            put_u16(buf, static_cast<std::uint16_t>(e.subject_id.size()));
            buf.insert(buf.end(), e.subject_id.begin(), e.subject_id.end());
            serialize_to(e.tmpl, buf);
        }
        f.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size()));
    }

    static Gallery load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open gallery file: " + path);
        std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)),
                                      std::istreambuf_iterator<char>());
        std::size_t pos = 0;
        auto need = [&](std::size_t n) {
            if (pos + n > buf.size()) throw TruncatedGallery("gallery file truncated");
        };
        need(4);
        if (buf[0] != 'P' || buf[1] != 'G' || buf[2] != 'A' || buf[3] != 'L')
            throw CorruptGallery("bad gallery magic");
        pos = 4;
        need(2);
        const std::uint16_t version = get_u16(buf, pos);
        if (version != 1) throw CorruptGallery("unsupported gallery version");
        need(4);
        const std::uint32_t dim = get_u32(buf, pos);
        need(8);
        const std::uint64_t count = get_u64(buf, pos);

        Gallery g;
        for (std::uint64_t i = 0; i < count; ++i) {
            need(2);
            const std::uint16_t id_len = get_u16(buf, pos);
            need(id_len);
            std::string id(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                           buf.begin() + static_cast<std::ptrdiff_t>(pos + id_len));
            pos += id_len;
            need(dim + 4);
            CompressedTemplate t = deserialize(buf.data() + pos, dim + 4);
            pos += dim + 4;
            g.enroll(id, t);
        }
        return g;
    }

private:
    static void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
        b.push_back(static_cast<std::uint8_t>(v & 0xFF));
        b.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    static void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
    static void put_u64(std::vector<std::uint8_t>& b, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
    static std::uint16_t get_u16(const std::vector<std::uint8_t>& b, std::size_t& pos) {
        std::uint16_t v = static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
        pos += 2;
        return v;
    }
    static std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t& pos) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    static std::uint64_t get_u64(const std::vector<std::uint8_t>& b, std::size_t& pos) {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }

    std::vector<GalleryEntry> entries_;
    std::vector<std::vector<float>> cache_;  // decompressed, matches entries_
    std::size_t embedding_dim_ = 0;
    std::uint64_t next_seq_ = 0;
};

struct BenchStats {
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    std::size_t probes = 0;
    unsigned threads = 1;
};

inline BenchStats bench_search(const Gallery& g,
                               const std::vector<std::vector<float>>& probes,
                               unsigned threads) {
    BenchStats s;
    s.threads = threads;
    s.probes = probes.size();
    std::vector<double> lat;
    lat.reserve(probes.size());
    for (const auto& p : probes) {
        const auto t0 = std::chrono::steady_clock::now();
        volatile double sink = 0.0;
        auto scores = g.score_all(p, threads);
        sink = scores.back();
        (void)sink;
        const auto t1 = std::chrono::steady_clock::now();
        lat.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    if (lat.empty()) return s;
    s.mean_ms = std::accumulate(lat.begin(), lat.end(), 0.0) / static_cast<double>(lat.size());
    std::sort(lat.begin(), lat.end());
    s.median_ms = lat[lat.size() / 2];
    s.min_ms = lat.front();
    s.max_ms = lat.back();
    return s;
}

}  // namespace palmid
