#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "palmid/embedding.hpp"
#include "palmid/errors.hpp"

namespace palmid {

struct EmbeddingRecord {
    std::string id;
    std::string branch;  // "v" or "r"
    Embedding embedding;
};

/// CSV with header "id,branch,dim,values...".
inline std::vector<EmbeddingRecord> read_embeddings_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open embeddings file: " + path);
    std::string line;
    if (!std::getline(f, line)) throw Error("empty embeddings file: " + path);
    std::vector<EmbeddingRecord> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string id, branch, dim_str, cell;
        if (!std::getline(ss, id, ',') || !std::getline(ss, branch, ',') ||
            !std::getline(ss, dim_str, ','))
            throw Error("malformed embeddings CSV row");
        const std::size_t dim = std::stoul(dim_str);
        std::vector<float> values;
        values.reserve(dim);
        while (std::getline(ss, cell, ',')) values.push_back(std::stof(cell));
        if (values.size() != dim) throw Error("embeddings CSV dim mismatch for id " + id);
        out.push_back({id, branch, Embedding(std::move(values))});
    }
    return out;
}

inline void write_embeddings_csv(const std::vector<EmbeddingRecord>& records,
                                 const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot open embeddings file for writing: " + path);
    f << "id,branch,dim,values...\n";
    f.precision(9);
    for (const auto& r : records) {
        f << r.id << ',' << r.branch << ',' << r.embedding.dim();
        for (float v : r.embedding.values()) f << ',' << v;
        f << '\n';
    }
}

// Binary layout (little-endian): "PEMB" | dim u32 | count u64 |
// records, each: id_len u16 | id bytes | dim float32 values.
// One file holds one branch; the branch tag is supplied by the caller.

inline std::vector<EmbeddingRecord> read_embeddings_pemb(const std::string& path,
                                                         const std::string& branch = "v") {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open embeddings file: " + path);
    char magic[4];
    f.read(magic, 4);
    if (f.gcount() != 4 || magic[0] != 'P' || magic[1] != 'E' || magic[2] != 'M' ||
        magic[3] != 'B')
        throw Error("bad PEMB magic: " + path);
    std::uint32_t dim = 0;
    std::uint64_t count = 0;
    f.read(reinterpret_cast<char*>(&dim), 4);
    f.read(reinterpret_cast<char*>(&count), 8);
    std::vector<EmbeddingRecord> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint16_t id_len = 0;
        f.read(reinterpret_cast<char*>(&id_len), 2);
        std::string id(id_len, '\0');
        f.read(id.data(), id_len);
        std::vector<float> values(dim);
        f.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(dim * sizeof(float)));
        if (!f) throw Error("truncated PEMB file: " + path);
        out.push_back({std::move(id), branch, Embedding(std::move(values))});
    }
    return out;
}

inline void write_embeddings_pemb(const std::vector<EmbeddingRecord>& records,
                                  const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open embeddings file for writing: " + path);
    f.write("PEMB", 4);
    const std::uint32_t dim = records.empty() ? 0 : static_cast<std::uint32_t>(records[0].embedding.dim());
    const std::uint64_t count = records.size();
    f.write(reinterpret_cast<const char*>(&dim), 4);
    f.write(reinterpret_cast<const char*>(&count), 8);
    for (const auto& r : records) {
        if (r.embedding.dim() != dim) throw Error("PEMB records must share one dimension");
        const std::uint16_t id_len = static_cast<std::uint16_t>(r.id.size());
        f.write(reinterpret_cast<const char*>(&id_len), 2);
        f.write(r.id.data(), id_len);
        f.write(reinterpret_cast<const char*>(r.embedding.values().data()),
                static_cast<std::streamsize>(dim * sizeof(float)));
    }
}

}  // namespace palmid
