#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <vector>

#include "palmid/embedding.hpp"
#include "palmid/errors.hpp"
#include "palmid/half.hpp"

namespace palmid {

/// Quantized embedding: n uint8 codes plus the half-precision min/max of the
/// original values.  Serialized size is exactly n + 4 bytes.
struct CompressedTemplate {
    std::vector<std::uint8_t> codes;
    std::uint16_t min_half = 0;  // binary16 bit pattern
    std::uint16_t max_half = 0;

    std::size_t dim() const { return codes.size(); }
    std::size_t serialized_size() const { return codes.size() + 4; }

    bool operator==(const CompressedTemplate& o) const {
        return codes == o.codes && min_half == o.min_half && max_half == o.max_half;
    }
};

inline CompressedTemplate compress(const Embedding& e) {
    const auto& v = e.values();
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const float mn = *mn_it;
    const float mx = *mx_it;
    const double range = static_cast<double>(mx) - static_cast<double>(mn);

    CompressedTemplate t;
    t.min_half = half_from_float(mn);
    t.max_half = half_from_float(mx);
    t.codes.resize(v.size());
    if (range == 0.0) {
        // Degenerate range: all codes 0, value recovered from min_half.
        std::fill(t.codes.begin(), t.codes.end(), std::uint8_t{0});
        return t;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double unit = (static_cast<double>(v[i]) - mn) / range;
        const double q = round_ties_even(unit * 255.0);
        t.codes[i] = static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
    }
    return t;
}

inline Embedding decompress(const CompressedTemplate& t) {
    const float mn = float_from_half(t.min_half);
    const float mx = float_from_half(t.max_half);
    if (mn > mx) throw CorruptTemplate("template min exceeds max");
    std::vector<float> values(t.codes.size());
    const float range = mx - mn;
    for (std::size_t i = 0; i < t.codes.size(); ++i)
        values[i] = mn + (static_cast<float>(t.codes[i]) / 255.0f) * range;
    return Embedding(std::move(values));
}

// Layout: min_half (2 bytes LE) | max_half (2 bytes LE) | codes (n bytes).

inline void serialize_to(const CompressedTemplate& t, std::vector<std::uint8_t>& out) {
    out.push_back(static_cast<std::uint8_t>(t.min_half & 0xFF));
    out.push_back(static_cast<std::uint8_t>(t.min_half >> 8));
    out.push_back(static_cast<std::uint8_t>(t.max_half & 0xFF));
    out.push_back(static_cast<std::uint8_t>(t.max_half >> 8));
    out.insert(out.end(), t.codes.begin(), t.codes.end());
}

inline std::vector<std::uint8_t> serialize(const CompressedTemplate& t) {
    std::vector<std::uint8_t> out;
    out.reserve(t.serialized_size());
    serialize_to(t, out);
    return out;
}

inline CompressedTemplate deserialize(const std::uint8_t* data, std::size_t len) {
    if (len < 4) throw TruncatedTemplate("template shorter than 4 bytes");
    CompressedTemplate t;
    t.min_half = static_cast<std::uint16_t>(data[0] | (data[1] << 8));
    t.max_half = static_cast<std::uint16_t>(data[2] | (data[3] << 8));
    t.codes.assign(data + 4, data + len);
    return t;
}

inline CompressedTemplate deserialize(const std::vector<std::uint8_t>& bytes) {
    return deserialize(bytes.data(), bytes.size());
}

}  // namespace palmid
