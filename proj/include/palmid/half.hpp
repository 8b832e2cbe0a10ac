#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

namespace palmid {

// IEEE 754 binary16 conversion, round-to-nearest-even.  Implemented on bit
// patterns so results are identical across platforms regardless of FPU state.

inline std::uint16_t half_from_float(float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));

    const std::uint16_t sign = static_cast<std::uint16_t>((bits >> 16) & 0x8000u);
    const std::uint32_t exp = (bits >> 23) & 0xFFu;
    std::uint32_t mant = bits & 0x7FFFFFu;

    if (exp == 0xFFu) {  // inf / NaN
        return static_cast<std::uint16_t>(sign | 0x7C00u | (mant ? 0x200u : 0u));
    }

    // Re-bias exponent: float bias 127, half bias 15.
    int e = static_cast<int>(exp) - 127 + 15;
    if (e >= 0x1F) {  // overflow to inf
        return static_cast<std::uint16_t>(sign | 0x7C00u);
    }
    if (e <= 0) {  // subnormal or zero
        if (e < -10) return sign;
        mant |= 0x800000u;  // implicit leading 1
        const int shift = 14 - e;  // 14..24
        const std::uint32_t half_mant = mant >> shift;
        const std::uint32_t remainder = mant & ((1u << shift) - 1u);
        const std::uint32_t halfway = 1u << (shift - 1);
        std::uint32_t out = half_mant;
        if (remainder > halfway || (remainder == halfway && (half_mant & 1u)))
            ++out;
        return static_cast<std::uint16_t>(sign | out);
    }

    std::uint32_t half_mant = mant >> 13;
    const std::uint32_t remainder = mant & 0x1FFFu;
    if (remainder > 0x1000u || (remainder == 0x1000u && (half_mant & 1u))) {
        ++half_mant;
        if (half_mant == 0x400u) {  // mantissa carry into exponent
            half_mant = 0;
            ++e;
            if (e >= 0x1F) return static_cast<std::uint16_t>(sign | 0x7C00u);
        }
    }
    return static_cast<std::uint16_t>(sign | (static_cast<std::uint32_t>(e) << 10) | half_mant);
}

inline float float_from_half(std::uint16_t h) {
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    const std::uint32_t exp = (h >> 10) & 0x1Fu;
    const std::uint32_t mant = h & 0x3FFu;

    std::uint32_t bits;
    if (exp == 0) {
        if (mant == 0) {
            bits = sign;
        } else {
            // Normalize the subnormal.
            int e = -1;
            std::uint32_t m = mant;
            do {
                ++e;
                m <<= 1;
            } while ((m & 0x400u) == 0);
            bits = sign | (static_cast<std::uint32_t>(127 - 15 - e) << 23) |
                   ((m & 0x3FFu) << 13);
        }
    } else if (exp == 0x1Fu) {
        bits = sign | 0x7F800000u | (mant << 13);
    } else {
        bits = sign | ((exp - 15 + 127) << 23) | (mant << 13);
    }
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

// Rounds to nearest integer, ties to even.  Independent of the FPU rounding
// mode, unlike std::nearbyint.
inline double round_ties_even(double x) {
    const double f = std::floor(x);
    const double diff = x - f;
    if (diff > 0.5) return f + 1.0;
    if (diff < 0.5) return f;
    return (std::fmod(f, 2.0) == 0.0) ? f : f + 1.0;
}

}  // namespace palmid
