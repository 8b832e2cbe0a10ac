#pragma once

#include <cctype>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "palmid/errors.hpp"

namespace palmid {

inline constexpr int kRoiSize = 224;

/// Row-major interleaved pixel grid, values in [0,1], 1 or 3 channels.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> px;

    Image() = default;
    Image(int w, int h, int c = 1, float fill = 0.0f)
        : width(w), height(h), channels(c),
          px(static_cast<std::size_t>(w) * h * c, fill) {}

    float& at(int x, int y, int c = 0) {
        return px[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c = 0) const {
        return px[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool is_roi() const { return width == kRoiSize && height == kRoiSize; }

    bool operator==(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels && px == o.px;
    }
};

/// Bilinear sample with zero outside the image.
inline float sample_bilinear(const Image& img, double x, double y, int c = 0) {
    if (x < -1.0 || y < -1.0 || x > img.width || y > img.height) return 0.0f;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto pix = [&](int xi, int yi) -> double {
        if (xi < 0 || yi < 0 || xi >= img.width || yi >= img.height) return 0.0;
        return img.at(xi, yi, c);
    };
    const double v = (1 - fx) * (1 - fy) * pix(x0, y0) + fx * (1 - fy) * pix(x0 + 1, y0) +
                     (1 - fx) * fy * pix(x0, y0 + 1) + fx * fy * pix(x0 + 1, y0 + 1);
    return static_cast<float>(v);
}

// --- PGM (P5) / PPM (P6) binary I/O, maxval 255, pixels mapped to [0,1] ---

namespace detail {
inline int read_pnm_int(std::istream& in) {
    int c = in.get();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            while (c != '\n' && c != EOF) c = in.get();
        }
        c = in.get();
    }
    int v = 0;
    bool any = false;
    while (std::isdigit(c)) {
        v = v * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw BadImage("malformed PNM header");
    return v;
}
}  // namespace detail

inline Image read_pnm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw BadImage("cannot open image: " + path);
    char m0 = static_cast<char>(f.get());
    char m1 = static_cast<char>(f.get());
    int channels;
    if (m0 == 'P' && m1 == '5') channels = 1;
    else if (m0 == 'P' && m1 == '6') channels = 3;
    else throw BadImage("not a binary PGM/PPM file: " + path);
    const int w = detail::read_pnm_int(f);
    const int h = detail::read_pnm_int(f);
    const int maxval = detail::read_pnm_int(f);
    if (maxval != 255) throw BadImage("only maxval 255 supported");
    Image img(w, h, channels);
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h * channels);
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(f.gcount()) != raw.size())
        throw BadImage("truncated image data: " + path);
    for (std::size_t i = 0; i < raw.size(); ++i) img.px[i] = raw[i] / 255.0f;
    return img;
}

inline void write_pnm(const Image& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw BadImage("cannot open image for writing: " + path);
    f << (img.channels == 3 ? "P6" : "P5") << "\n"
      << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> raw(img.px.size());
    for (std::size_t i = 0; i < img.px.size(); ++i) {
        const float v = std::clamp(img.px[i], 0.0f, 1.0f);
        raw[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    f.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

/// 3-channel view of a grayscale image (or a copy if already 3-channel).
inline Image to_rgb(const Image& img) {
    if (img.channels == 3) return img;
    Image out(img.width, img.height, 3);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y);
    return out;
}

inline Image to_gray(const Image& img) {
    if (img.channels == 1) return img;
    Image out(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y) = (img.at(x, y, 0) + img.at(x, y, 1) + img.at(x, y, 2)) / 3.0f;
    return out;
}

}  // namespace palmid
