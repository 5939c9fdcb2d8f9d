#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace medforge::img {

struct ImageDecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 8-bit raster, 1 (gray) or 3 (RGB) channels, row-major.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> data;

    std::uint8_t& at(int x, int y, int c = 0) {
        return data[static_cast<std::size_t>((y * width + x) * channels + c)];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data[static_cast<std::size_t>((y * width + x) * channels + c)];
    }
};

Image make_image(int width, int height, int channels, std::uint8_t fill = 0);

// Binary PNM only: P5 (gray) and P6 (RGB), maxval 255.
Image decode_pnm(std::string_view bytes);
std::string encode_pnm(const Image& image);

Image read_image_file(const std::string& path);
void write_image_file(const Image& image, const std::string& path);

// Integer luma (299 R + 587 G + 114 B) / 1000.
Image to_gray(const Image& image);

// Align-corners bilinear resample; identity when sizes match.
Image resize_bilinear(const Image& gray, int out_w, int out_h);

}  // namespace medforge::img
