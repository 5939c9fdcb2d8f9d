#pragma once

#include <cstdint>
#include <string_view>

#include "medforge/image.hpp"

namespace medforge::dedup {

// 64-bit difference hash: integer luma, bilinear resize to 9x8, bit j set iff
// pixel(x+1, y) > pixel(x, y), row-major packing (bit 63 first).
std::uint64_t compute_phash(std::string_view image_bytes);
std::uint64_t compute_phash(const img::Image& image);

int hamming(std::uint64_t a, std::uint64_t b);

}  // namespace medforge::dedup
