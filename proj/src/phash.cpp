#include "medforge/phash.hpp"

#include <bit>

namespace medforge::dedup {

std::uint64_t compute_phash(const img::Image& image) {
    img::Image small = img::resize_bilinear(img::to_gray(image), 9, 8);
    std::uint64_t bits = 0;
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            bits <<= 1;
            if (small.at(x + 1, y) > small.at(x, y)) bits |= 1;
        }
    }
    return bits;
}

std::uint64_t compute_phash(std::string_view image_bytes) {
    return compute_phash(img::decode_pnm(image_bytes));
}

int hamming(std::uint64_t a, std::uint64_t b) { return std::popcount(a ^ b); }

}  // namespace medforge::dedup
