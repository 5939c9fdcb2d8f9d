#include "doctest.h"

#include "helpers.hpp"
#include "medforge/image.hpp"
#include "medforge/phash.hpp"
#include "medforge/rng.hpp"

using namespace medforge;

TEST_CASE("pnm round trip for gray and rgb") {
    img::Image gray = img::make_image(5, 3, 1);
    for (std::size_t i = 0; i < gray.data.size(); ++i)
        gray.data[i] = static_cast<std::uint8_t>(i * 7);
    auto decoded = img::decode_pnm(img::encode_pnm(gray));
    CHECK(decoded.width == 5);
    CHECK(decoded.height == 3);
    CHECK(decoded.channels == 1);
    CHECK(decoded.data == gray.data);

    img::Image rgb = img::make_image(2, 2, 3);
    for (std::size_t i = 0; i < rgb.data.size(); ++i)
        rgb.data[i] = static_cast<std::uint8_t>(i * 11);
    auto decoded_rgb = img::decode_pnm(img::encode_pnm(rgb));
    CHECK(decoded_rgb.channels == 3);
    CHECK(decoded_rgb.data == rgb.data);
}

TEST_CASE("pnm decode rejects junk") {
    CHECK_THROWS_AS(img::decode_pnm("not an image"), img::ImageDecodeError);
    CHECK_THROWS_AS(img::decode_pnm("P5\n2 2\n255\nab"), img::ImageDecodeError);  // short
    CHECK_THROWS_AS(img::decode_pnm(""), img::ImageDecodeError);
}

TEST_CASE("to_gray uses integer luma") {
    img::Image rgb = img::make_image(1, 1, 3);
    rgb.data = {200, 100, 50};  // (299*200 + 587*100 + 114*50) / 1000 = 124
    auto g = img::to_gray(rgb);
    CHECK(g.channels == 1);
    CHECK(g.data[0] == 124);
    // Gray input is already gray.
    img::Image gray = img::make_image(2, 1, 1, 7);
    CHECK(img::to_gray(gray).data == gray.data);
}

TEST_CASE("resize is identity at equal size and interpolates corners") {
    img::Image im = img::make_image(4, 4, 1);
    for (std::size_t i = 0; i < im.data.size(); ++i)
        im.data[i] = static_cast<std::uint8_t>(i * 3);
    auto same = img::resize_bilinear(im, 4, 4);
    CHECK(same.data == im.data);
    // Align-corners keeps the extreme pixels.
    auto small = img::resize_bilinear(im, 2, 2);
    CHECK(small.at(0, 0) == im.at(0, 0));
    CHECK(small.at(1, 1) == im.at(3, 3));
}

TEST_CASE("phash of a constant image is zero") {
    CHECK(dedup::compute_phash(testutil::make_pnm(9, 8, 0)) == 0);
    CHECK(dedup::compute_phash(testutil::make_pnm(64, 64, 200)) == 0);
}

TEST_CASE("phash of a strict horizontal ramp sets all 64 bits") {
    // 9x8 input needs no resampling; each right neighbor is strictly brighter.
    auto ramp = testutil::make_pnm(9, 8, [](int x, int) { return x * 28; });
    CHECK(dedup::compute_phash(ramp) == 0xFFFFFFFFFFFFFFFFULL);
}

TEST_CASE("byte-identical images hash identically") {
    auto a = testutil::make_pnm(33, 47, [](int x, int y) { return x * y + 3; });
    std::string b = a;
    CHECK(dedup::compute_phash(a) == dedup::compute_phash(b));
}

TEST_CASE("hamming basics and metric properties") {
    CHECK(dedup::hamming(0x42, 0x42) == 0);
    CHECK(dedup::hamming(0x0, 0x1) == 1);
    CHECK(dedup::hamming(0x0, ~0ULL) == 64);

    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        std::uint64_t a = rng.next(), b = rng.next(), c = rng.next();
        CHECK(dedup::hamming(a, b) == dedup::hamming(b, a));
        CHECK(dedup::hamming(a, a) == 0);
        CHECK(dedup::hamming(a, c) <= dedup::hamming(a, b) + dedup::hamming(b, c));
    }
}
