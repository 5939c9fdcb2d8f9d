#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace medforge::dedup {

constexpr std::uint64_t kDefaultMinhashSeed = 0x5EED;
constexpr std::size_t kDefaultSignatureSize = 128;  // 16 bands x 8 rows
constexpr std::size_t kDefaultShingleWidth = 5;

struct MinHashSignature {
    std::vector<std::uint64_t> mins;
    std::size_t shingle_w = kDefaultShingleWidth;
};

// Signature over w-word shingles; k permutations derived from the seed.
MinHashSignature minhash_signature(std::string_view text, std::size_t k = kDefaultSignatureSize,
                                   std::size_t w = kDefaultShingleWidth,
                                   std::uint64_t seed = kDefaultMinhashSeed);

// Fraction of agreeing permutation minima.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

// Exact shingle-set Jaccard; the brute-force reference for tests and oracles.
double exact_jaccard(std::string_view a, std::string_view b, std::size_t w = kDefaultShingleWidth);

}  // namespace medforge::dedup
