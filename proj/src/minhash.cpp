#include "medforge/minhash.hpp"

#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "medforge/rng.hpp"
#include "medforge/text.hpp"

namespace medforge::dedup {

MinHashSignature minhash_signature(std::string_view text_in, std::size_t k, std::size_t w,
                                   std::uint64_t seed) {
    if (k < 1 || w < 1) throw std::invalid_argument("minhash requires k >= 1 and w >= 1");
    std::vector<std::string> shingles = text::word_shingles(text_in, w);

    // Per-permutation xor keys from a fixed splitmix64 stream; signatures are
    // reproducible for a given (k, w, seed).
    Rng rng(seed);
    std::vector<std::uint64_t> keys(k);
    for (std::uint64_t& key : keys) key = rng.next();

    MinHashSignature sig;
    sig.shingle_w = w;
    sig.mins.assign(k, std::numeric_limits<std::uint64_t>::max());
    for (const std::string& sh : shingles) {
        std::uint64_t base = text::fnv1a64(sh);
        for (std::size_t i = 0; i < k; ++i) {
            std::uint64_t h = mix64(base ^ keys[i]);
            if (h < sig.mins[i]) sig.mins[i] = h;
        }
    }
    return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.mins.size() != b.mins.size() || a.mins.empty()) {
        throw std::invalid_argument("signatures must share a non-zero length");
    }
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.mins.size(); ++i) {
        if (a.mins[i] == b.mins[i]) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(a.mins.size());
}

double exact_jaccard(std::string_view a, std::string_view b, std::size_t w) {
    std::vector<std::string> sa = text::word_shingles(a, w);
    std::vector<std::string> sb = text::word_shingles(b, w);
    std::unordered_set<std::string> set_a(sa.begin(), sa.end());
    std::unordered_set<std::string> set_b(sb.begin(), sb.end());
    std::size_t inter = 0;
    for (const std::string& s : set_a) inter += set_b.count(s);
    std::size_t uni = set_a.size() + set_b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace medforge::dedup
