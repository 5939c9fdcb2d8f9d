#include "medforge/rng.hpp"

#include <algorithm>

namespace medforge {

std::vector<std::size_t> Rng::sample_indices(std::size_t n, std::size_t k) {
    if (k >= n) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    // Floyd's algorithm: k draws, no full permutation.
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        std::size_t t = static_cast<std::size_t>(next_below(j + 1));
        if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
            picked.push_back(t);
        } else {
            picked.push_back(j);
        }
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

}  // namespace medforge
