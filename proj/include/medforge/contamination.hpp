#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "medforge/corpus.hpp"
#include "medforge/filters.hpp"

namespace medforge::contamination {

struct BenchmarkIndex {
    std::set<std::uint64_t> image_hashes;
    std::set<std::uint64_t> text_keys;  // fnv1a64 of normalized texts
    std::vector<std::string> benchmark_names;

    bool operator==(const BenchmarkIndex&) const = default;
};

struct IndexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Key used for text-overlap matching: 64-bit hash of the normalized text.
std::uint64_t text_key(const std::string& s);

// Text a sample contributes to the index / contamination check: the question
// for QA samples, the full answer text for text-only samples.
std::string contamination_text(const corpus::Sample& s);

BenchmarkIndex build_index(const std::vector<corpus::DatasetManifest>& benchmarks);

// Removes every sample sharing an image phash or a normalized-text key with
// the index; removals attributed to rule "contamination".
std::pair<corpus::DatasetManifest, filters::FilterReport> scrub(const corpus::DatasetManifest& m,
                                                                const BenchmarkIndex& idx);

// Binary serialization with magic header "MFIX1"; deterministic (sets sorted).
void save_index(const BenchmarkIndex& idx, const std::string& path);
BenchmarkIndex load_index(const std::string& path);

}  // namespace medforge::contamination
