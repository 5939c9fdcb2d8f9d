#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medforge/corpus.hpp"
#include "medforge/minhash.hpp"

namespace medforge::dedup {

enum class Scope { within_dataset, cross_dataset };

struct DuplicateClass {
    std::vector<std::string> members;  // sorted sample ids, size >= 2
    std::string retained;              // max source_priority, ties by lexicographic id
};

struct DedupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text a sample contributes to near-duplicate detection: question + answer.
std::string sample_text(const corpus::Sample& s);

// Exact-duplicate image grouping at Hamming distance 0. A sample's key is the
// sorted tuple of its image phashes; samples without images never group.
// chunk_size bounds batch memory and never changes the result.
std::pair<corpus::DatasetManifest, std::vector<DuplicateClass>> dedup_images(
    const corpus::DatasetManifest& m, Scope scope, std::size_t chunk_size = 1000);

struct TextDedupParams {
    double threshold = 0.8;
    std::size_t bands = 16;
    std::size_t rows = 8;
    std::size_t shingle_w = kDefaultShingleWidth;
    std::uint64_t seed = kDefaultMinhashSeed;
};

// MinHash-LSH near-duplicate removal across manifests. Candidate pairs come
// from band collisions; pairs with estimated Jaccard >= threshold are merged
// by union-find; one member retained per class.
std::pair<std::vector<corpus::DatasetManifest>, std::vector<DuplicateClass>> dedup_texts(
    const std::vector<corpus::DatasetManifest>& manifests, const TextDedupParams& params = {});

// Line-delimited report: class_id <TAB> retained_id <TAB> member,member,...
void write_class_report(const std::vector<DuplicateClass>& classes, const std::string& path);

}  // namespace medforge::dedup
