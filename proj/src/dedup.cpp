#include "medforge/dedup.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>

#include "medforge/rng.hpp"
#include "medforge/text.hpp"

namespace medforge::dedup {

namespace {

// (priority, id) ordering used for the retained member: higher priority wins,
// ties broken by lexicographically smaller id.
bool better_retained(int pa, const std::string& ia, int pb, const std::string& ib) {
    if (pa != pb) return pa > pb;
    return ia < ib;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

std::vector<DuplicateClass> classes_from_groups(
    const std::vector<corpus::Sample>& samples,
    const std::unordered_map<std::size_t, std::vector<std::size_t>>& groups) {
    std::vector<DuplicateClass> classes;
    for (const auto& [root, indices] : groups) {
        if (indices.size() < 2) continue;
        DuplicateClass dc;
        std::size_t best = indices[0];
        for (std::size_t i : indices) {
            dc.members.push_back(samples[i].id);
            if (better_retained(samples[i].source_priority, samples[i].id,
                                samples[best].source_priority, samples[best].id)) {
                best = i;
            }
        }
        std::sort(dc.members.begin(), dc.members.end());
        dc.retained = samples[best].id;
        classes.push_back(std::move(dc));
    }
    std::sort(classes.begin(), classes.end(),
              [](const DuplicateClass& a, const DuplicateClass& b) { return a.members < b.members; });
    return classes;
}

}  // namespace

std::string sample_text(const corpus::Sample& s) {
    std::string t;
    if (s.question) t = *s.question;
    if (s.answer) {
        if (!t.empty()) t.push_back(' ');
        t += *s.answer;
    }
    return t;
}

std::pair<corpus::DatasetManifest, std::vector<DuplicateClass>> dedup_images(
    const corpus::DatasetManifest& m, Scope scope, std::size_t chunk_size) {
    if (chunk_size == 0) chunk_size = 1;

    // Key: combined hash of the sample's sorted image phashes (plus the dataset
    // under within_dataset scope). Exact hash equality only (threshold 0).
    auto key_of = [&](const corpus::Sample& s) -> std::uint64_t {
        std::vector<std::uint64_t> hs;
        for (const corpus::ImageRef& im : s.images) {
            if (!im.phash) throw DedupError("sample " + s.id + " has an image without a phash");
            hs.push_back(*im.phash);
        }
        std::sort(hs.begin(), hs.end());
        std::uint64_t k = 0x9E3779B97F4A7C15ULL;
        for (std::uint64_t h : hs) k = mix64(k ^ h);
        if (scope == Scope::within_dataset) k = mix64(k ^ text::fnv1a64(s.source_dataset));
        return k;
    };

    // Sharded (chunk-at-a-time) construction of key -> sample indices.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t begin = 0; begin < m.samples.size(); begin += chunk_size) {
        std::size_t end = std::min(begin + chunk_size, m.samples.size());
        for (std::size_t i = begin; i < end; ++i) {
            if (m.samples[i].images.empty()) continue;
            buckets[key_of(m.samples[i])].push_back(i);
        }
    }

    std::unordered_map<std::size_t, std::vector<std::size_t>> groups;
    std::vector<bool> drop(m.samples.size(), false);
    for (auto& [key, indices] : buckets) {
        if (indices.size() < 2) continue;
        groups.emplace(indices[0], indices);
        std::size_t best = indices[0];
        for (std::size_t i : indices) {
            if (better_retained(m.samples[i].source_priority, m.samples[i].id,
                                m.samples[best].source_priority, m.samples[best].id)) {
                best = i;
            }
        }
        for (std::size_t i : indices) {
            if (i != best) drop[i] = true;
        }
    }

    corpus::DatasetManifest out;
    out.name = m.name;
    out.schema_version = m.schema_version;
    for (std::size_t i = 0; i < m.samples.size(); ++i) {
        if (!drop[i]) out.samples.push_back(m.samples[i]);
    }
    return {std::move(out), classes_from_groups(m.samples, groups)};
}

std::pair<std::vector<corpus::DatasetManifest>, std::vector<DuplicateClass>> dedup_texts(
    const std::vector<corpus::DatasetManifest>& manifests, const TextDedupParams& params) {
    const std::size_t k = params.bands * params.rows;
    if (params.bands == 0 || params.rows == 0) {
        throw DedupError("bands and rows must be positive");
    }

    // Flatten for global indexing.
    std::vector<corpus::Sample> samples;
    std::vector<std::pair<std::size_t, std::size_t>> origin;  // (manifest idx, sample idx)
    for (std::size_t mi = 0; mi < manifests.size(); ++mi) {
        for (std::size_t si = 0; si < manifests[mi].samples.size(); ++si) {
            samples.push_back(manifests[mi].samples[si]);
            origin.emplace_back(mi, si);
        }
    }

    std::vector<MinHashSignature> sigs;
    sigs.reserve(samples.size());
    for (const corpus::Sample& s : samples) {
        sigs.push_back(minhash_signature(sample_text(s), k, params.shingle_w, params.seed));
    }

    // LSH banding: same band hash => candidate pair; verify with the estimate.
    UnionFind uf(samples.size());
    for (std::size_t band = 0; band < params.bands; ++band) {
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            std::uint64_t key = mix64(band + 1);
            for (std::size_t r = 0; r < params.rows; ++r) {
                key = mix64(key ^ sigs[i].mins[band * params.rows + r]);
            }
            buckets[key].push_back(i);
        }
        for (const auto& [key, members] : buckets) {
            for (std::size_t a = 0; a + 1 < members.size(); ++a) {
                for (std::size_t b = a + 1; b < members.size(); ++b) {
                    if (estimate_jaccard(sigs[members[a]], sigs[members[b]]) >= params.threshold) {
                        uf.unite(members[a], members[b]);
                    }
                }
            }
        }
    }

    std::unordered_map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < samples.size(); ++i) groups[uf.find(i)].push_back(i);

    std::vector<bool> drop(samples.size(), false);
    for (const auto& [root, indices] : groups) {
        if (indices.size() < 2) continue;
        std::size_t best = indices[0];
        for (std::size_t i : indices) {
            if (better_retained(samples[i].source_priority, samples[i].id,
                                samples[best].source_priority, samples[best].id)) {
                best = i;
            }
        }
        for (std::size_t i : indices) {
            if (i != best) drop[i] = true;
        }
    }

    std::vector<corpus::DatasetManifest> out(manifests.size());
    for (std::size_t mi = 0; mi < manifests.size(); ++mi) {
        out[mi].name = manifests[mi].name;
        out[mi].schema_version = manifests[mi].schema_version;
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!drop[i]) out[origin[i].first].samples.push_back(samples[i]);
    }

    // Prune size-1 groups before emitting classes.
    for (auto it = groups.begin(); it != groups.end();) {
        it = it->second.size() < 2 ? groups.erase(it) : std::next(it);
    }
    return {std::move(out), classes_from_groups(samples, groups)};
}

void write_class_report(const std::vector<DuplicateClass>& classes, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DedupError("cannot write class report: " + path);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        out << i << '\t' << classes[i].retained << '\t';
        for (std::size_t j = 0; j < classes[i].members.size(); ++j) {
            if (j) out << ',';
            out << classes[i].members[j];
        }
        out << '\n';
    }
}

}  // namespace medforge::dedup
