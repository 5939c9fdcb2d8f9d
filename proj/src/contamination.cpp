#include "medforge/contamination.hpp"

#include <fstream>

#include "medforge/text.hpp"

namespace medforge::contamination {

namespace {

constexpr char kMagic[5] = {'M', 'F', 'I', 'X', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, 8);
}

std::uint64_t read_u64(std::ifstream& in) {
    char buf[8];
    in.read(buf, 8);
    if (!in) throw IndexError("truncated index file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
}

}  // namespace

std::uint64_t text_key(const std::string& s) { return text::fnv1a64(text::normalize(s)); }

std::string contamination_text(const corpus::Sample& s) {
    if (s.question) return *s.question;
    return s.answer.value_or("");
}

BenchmarkIndex build_index(const std::vector<corpus::DatasetManifest>& benchmarks) {
    BenchmarkIndex idx;
    for (const corpus::DatasetManifest& bm : benchmarks) {
        idx.benchmark_names.push_back(bm.name);
        for (const corpus::Sample& s : bm.samples) {
            for (const corpus::ImageRef& im : s.images) {
                if (!im.phash) throw IndexError("benchmark sample " + s.id + " lacks an image phash");
                idx.image_hashes.insert(*im.phash);
            }
            std::string t = contamination_text(s);
            if (!t.empty()) idx.text_keys.insert(text_key(t));
        }
    }
    return idx;
}

std::pair<corpus::DatasetManifest, filters::FilterReport> scrub(const corpus::DatasetManifest& m,
                                                                const BenchmarkIndex& idx) {
    corpus::DatasetManifest out;
    out.name = m.name;
    out.schema_version = m.schema_version;
    filters::FilterReport report;
    report.input_count = m.samples.size();
    for (const corpus::Sample& s : m.samples) {
        bool hit = false;
        for (const corpus::ImageRef& im : s.images) {
            if (im.phash && idx.image_hashes.count(*im.phash)) {
                hit = true;
                break;
            }
        }
        if (!hit) {
            std::string t = contamination_text(s);
            hit = !t.empty() && idx.text_keys.count(text_key(t)) > 0;
        }
        if (hit) {
            report.removals.emplace_back(s.id, "contamination");
        } else {
            out.samples.push_back(s);
        }
    }
    report.kept_count = out.samples.size();
    report.removed_count = report.removals.size();
    return {std::move(out), std::move(report)};
}

void save_index(const BenchmarkIndex& idx, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IndexError("cannot write index: " + path);
    out.write(kMagic, sizeof kMagic);
    write_u64(out, idx.image_hashes.size());
    for (std::uint64_t h : idx.image_hashes) write_u64(out, h);
    write_u64(out, idx.text_keys.size());
    for (std::uint64_t h : idx.text_keys) write_u64(out, h);
    write_u64(out, idx.benchmark_names.size());
    for (const std::string& name : idx.benchmark_names) {
        write_u64(out, name.size());
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    if (!out) throw IndexError("I/O error writing index: " + path);
}

BenchmarkIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IndexError("cannot open index: " + path);
    char magic[5];
    in.read(magic, sizeof magic);
    if (!in || std::string_view(magic, 5) != std::string_view(kMagic, 5)) {
        throw IndexError("bad magic header in " + path);
    }
    BenchmarkIndex idx;
    for (std::uint64_t i = 0, n = read_u64(in); i < n; ++i) idx.image_hashes.insert(read_u64(in));
    for (std::uint64_t i = 0, n = read_u64(in); i < n; ++i) idx.text_keys.insert(read_u64(in));
    for (std::uint64_t i = 0, n = read_u64(in); i < n; ++i) {
        std::string name(read_u64(in), '\0');
        in.read(name.data(), static_cast<std::streamsize>(name.size()));
        if (!in) throw IndexError("truncated index file");
        idx.benchmark_names.push_back(std::move(name));
    }
    return idx;
}

}  // namespace medforge::contamination
