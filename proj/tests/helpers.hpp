#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "medforge/corpus.hpp"
#include "medforge/image.hpp"

namespace testutil {

inline std::string source_dir() { return MEDFORGE_SOURCE_DIR; }

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("medforge_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Grayscale PNM with per-pixel values from fn(x, y).
inline std::string make_pnm(int w, int h,
                            const std::function<int(int, int)>& fn) {
    medforge::img::Image im = medforge::img::make_image(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            im.at(x, y) = static_cast<std::uint8_t>(fn(x, y) & 0xFF);
    return medforge::img::encode_pnm(im);
}

inline std::string make_pnm(int w, int h, int fill) {
    return make_pnm(w, h, [fill](int, int) { return fill; });
}

inline medforge::corpus::Sample make_caption(const std::string& id, const std::string& text,
                                             int w = 128, int h = 128, int priority = 0) {
    medforge::corpus::Sample s;
    s.id = id;
    s.source_dataset = "test";
    s.source_priority = priority;
    s.task_kind = medforge::corpus::TaskKind::caption;
    s.images.push_back(medforge::corpus::ImageRef{id + ".pnm", w, h, std::nullopt});
    s.answer = text;
    return s;
}

inline medforge::corpus::Sample make_mcq(const std::string& id, const std::string& question,
                                         const std::vector<std::string>& options,
                                         const std::string& answer) {
    medforge::corpus::Sample s;
    s.id = id;
    s.source_dataset = "test";
    s.task_kind = medforge::corpus::TaskKind::vqa_mcq;
    s.question = question;
    s.options = options;
    s.answer = answer;
    return s;
}

inline medforge::corpus::Sample make_open(const std::string& id, const std::string& question,
                                          const std::string& answer) {
    medforge::corpus::Sample s;
    s.id = id;
    s.source_dataset = "test";
    s.task_kind = medforge::corpus::TaskKind::vqa_open;
    s.question = question;
    s.answer = answer;
    return s;
}

}  // namespace testutil
