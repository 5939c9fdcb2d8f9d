#include "medforge/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef MEDFORGE_DEFAULT_ASSET_DIR
#define MEDFORGE_DEFAULT_ASSET_DIR "assets"
#endif

namespace medforge::prompts {

std::string default_asset_root() {
    if (const char* env = std::getenv("MEDFORGE_ASSETS")) return env;
    return MEDFORGE_DEFAULT_ASSET_DIR;
}

std::string load_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open asset file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string render(const std::string& tpl, const std::map<std::string, std::string>& subs) {
    std::string out = tpl;
    for (const auto& [key, value] : subs) {
        const std::string needle = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return out;
}

Prompts::Prompts(std::string asset_root) : root_(std::move(asset_root)) {}

std::string Prompts::get(const std::string& rel_path) const {
    return load_text_file(root_ + "/" + rel_path);
}

}  // namespace medforge::prompts
