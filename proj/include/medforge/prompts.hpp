#pragma once

#include <map>
#include <string>

namespace medforge::prompts {

// Asset root resolution order: explicit argument, MEDFORGE_ASSETS env var,
// compile-time default (the source tree's assets/ directory).
std::string default_asset_root();

std::string load_text_file(const std::string& path);

// Replaces each "{key}" with its value; unknown placeholders are left intact.
std::string render(const std::string& tpl, const std::map<std::string, std::string>& subs);

class Prompts {
public:
    explicit Prompts(std::string asset_root = default_asset_root());

    // Relative to the asset root, e.g. "prompts/llm_judge.txt".
    std::string get(const std::string& rel_path) const;

    const std::string& root() const { return root_; }

private:
    std::string root_;
};

}  // namespace medforge::prompts
