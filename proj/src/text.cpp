#include "medforge/text.hpp"

#include <cctype>

namespace medforge::text {

namespace {

bool is_ws(char32_t c) {
    if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v') return true;
    if (c == 0x00A0 || c == 0x3000 || c == 0x2028 || c == 0x2029) return true;
    return c >= 0x2000 && c <= 0x200A;
}

bool is_word(char32_t c) {
    if (c < 0x80) return std::isalnum(static_cast<unsigned char>(c)) != 0;
    // Non-ASCII: everything except the common punctuation blocks counts as a word char.
    if (c >= 0x00A1 && c <= 0x00BF) return false;
    if (c >= 0x2010 && c <= 0x205E) return false;
    if (c >= 0x3001 && c <= 0x303F) return false;
    return !is_ws(c);
}

void encode_utf8(char32_t c, std::string& out) {
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
}

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> cps;
    cps.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b = static_cast<unsigned char>(s[i]);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (b < 0x80) {
            cp = b;
        } else if ((b >> 5) == 0x6 && i + 1 < s.size()) {
            cp = static_cast<char32_t>((b & 0x1F) << 6 | (s[i + 1] & 0x3F));
            len = 2;
        } else if ((b >> 4) == 0xE && i + 2 < s.size()) {
            cp = static_cast<char32_t>((b & 0x0F) << 12 | (s[i + 1] & 0x3F) << 6 | (s[i + 2] & 0x3F));
            len = 3;
        } else if ((b >> 3) == 0x1E && i + 3 < s.size()) {
            cp = static_cast<char32_t>((b & 0x07) << 18 | (s[i + 1] & 0x3F) << 12 |
                                       (s[i + 2] & 0x3F) << 6 | (s[i + 3] & 0x3F));
            len = 4;
        }
        cps.push_back(cp);
        i += len;
    }
    return cps;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string run;
    for (char32_t c : decode_utf8(s)) {
        if (is_word(c)) {
            encode_utf8(c, run);
            continue;
        }
        if (!run.empty()) {
            tokens.push_back(run);
            run.clear();
        }
        if (!is_ws(c)) {
            std::string p;
            encode_utf8(c, p);
            tokens.push_back(p);
        }
    }
    if (!run.empty()) tokens.push_back(run);
    return tokens;
}

std::size_t count_tokens(std::string_view s) { return tokenize(s).size(); }

std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char32_t c : decode_utf8(s)) {
        if (is_ws(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (!is_word(c)) continue;  // punctuation dropped
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        if (c < 0x80) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            encode_utf8(c, out);
        }
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> word_shingles(std::string_view s, std::size_t w) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                words.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) words.push_back(cur);

    std::vector<std::string> shingles;
    if (words.size() < w) {
        std::string whole;
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (i) whole.push_back(' ');
            whole += words[i];
        }
        shingles.push_back(whole);
        return shingles;
    }
    for (std::size_t i = 0; i + w <= words.size(); ++i) {
        std::string sh;
        for (std::size_t j = 0; j < w; ++j) {
            if (j) sh.push_back(' ');
            sh += words[i + j];
        }
        shingles.push_back(sh);
    }
    return shingles;
}

}  // namespace medforge::text
