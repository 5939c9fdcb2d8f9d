#include "medforge/image.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace medforge::img {

namespace {

// Reads the next PNM header token, skipping whitespace and '#' comments.
std::string next_token(std::string_view s, std::size_t& pos) {
    while (pos < s.size()) {
        char c = s[pos];
        if (c == '#') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    std::size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return std::string(s.substr(start, pos - start));
}

}  // namespace

Image make_image(int width, int height, int channels, std::uint8_t fill) {
    Image im;
    im.width = width;
    im.height = height;
    im.channels = channels;
    im.data.assign(static_cast<std::size_t>(width) * height * channels, fill);
    return im;
}

Image decode_pnm(std::string_view bytes) {
    std::size_t pos = 0;
    std::string magic = next_token(bytes, pos);
    int channels;
    if (magic == "P5") {
        channels = 1;
    } else if (magic == "P6") {
        channels = 3;
    } else {
        throw ImageDecodeError("not a binary PNM image (expected P5 or P6)");
    }
    int w, h, maxval;
    try {
        w = std::stoi(next_token(bytes, pos));
        h = std::stoi(next_token(bytes, pos));
        maxval = std::stoi(next_token(bytes, pos));
    } catch (const std::exception&) {
        throw ImageDecodeError("malformed PNM header");
    }
    if (w <= 0 || h <= 0 || maxval != 255) throw ImageDecodeError("unsupported PNM dimensions or maxval");
    ++pos;  // single whitespace after maxval
    std::size_t need = static_cast<std::size_t>(w) * h * channels;
    if (bytes.size() - pos < need) throw ImageDecodeError("truncated PNM pixel data");
    Image im = make_image(w, h, channels);
    for (std::size_t i = 0; i < need; ++i) im.data[i] = static_cast<std::uint8_t>(bytes[pos + i]);
    return im;
}

std::string encode_pnm(const Image& image) {
    std::ostringstream out;
    out << (image.channels == 3 ? "P6" : "P5") << "\n"
        << image.width << " " << image.height << "\n255\n";
    std::string s = out.str();
    s.append(reinterpret_cast<const char*>(image.data.data()), image.data.size());
    return s;
}

Image read_image_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageDecodeError("cannot open image file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_pnm(ss.str());
}

void write_image_file(const Image& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image file: " + path);
    std::string bytes = encode_pnm(image);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Image to_gray(const Image& image) {
    if (image.channels == 1) return image;
    Image g = make_image(image.width, image.height, 1);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            int v = 299 * image.at(x, y, 0) + 587 * image.at(x, y, 1) + 114 * image.at(x, y, 2);
            g.at(x, y) = static_cast<std::uint8_t>(v / 1000);
        }
    }
    return g;
}

Image resize_bilinear(const Image& gray, int out_w, int out_h) {
    Image out = make_image(out_w, out_h, 1);
    const double sx = out_w > 1 ? static_cast<double>(gray.width - 1) / (out_w - 1) : 0.0;
    const double sy = out_h > 1 ? static_cast<double>(gray.height - 1) / (out_h - 1) : 0.0;
    for (int y = 0; y < out_h; ++y) {
        double fy = y * sy;
        int y0 = static_cast<int>(fy);
        int y1 = y0 + 1 < gray.height ? y0 + 1 : y0;
        double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = x * sx;
            int x0 = static_cast<int>(fx);
            int x1 = x0 + 1 < gray.width ? x0 + 1 : x0;
            double wx = fx - x0;
            double v = (1 - wy) * ((1 - wx) * gray.at(x0, y0) + wx * gray.at(x1, y0)) +
                       wy * ((1 - wx) * gray.at(x0, y1) + wx * gray.at(x1, y1));
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(v));
        }
    }
    return out;
}

}  // namespace medforge::img
