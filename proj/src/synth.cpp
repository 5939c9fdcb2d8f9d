#include "medforge/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "medforge/rng.hpp"
#include "medforge/text.hpp"

namespace medforge::synth {

namespace {

using nlohmann::json;

// Classic 5x7 column-encoded font, ASCII 32..126. Bit 0 of each column byte is
// the glyph's top row.
constexpr std::uint8_t kFont5x7[95][5] = {
    {0x00, 0x00, 0x00, 0x00, 0x00},  // ' '
    {0x00, 0x00, 0x5F, 0x00, 0x00},  // !
    {0x00, 0x07, 0x00, 0x07, 0x00},  // "
    {0x14, 0x7F, 0x14, 0x7F, 0x14},  // #
    {0x24, 0x2A, 0x7F, 0x2A, 0x12},  // $
    {0x23, 0x13, 0x08, 0x64, 0x62},  // %
    {0x36, 0x49, 0x55, 0x22, 0x50},  // &
    {0x00, 0x05, 0x03, 0x00, 0x00},  // '
    {0x00, 0x1C, 0x22, 0x41, 0x00},  // (
    {0x00, 0x41, 0x22, 0x1C, 0x00},  // )
    {0x14, 0x08, 0x3E, 0x08, 0x14},  // *
    {0x08, 0x08, 0x3E, 0x08, 0x08},  // +
    {0x00, 0x50, 0x30, 0x00, 0x00},  // ,
    {0x08, 0x08, 0x08, 0x08, 0x08},  // -
    {0x00, 0x60, 0x60, 0x00, 0x00},  // .
    {0x20, 0x10, 0x08, 0x04, 0x02},  // /
    {0x3E, 0x51, 0x49, 0x45, 0x3E},  // 0
    {0x00, 0x42, 0x7F, 0x40, 0x00},  // 1
    {0x42, 0x61, 0x51, 0x49, 0x46},  // 2
    {0x21, 0x41, 0x45, 0x4B, 0x31},  // 3
    {0x18, 0x14, 0x12, 0x7F, 0x10},  // 4
    {0x27, 0x45, 0x45, 0x45, 0x39},  // 5
    {0x3C, 0x4A, 0x49, 0x49, 0x30},  // 6
    {0x01, 0x71, 0x09, 0x05, 0x03},  // 7
    {0x36, 0x49, 0x49, 0x49, 0x36},  // 8
    {0x06, 0x49, 0x49, 0x29, 0x1E},  // 9
    {0x00, 0x36, 0x36, 0x00, 0x00},  // :
    {0x00, 0x56, 0x36, 0x00, 0x00},  // ;
    {0x08, 0x14, 0x22, 0x41, 0x00},  // <
    {0x14, 0x14, 0x14, 0x14, 0x14},  // =
    {0x00, 0x41, 0x22, 0x14, 0x08},  // >
    {0x02, 0x01, 0x51, 0x09, 0x06},  // ?
    {0x32, 0x49, 0x79, 0x41, 0x3E},  // @
    {0x7E, 0x11, 0x11, 0x11, 0x7E},  // A
    {0x7F, 0x49, 0x49, 0x49, 0x36},  // B
    {0x3E, 0x41, 0x41, 0x41, 0x22},  // C
    {0x7F, 0x41, 0x41, 0x22, 0x1C},  // D
    {0x7F, 0x49, 0x49, 0x49, 0x41},  // E
    {0x7F, 0x09, 0x09, 0x09, 0x01},  // F
    {0x3E, 0x41, 0x49, 0x49, 0x7A},  // G
    {0x7F, 0x08, 0x08, 0x08, 0x7F},  // H
    {0x00, 0x41, 0x7F, 0x41, 0x00},  // I
    {0x20, 0x40, 0x41, 0x3F, 0x01},  // J
    {0x7F, 0x08, 0x14, 0x22, 0x41},  // K
    {0x7F, 0x40, 0x40, 0x40, 0x40},  // L
    {0x7F, 0x02, 0x0C, 0x02, 0x7F},  // M
    {0x7F, 0x04, 0x08, 0x10, 0x7F},  // N
    {0x3E, 0x41, 0x41, 0x41, 0x3E},  // O
    {0x7F, 0x09, 0x09, 0x09, 0x06},  // P
    {0x3E, 0x41, 0x51, 0x21, 0x5E},  // Q
    {0x7F, 0x09, 0x19, 0x29, 0x46},  // R
    {0x46, 0x49, 0x49, 0x49, 0x31},  // S
    {0x01, 0x01, 0x7F, 0x01, 0x01},  // T
    {0x3F, 0x40, 0x40, 0x40, 0x3F},  // U
    {0x1F, 0x20, 0x40, 0x20, 0x1F},  // V
    {0x3F, 0x40, 0x38, 0x40, 0x3F},  // W
    {0x63, 0x14, 0x08, 0x14, 0x63},  // X
    {0x07, 0x08, 0x70, 0x08, 0x07},  // Y
    {0x61, 0x51, 0x49, 0x45, 0x43},  // Z
    {0x00, 0x7F, 0x41, 0x41, 0x00},  // [
    {0x02, 0x04, 0x08, 0x10, 0x20},  // backslash
    {0x00, 0x41, 0x41, 0x7F, 0x00},  // ]
    {0x04, 0x02, 0x01, 0x02, 0x04},  // ^
    {0x40, 0x40, 0x40, 0x40, 0x40},  // _
    {0x00, 0x01, 0x02, 0x04, 0x00},  // `
    {0x20, 0x54, 0x54, 0x54, 0x78},  // a
    {0x7F, 0x48, 0x44, 0x44, 0x38},  // b
    {0x38, 0x44, 0x44, 0x44, 0x20},  // c
    {0x38, 0x44, 0x44, 0x48, 0x7F},  // d
    {0x38, 0x54, 0x54, 0x54, 0x18},  // e
    {0x08, 0x7E, 0x09, 0x01, 0x02},  // f
    {0x0C, 0x52, 0x52, 0x52, 0x3E},  // g
    {0x7F, 0x08, 0x04, 0x04, 0x78},  // h
    {0x00, 0x44, 0x7D, 0x40, 0x00},  // i
    {0x20, 0x40, 0x44, 0x3D, 0x00},  // j
    {0x7F, 0x10, 0x28, 0x44, 0x00},  // k
    {0x00, 0x41, 0x7F, 0x40, 0x00},  // l
    {0x7C, 0x04, 0x18, 0x04, 0x78},  // m
    {0x7C, 0x08, 0x04, 0x04, 0x78},  // n
    {0x38, 0x44, 0x44, 0x44, 0x38},  // o
    {0x7C, 0x14, 0x14, 0x14, 0x08},  // p
    {0x08, 0x14, 0x14, 0x18, 0x7C},  // q
    {0x7C, 0x08, 0x04, 0x04, 0x08},  // r
    {0x48, 0x54, 0x54, 0x54, 0x20},  // s
    {0x04, 0x3F, 0x44, 0x40, 0x20},  // t
    {0x3C, 0x40, 0x40, 0x20, 0x7C},  // u
    {0x1C, 0x20, 0x40, 0x20, 0x1C},  // v
    {0x3C, 0x40, 0x30, 0x40, 0x3C},  // w
    {0x44, 0x28, 0x10, 0x28, 0x44},  // x
    {0x0C, 0x50, 0x50, 0x50, 0x3C},  // y
    {0x44, 0x64, 0x54, 0x4C, 0x44},  // z
    {0x00, 0x08, 0x36, 0x41, 0x00},  // {
    {0x00, 0x00, 0x7F, 0x00, 0x00},  // |
    {0x00, 0x41, 0x36, 0x08, 0x00},  // }
    {0x08, 0x04, 0x08, 0x10, 0x08},  // ~
};

constexpr const char* kMismatchSentinel =
    "Error: the input description does not match the input image.";

// Extracts the first balanced JSON object from free-form annotator output.
// Annotators routinely wrap the payload in prose or code fences.
std::optional<json> first_json_object(const std::string& s) {
    for (std::size_t start = s.find('{'); start != std::string::npos;
         start = s.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false, escaped = false;
        for (std::size_t i = start; i < s.size(); ++i) {
            char c = s[i];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    auto parsed =
                        json::parse(s.substr(start, i - start + 1), nullptr, false);
                    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
                    break;
                }
            }
        }
    }
    return std::nullopt;
}

std::string stage4_prompt_for(const prompts::Prompts& prompts, corpus::Modality m,
                              bool features) {
    std::string name;
    switch (m) {
        case corpus::Modality::mri: name = "mri"; break;
        case corpus::Modality::xray: name = "xray"; break;
        case corpus::Modality::ct: name = "ct"; break;
        case corpus::Modality::histopathology: name = "histopathology"; break;
        case corpus::Modality::dermoscopy: name = "skin"; break;
        case corpus::Modality::endoscopy: name = "gi"; break;
        case corpus::Modality::fundus: name = "fundus"; break;
        case corpus::Modality::ultrasound: name = "ultrasound"; break;
        default:
            return prompts.get(features ? "templates/features_generic.txt"
                                        : "templates/caption_stage4_generic.txt");
    }
    return prompts.get((features ? "prompts/features_" : "prompts/caption_stage4_") +
                       name + ".txt");
}

std::string lettered_options(const std::vector<std::string>& options) {
    std::string out;
    for (std::size_t i = 0; i < options.size(); ++i) {
        out += static_cast<char>('A' + i);
        out += ". " + options[i];
        if (i + 1 < options.size()) out += '\n';
    }
    return out;
}

std::string strip_answer_punct(std::string s) {
    auto t = text::trim(s);
    while (!t.empty() && (t.front() == ':' || t.front() == '*' || t.front() == '"' ||
                          t.front() == '\'' || t.front() == ' '))
        t.erase(t.begin());
    while (!t.empty() && (t.back() == '.' || t.back() == '*' || t.back() == '"' ||
                          t.back() == '\'' || t.back() == ' '))
        t.pop_back();
    return t;
}

std::size_t rfind_ci(const std::string& haystack, const std::string& needle) {
    std::string h = text::to_lower_ascii(haystack);
    return h.rfind(text::to_lower_ascii(needle));
}

}  // namespace

RoI mask_to_bbox(const Mask2D& mask) {
    int x_min = -1, y_min = -1, x_max = -1, y_max = -1;
    for (std::size_t y = 0; y < mask.height; ++y) {
        for (std::size_t x = 0; x < mask.width; ++x) {
            if (!mask.at(y, x)) continue;
            int xi = static_cast<int>(x), yi = static_cast<int>(y);
            if (x_min < 0) {
                x_min = x_max = xi;
                y_min = y_max = yi;
            } else {
                x_min = std::min(x_min, xi);
                x_max = std::max(x_max, xi);
                y_min = std::min(y_min, yi);
                y_max = std::max(y_max, yi);
            }
        }
    }
    if (x_min < 0) throw SynthError("mask_to_bbox: empty mask");
    RoI roi;
    roi.kind = RoiKind::mask;
    roi.x_min = x_min;
    roi.y_min = y_min;
    roi.x_max = x_max;
    roi.y_max = y_max;
    roi.mask = mask;
    return roi;
}

std::vector<std::pair<img::Image, Mask2D>> slice_volume(const Volume3D& volume,
                                                        const Volume3D& masks) {
    if (volume.depth != masks.depth || volume.height != masks.height ||
        volume.width != masks.width)
        throw SynthError("slice_volume: volume/mask shape mismatch");
    std::vector<std::pair<img::Image, Mask2D>> out;
    std::size_t plane = volume.height * volume.width;
    for (std::size_t z = 0; z < volume.depth; ++z) {
        const std::uint8_t* mbase = masks.data.data() + z * plane;
        bool any = false;
        for (std::size_t i = 0; i < plane && !any; ++i) any = mbase[i] != 0;
        if (!any) continue;
        img::Image slice = img::make_image(static_cast<int>(volume.width),
                                           static_cast<int>(volume.height), 1);
        std::memcpy(slice.data.data(), volume.data.data() + z * plane, plane);
        Mask2D mask{volume.height, volume.width,
                    std::vector<std::uint8_t>(mbase, mbase + plane)};
        out.emplace_back(std::move(slice), std::move(mask));
    }
    return out;
}

std::string render_bbox(const std::string& image_bytes, const std::vector<RoI>& rois) {
    img::Image im = img::decode_pnm(image_bytes);
    if (im.channels == 1) {
        img::Image rgb = img::make_image(im.width, im.height, 3);
        for (int y = 0; y < im.height; ++y)
            for (int x = 0; x < im.width; ++x)
                for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = im.at(x, y);
        im = std::move(rgb);
    }
    constexpr int kThickness = 3;
    for (const RoI& roi : rois) {
        if (roi.x_min < 0 || roi.y_min < 0 || roi.x_max >= im.width ||
            roi.y_max >= im.height || roi.x_min > roi.x_max || roi.y_min > roi.y_max)
            throw SynthError("render_bbox: roi out of bounds");
        for (int y = roi.y_min; y <= roi.y_max; ++y) {
            for (int x = roi.x_min; x <= roi.x_max; ++x) {
                int edge = std::min(std::min(x - roi.x_min, roi.x_max - x),
                                    std::min(y - roi.y_min, roi.y_max - y));
                if (edge >= kThickness) continue;
                im.at(x, y, 0) = 255;
                im.at(x, y, 1) = 0;
                im.at(x, y, 2) = 0;
            }
        }
    }
    return img::encode_pnm(im);
}

CaptionTemplate::CaptionTemplate(std::string text) : text_(std::move(text)) {
    static const std::set<std::string> kExcluded = {"age", "identity"};
    for (std::size_t open = text_.find('{'); open != std::string::npos;
         open = text_.find('{', open + 1)) {
        auto close = text_.find('}', open + 1);
        if (close == std::string::npos) break;
        std::string slot = text_.substr(open + 1, close - open - 1);
        if (kExcluded.count(text::to_lower_ascii(slot)))
            throw SynthError("caption template references excluded key: " + slot);
        slots_.push_back(std::move(slot));
    }
}

std::string CaptionTemplate::render(const std::map<std::string, std::string>& meta) const {
    for (const auto& slot : slots_) {
        if (!meta.count(slot))
            throw SynthError("caption template missing slot value: " + slot);
    }
    return prompts::render(text_, meta);
}

std::string stage1_short_caption(const std::map<std::string, std::string>& meta,
                                 const CaptionTemplate& tpl) {
    return tpl.render(meta);
}

CaptionResult caption_pipeline(const std::vector<CaptionInput>& inputs,
                               client::AnnotatorClient& cl,
                               const prompts::Prompts& prompts) {
    CaptionResult result;
    result.report.input_count = inputs.size();
    client::RetryPolicy retry;

    std::string stage3_tpl = prompts.get("prompts/caption_stage3.txt");
    std::string stage5_tpl = prompts.get("prompts/caption_stage5.txt");

    for (const CaptionInput& in : inputs) {
        try {
            std::string coarse = in.stage1_template
                                     ? stage1_short_caption(in.meta, *in.stage1_template)
                                     : in.coarse_caption;
            std::string stage_image =
                in.rois.empty() ? in.image_bytes : render_bbox(in.image_bytes, in.rois);

            std::map<std::string, std::string> context = {
                {"Disease or organ", in.disease_or_organ},
                {"Knowledge", in.knowledge},
                {"Coarse Caption", coarse},
                {"Modality", corpus::to_string(in.modality)},
            };
            std::string context_block;
            for (const auto& [k, v] : context) context_block += k + ": " + v + "\n";

            client::ChatMessage stage3_msg{"user", stage3_tpl + "\n\n" + context_block,
                                           {stage_image}};
            std::string stage3_raw = client::chat_with_retry(cl, {stage3_msg}, retry);
            std::string stage3 = stage3_raw;
            if (auto obj = first_json_object(stage3_raw); obj && obj->contains("caption"))
                stage3 = obj->at("caption").get<std::string>();

            std::string stage4_tpl = stage4_prompt_for(prompts, in.modality, false);
            client::ChatMessage stage4_msg{"user", stage4_tpl, {in.image_bytes}};
            std::string stage4 = client::chat_with_retry(cl, {stage4_msg}, retry);

            std::string features = stage4_prompt_for(prompts, in.modality, true);
            std::string stage5_prompt =
                prompts::render(stage5_tpl, {{"doctor_preferred_features", features}}) +
                "\n\n" + context_block + "Detailed Captions:\nCaption 0: " + stage4 +
                "\nCaption 1: " + stage3 + "\n";
            client::ChatMessage stage5_msg{"user", stage5_prompt, {stage_image}};
            std::string stage5_raw = client::chat_with_retry(cl, {stage5_msg}, retry);
            std::string final_caption = stage5_raw;
            if (auto obj = first_json_object(stage5_raw); obj && obj->contains("caption"))
                final_caption = obj->at("caption").get<std::string>();

            corpus::Sample s;
            s.id = in.id;
            s.source_dataset = "caption_synth";
            s.task_kind = corpus::TaskKind::caption;
            s.modality = in.modality;
            s.images.push_back(corpus::ImageRef{in.id + ".pnm", 0, 0, std::nullopt});
            s.answer = final_caption;
            result.samples.push_back(std::move(s));
        } catch (const client::ClientError&) {
            result.report.removals.emplace_back(in.id, "annotator_error");
        }
    }
    result.report.kept_count = result.samples.size();
    result.report.removed_count = result.report.input_count - result.report.kept_count;
    return result;
}

std::string render_question_image(const std::string& text_in, const RenderConfig& config) {
    int cols = std::max(config.wrap_columns, 1);

    std::vector<std::string> lines;
    std::istringstream paragraphs(text_in);
    std::string para;
    while (std::getline(paragraphs, para)) {
        std::istringstream words(para);
        std::string word, line;
        bool any_word = false;
        while (words >> word) {
            any_word = true;
            // Hard-split words longer than the wrap width.
            while (static_cast<int>(word.size()) > cols) {
                if (!line.empty()) {
                    lines.push_back(line);
                    line.clear();
                }
                lines.push_back(word.substr(0, cols));
                word = word.substr(cols);
            }
            std::size_t needed = line.empty() ? word.size() : line.size() + 1 + word.size();
            if (static_cast<int>(needed) > cols) {
                lines.push_back(line);
                line = word;
            } else {
                line += line.empty() ? word : " " + word;
            }
        }
        if (!line.empty() || !any_word) lines.push_back(line);
    }
    if (lines.empty()) lines.push_back("");

    int scale = std::max(config.scale, 1);
    int cell_w = 6 * scale, cell_h = 8 * scale;
    int width = config.margin * 2 + cols * cell_w;
    int height = config.margin * 2 + static_cast<int>(lines.size()) * cell_h;
    img::Image canvas = img::make_image(width, height, 1, 255);

    for (std::size_t row = 0; row < lines.size(); ++row) {
        for (std::size_t col = 0; col < lines[row].size(); ++col) {
            unsigned char ch = static_cast<unsigned char>(lines[row][col]);
            if (ch < 32 || ch > 126) ch = '?';
            const std::uint8_t* glyph = kFont5x7[ch - 32];
            int ox = config.margin + static_cast<int>(col) * cell_w;
            int oy = config.margin + static_cast<int>(row) * cell_h;
            for (int gx = 0; gx < 5; ++gx) {
                for (int gy = 0; gy < 7; ++gy) {
                    if (!((glyph[gx] >> gy) & 1)) continue;
                    for (int sy = 0; sy < scale; ++sy)
                        for (int sx = 0; sx < scale; ++sx)
                            canvas.at(ox + gx * scale + sx, oy + gy * scale + sy) = 0;
                }
            }
        }
    }
    return img::encode_pnm(canvas);
}

std::string extract_final_answer(const std::string& reasoning) {
    static const char* kMarkers[] = {"answer is", "answer:"};
    for (const char* marker : kMarkers) {
        auto pos = rfind_ci(reasoning, marker);
        if (pos != std::string::npos)
            return strip_answer_punct(reasoning.substr(pos + std::strlen(marker)));
    }
    return strip_answer_punct(reasoning);
}

OcrResult synthesize_ocr_samples(const std::vector<OcrQuestion>& questions,
                                 client::AnnotatorClient& reasoner,
                                 const std::string& image_dir,
                                 const RenderConfig& render) {
    OcrResult result;
    result.report.input_count = questions.size();
    client::RetryPolicy retry;
    for (const OcrQuestion& q : questions) {
        std::string response;
        try {
            response = client::chat_with_retry(reasoner, {{"user", q.question, {}}}, retry);
        } catch (const client::ClientError&) {
            result.report.removals.emplace_back(q.id, "annotator_error");
            continue;
        }
        std::string extracted = extract_final_answer(response);
        if (text::normalize(extracted) != text::normalize(q.ground_truth)) {
            result.report.removals.emplace_back(q.id, "answer_mismatch");
            continue;
        }
        std::string bytes = render_question_image(q.question, render);
        img::Image rendered = img::decode_pnm(bytes);
        std::string path = image_dir.empty() ? q.id + ".pgm" : image_dir + "/" + q.id + ".pgm";
        if (!image_dir.empty()) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw SynthError("cannot write question image: " + path);
            out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        }
        result.image_files.emplace_back(path, bytes);

        corpus::Sample s;
        s.id = q.id;
        s.source_dataset = "ocr_synth";
        s.task_kind = corpus::TaskKind::vqa_open;
        s.images.push_back(
            corpus::ImageRef{path, rendered.width, rendered.height, std::nullopt});
        s.question = "Answer the question shown in the image.";
        s.answer = q.ground_truth;
        s.rationale = response;
        result.samples.push_back(std::move(s));
    }
    result.report.kept_count = result.samples.size();
    result.report.removed_count = result.report.input_count - result.report.kept_count;
    return result;
}

std::vector<corpus::Sample> template_vqa(const std::vector<LabeledRecord>& records,
                                         const QATemplate& tpl, int n_options,
                                         std::uint64_t seed) {
    if (static_cast<int>(tpl.distractor_pool.size()) < n_options)
        throw SynthError("template_vqa: distractor pool smaller than option count");
    Rng rng(seed);
    std::vector<corpus::Sample> out;
    out.reserve(records.size());
    for (const LabeledRecord& rec : records) {
        if (std::find(tpl.distractor_pool.begin(), tpl.distractor_pool.end(), rec.label) ==
            tpl.distractor_pool.end())
            throw SynthError("template_vqa: label not in pool: " + rec.label);
        std::vector<std::string> pool;
        for (const auto& l : tpl.distractor_pool)
            if (l != rec.label) pool.push_back(l);
        std::vector<std::string> options = {rec.label};
        for (std::size_t idx :
             rng.sample_indices(pool.size(), static_cast<std::size_t>(n_options - 1)))
            options.push_back(pool[idx]);
        rng.shuffle(options);

        corpus::Sample s;
        s.id = rec.id;
        s.source_dataset = "template_vqa";
        s.task_kind = corpus::TaskKind::vqa_mcq;
        s.images = rec.images;
        s.question = tpl.question_text;
        s.options = options;
        s.answer = rec.label;
        out.push_back(std::move(s));
    }
    return out;
}

SelfInstructResult self_instruct_vqa(const std::vector<CaptionPair>& pairs,
                                     const std::vector<std::string>& seed_examples,
                                     client::AnnotatorClient& cl,
                                     const prompts::Prompts& prompts, std::uint64_t seed) {
    SelfInstructResult result;
    result.report.input_count = pairs.size();
    std::string tpl = prompts.get("prompts/self_instruct_vqa.txt");
    client::RetryPolicy retry;

    for (const CaptionPair& pair : pairs) {
        std::map<std::string, std::string> subs = {{"caption", pair.caption}};
        for (std::size_t i = 0; i < 2; ++i)
            subs["seed_example_" + std::to_string(i + 1)] =
                i < seed_examples.size() ? seed_examples[i] : "";
        std::string prompt = prompts::render(tpl, subs);

        client::ChatMessage msg{"user", prompt, {}};
        std::ifstream img_in(pair.image_path, std::ios::binary);
        if (img_in) {
            std::ostringstream buf;
            buf << img_in.rdbuf();
            msg.image_bytes.push_back(buf.str());
        }

        std::string response;
        try {
            response = client::chat_with_retry(cl, {msg}, retry);
        } catch (const client::ClientError&) {
            result.report.removals.emplace_back(pair.id, "annotator_error");
            continue;
        }
        if (text::trim(response) == kMismatchSentinel) {
            result.report.removals.emplace_back(pair.id, "mismatch_sentinel");
            continue;
        }
        auto obj = first_json_object(response);
        if (!obj || !obj->contains("question") || !obj->contains("answer") ||
            !obj->contains("wrong answers") || !(*obj)["wrong answers"].is_array()) {
            result.report.removals.emplace_back(pair.id, "format");
            continue;
        }
        auto wrongs = (*obj)["wrong answers"];
        if (wrongs.empty() || wrongs.size() > 3) {
            result.report.removals.emplace_back(pair.id, "format");
            continue;
        }
        std::string answer = (*obj)["answer"].get<std::string>();
        std::vector<std::string> options = {answer};
        bool bad = false;
        for (const auto& w : wrongs) {
            if (!w.is_string() || w.get<std::string>() == answer) {
                bad = true;
                break;
            }
            options.push_back(w.get<std::string>());
        }
        if (bad) {
            result.report.removals.emplace_back(pair.id, "format");
            continue;
        }
        Rng rng(seed ^ text::fnv1a64(pair.id));
        rng.shuffle(options);

        corpus::Sample s;
        s.id = pair.id;
        s.source_dataset = "self_instruct";
        s.task_kind = corpus::TaskKind::vqa_mcq;
        s.images.push_back(corpus::ImageRef{pair.image_path, 0, 0, std::nullopt});
        s.question = (*obj)["question"].get<std::string>();
        s.options = options;
        s.answer = answer;
        result.samples.push_back(std::move(s));
    }
    result.report.kept_count = result.samples.size();
    result.report.removed_count = result.report.input_count - result.report.kept_count;
    return result;
}

CotResult distill_cot(const std::vector<corpus::Sample>& samples,
                      client::AnnotatorClient& cl, const prompts::Prompts& prompts) {
    CotResult result;
    result.report.input_count = samples.size();
    std::string mcq_tpl = prompts.get("prompts/cot_mcq.txt");
    std::string open_tpl = prompts.get("prompts/cot_open_qa.txt");
    client::RetryPolicy retry;

    for (const corpus::Sample& in : samples) {
        if (!in.answer) {
            result.report.removals.emplace_back(in.id, "missing_answer");
            continue;
        }
        bool mcq = in.task_kind == corpus::TaskKind::vqa_mcq;
        std::map<std::string, std::string> subs = {
            {"question", in.question.value_or("")},
            {"answer", *in.answer},
        };
        if (mcq)
            subs["options"] =
                lettered_options(in.options.value_or(std::vector<std::string>{}));
        std::string prompt = prompts::render(mcq ? mcq_tpl : open_tpl, subs);

        std::string response;
        try {
            response = client::chat_with_retry(cl, {{"user", prompt, {}}}, retry);
        } catch (const client::ClientError&) {
            result.report.removals.emplace_back(in.id, "annotator_error");
            continue;
        }
        auto obj = first_json_object(response);
        if (!obj || !obj->contains("reasoning") || !obj->contains("answer")) {
            result.report.removals.emplace_back(in.id, "format");
            continue;
        }
        std::string reasoning = (*obj)["reasoning"].get<std::string>();
        std::string answer = (*obj)["answer"].get<std::string>();
        if (text::trim(reasoning).empty()) {
            result.report.removals.emplace_back(in.id, "empty_reasoning");
            continue;
        }
        if (text::normalize(answer) != text::normalize(*in.answer)) {
            result.report.removals.emplace_back(in.id, "answer_mismatch");
            continue;
        }
        corpus::Sample out = in;
        out.rationale = reasoning;
        result.samples.push_back(std::move(out));
    }
    result.report.kept_count = result.samples.size();
    result.report.removed_count = result.report.input_count - result.report.kept_count;
    return result;
}

CotResult validate_cot(const std::vector<corpus::Sample>& samples,
                       client::AnnotatorClient& cl, const prompts::Prompts& prompts) {
    CotResult result;
    result.report.input_count = samples.size();
    std::string tpl = prompts.get("prompts/cot_consistency_check.txt");
    client::RetryPolicy retry;

    for (const corpus::Sample& in : samples) {
        if (!in.rationale) {
            result.report.removals.emplace_back(in.id, "missing_rationale");
            continue;
        }
        std::string prompt = prompts::render(tpl, {{"question", in.question.value_or("")},
                                                   {"reasoning", *in.rationale},
                                                   {"answer", in.answer.value_or("")}});
        std::string response;
        try {
            response = client::chat_with_retry(cl, {{"user", prompt, {}}}, retry);
        } catch (const client::ClientError&) {
            result.report.removals.emplace_back(in.id, "annotator_error");
            continue;
        }
        std::string verdict = text::trim(response);
        if (verdict.rfind("Inconsistent", 0) == 0) {
            result.report.removals.emplace_back(in.id, "inconsistent");
        } else if (verdict.rfind("Consistent", 0) == 0) {
            result.samples.push_back(in);
        } else {
            result.report.removals.emplace_back(in.id, "format");
        }
    }
    result.report.kept_count = result.samples.size();
    result.report.removed_count = result.report.input_count - result.report.kept_count;
    return result;
}

}  // namespace medforge::synth
