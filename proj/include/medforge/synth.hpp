#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "medforge/client.hpp"
#include "medforge/corpus.hpp"
#include "medforge/filters.hpp"
#include "medforge/image.hpp"
#include "medforge/prompts.hpp"

namespace medforge::synth {

struct Mask2D {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> data;  // row-major, nonzero = set

    std::uint8_t at(std::size_t y, std::size_t x) const { return data[y * width + x]; }
};

struct Volume3D {
    std::size_t depth = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> data;  // z-major
};

enum class RoiKind { bbox, mask };

struct RoI {
    RoiKind kind = RoiKind::bbox;
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    std::optional<Mask2D> mask;
};

struct SynthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tightest rectangle containing every set pixel. Throws on an empty mask.
RoI mask_to_bbox(const Mask2D& mask);

// One (slice, mask-slice) pair per z index whose mask has at least one set
// pixel; z order preserved.
std::vector<std::pair<img::Image, Mask2D>> slice_volume(const Volume3D& volume,
                                                        const Volume3D& masks);

// Draws a 3px red outline at each RoI bbox. Grayscale inputs are promoted to
// RGB so the outline is visible. Throws on out-of-bounds RoIs.
std::string render_bbox(const std::string& image_bytes, const std::vector<RoI>& rois);

// Rule-based short caption from structured dataset metadata. Slots that would
// leak non-visual attributes are rejected when the template is registered.
class CaptionTemplate {
public:
    explicit CaptionTemplate(std::string text);
    std::string render(const std::map<std::string, std::string>& meta) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::vector<std::string> slots_;
};

std::string stage1_short_caption(const std::map<std::string, std::string>& meta,
                                 const CaptionTemplate& tpl);

struct CaptionInput {
    std::string id;
    std::string image_bytes;
    corpus::Modality modality = corpus::Modality::other;
    std::vector<RoI> rois;
    std::map<std::string, std::string> meta;  // stage-1 slot values
    std::string disease_or_organ;
    std::string knowledge;
    std::optional<CaptionTemplate> stage1_template;
    std::string coarse_caption;  // used when no stage-1 template applies
};

struct CaptionResult {
    std::vector<corpus::Sample> samples;
    filters::FilterReport report;
};

CaptionResult caption_pipeline(const std::vector<CaptionInput>& inputs,
                               client::AnnotatorClient& cl, const prompts::Prompts& prompts);

struct RenderConfig {
    int wrap_columns = 48;
    int margin = 8;
    int scale = 2;
};

// Deterministic raster of question text: embedded 5x7 monospace font, fixed
// wrap width, white background. Returned as binary PGM bytes.
std::string render_question_image(const std::string& text,
                                  const RenderConfig& config = {});

struct OcrQuestion {
    std::string id;
    std::string question;
    std::string ground_truth;
};

struct OcrResult {
    std::vector<corpus::Sample> samples;
    std::vector<std::pair<std::string, std::string>> image_files;  // (path, bytes)
    filters::FilterReport report;
};

// Pulls the final answer out of a reasoning trace ("the answer is X",
// "Answer: X", else the whole trimmed text).
std::string extract_final_answer(const std::string& reasoning);

OcrResult synthesize_ocr_samples(const std::vector<OcrQuestion>& questions,
                                 client::AnnotatorClient& reasoner,
                                 const std::string& image_dir,
                                 const RenderConfig& render = {});

enum class LabelKind { anatomy, abnormality, modality };

struct QATemplate {
    LabelKind label_kind = LabelKind::modality;
    std::string question_text;
    std::vector<std::string> distractor_pool;
};

struct LabeledRecord {
    std::string id;
    std::string label;
    std::vector<corpus::ImageRef> images;
};

std::vector<corpus::Sample> template_vqa(const std::vector<LabeledRecord>& records,
                                         const QATemplate& tpl, int n_options,
                                         std::uint64_t seed);

struct CaptionPair {
    std::string id;
    std::string image_path;
    std::string caption;
};

struct SelfInstructResult {
    std::vector<corpus::Sample> samples;
    filters::FilterReport report;
};

SelfInstructResult self_instruct_vqa(const std::vector<CaptionPair>& pairs,
                                     const std::vector<std::string>& seed_examples,
                                     client::AnnotatorClient& cl,
                                     const prompts::Prompts& prompts, std::uint64_t seed = 0);

struct CotResult {
    std::vector<corpus::Sample> samples;
    filters::FilterReport report;
};

CotResult distill_cot(const std::vector<corpus::Sample>& samples,
                      client::AnnotatorClient& cl, const prompts::Prompts& prompts);

// Keep iff the checker response begins with "Consistent". Anything other than
// a Consistent/Inconsistent verdict is a format error and drops the sample.
CotResult validate_cot(const std::vector<corpus::Sample>& samples,
                       client::AnnotatorClient& cl, const prompts::Prompts& prompts);

}  // namespace medforge::synth
