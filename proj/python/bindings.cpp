#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "medforge/corpus.hpp"
#include "medforge/eval.hpp"
#include "medforge/metrics.hpp"
#include "medforge/minhash.hpp"
#include "medforge/mixture.hpp"
#include "medforge/phash.hpp"
#include "medforge/text.hpp"

namespace py = pybind11;
using namespace medforge;

PYBIND11_MODULE(_medforge, m) {
    m.doc() = "Core operations of the medforge corpus toolkit";

    m.def("compute_phash",
          [](py::bytes image) { return dedup::compute_phash(std::string(image)); },
          py::arg("image_bytes"),
          "64-bit difference hash of a binary PNM image");
    m.def("hamming", &dedup::hamming, py::arg("a"), py::arg("b"));

    m.def("normalize_text", [](const std::string& s) { return text::normalize(s); },
          py::arg("text"));
    m.def("count_tokens", [](const std::string& s) { return text::count_tokens(s); },
          py::arg("text"));

    m.def("minhash_jaccard",
          [](const std::string& a, const std::string& b) {
              auto sa = dedup::minhash_signature(a);
              auto sb = dedup::minhash_signature(b);
              return dedup::estimate_jaccard(sa, sb);
          },
          py::arg("a"), py::arg("b"),
          "Estimated shingle-set Jaccard similarity of two texts");

    m.def("rouge_l", &metrics::rouge_l, py::arg("candidate"), py::arg("reference"));
    m.def("bleu", &metrics::bleu, py::arg("candidate"), py::arg("references"),
          py::arg("max_n") = 4);
    m.def("meteor_lite", &metrics::meteor_lite, py::arg("candidate"),
          py::arg("reference"));
    m.def("cider", &metrics::cider, py::arg("candidates"), py::arg("references"));

    m.def("format_reward", &mixture::format_reward, py::arg("response"));
    m.def("total_reward",
          [](const std::string& response, const std::string& answer) {
              corpus::Sample gt;
              gt.id = "py";
              gt.task_kind = corpus::TaskKind::vqa_open;
              gt.answer = answer;
              return mixture::total_reward(response, gt);
          },
          py::arg("response"), py::arg("answer"),
          "Total verifiable reward against an open-ended ground truth");

    m.def("extract_mcq_answer", &eval::extract_mcq_answer, py::arg("prediction"),
          py::arg("options"));

    m.attr("__version__") = "0.1.0";
}
