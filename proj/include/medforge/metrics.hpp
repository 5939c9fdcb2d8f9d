#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace medforge::metrics {

// Sentence-level ROUGE-L with balanced F = 2PR/(P+R). Both-empty pairs score 0.
double rouge_l(const std::string& candidate, const std::string& reference);

// Geometric mean of clipped n-gram precisions (n = 1..max_n) times the brevity
// penalty. Zero counts for n >= 2 are smoothed with epsilon 1e-9; a candidate
// with zero 1-gram overlap scores 0.
double bleu(const std::string& candidate, const std::vector<std::string>& references,
            int max_n = 4);

// Unigram alignment on exact + suffix-stemmed matches; Fmean with alpha = 0.9,
// fragmentation penalty gamma = 0.5, beta = 3 (zero when a single chunk covers
// the alignment). WordNet synonymy intentionally out.
double meteor_lite(const std::string& candidate, const std::string& reference);

// Plain CIDEr (no length penalty): mean over n = 1..4 of TF-IDF cosine between
// candidate and reference n-gram vectors, scaled by 10. Document frequencies
// come from the reference sets of all items.
std::vector<double> cider_scores(const std::vector<std::string>& candidates,
                                 const std::vector<std::vector<std::string>>& references);
double cider(const std::vector<std::string>& candidates,
             const std::vector<std::vector<std::string>>& references);

// RadCliQ is lower-is-better; reported as its reciprocal.
double radcliq_inverse(double score);

struct MetricReport {
    double rouge_l = 0.0;
    double bleu = 0.0;
    double meteor = 0.0;
    double cider = 0.0;
    std::map<std::string, double> external;
    bool scaled = false;
};

// Multiplies every numeric field by 100 exactly once.
MetricReport scale_report(const MetricReport& r);

// Out-of-process adapter for model-based metrics. An absent value means the
// metric is omitted from the report, never zero-filled.
class MetricAdapter {
public:
    virtual ~MetricAdapter() = default;
    virtual double score(const std::string& metric, const std::string& candidate,
                         const std::string& reference) = 0;
};

class HttpMetricAdapter : public MetricAdapter {
public:
    explicit HttpMetricAdapter(std::string endpoint);
    double score(const std::string& metric, const std::string& candidate,
                 const std::string& reference) override;

private:
    std::string endpoint_;
};

// Passthrough of the adapter's value; radcliq is routed through radcliq_inverse.
double external_metric(const std::string& name, const std::string& candidate,
                       const std::string& reference, MetricAdapter& adapter);

}  // namespace medforge::metrics
