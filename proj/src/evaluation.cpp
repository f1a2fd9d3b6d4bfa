#include "railgate/evaluation.hpp"

#include <algorithm>
#include <vector>

#include "railgate/errors.hpp"

namespace railgate {

double auroc(std::span<const double> positive, std::span<const double> negative) {
    if (positive.empty() || negative.empty()) {
        throw PreconditionError("AUROC needs at least one positive and one negative score");
    }
    // Rank-sum form of the pair count; tied groups share their mid-rank.
    struct Item {
        double score;
        bool positive;
    };
    std::vector<Item> items;
    items.reserve(positive.size() + negative.size());
    for (double s : positive) items.push_back({s, true});
    for (double s : negative) items.push_back({s, false});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].score == items[i].score) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (items[k].positive) rank_sum += mid_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(positive.size());
    const double nn = static_cast<double>(negative.size());
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * nn);
}

double rate_at_or_above(std::span<const double> scores, double threshold) {
    if (scores.empty()) return 0.0;
    const auto hits = std::count_if(scores.begin(), scores.end(), [threshold](double s) { return s >= threshold; });
    return static_cast<double>(hits) / static_cast<double>(scores.size());
}

EvalReport evaluate_detector(std::string name, std::span<const double> positive, std::span<const double> negative,
                             double threshold) {
    EvalReport r;
    r.detector = std::move(name);
    r.auroc = auroc(positive, negative);
    r.threshold = threshold;
    r.tpr = rate_at_or_above(positive, threshold);
    r.fpr = rate_at_or_above(negative, threshold);
    r.n_positive = positive.size();
    r.n_negative = negative.size();
    return r;
}

nlohmann::json to_json(const EvalReport& report) {
    return {{"detector", report.detector},   {"auroc", report.auroc},
            {"threshold", report.threshold}, {"tpr", report.tpr},
            {"fpr", report.fpr},             {"n_positive", report.n_positive},
            {"n_negative", report.n_negative}};
}

}  // namespace railgate
