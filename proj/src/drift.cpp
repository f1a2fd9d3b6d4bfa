#include "railgate/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "railgate/errors.hpp"
#include "railgate/model_io.hpp"
#include "railgate/numeric.hpp"

namespace railgate {

double hellinger(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size() || p.empty()) {
        throw PreconditionError(fmt::format("histograms differ in bin count ({} vs {})", p.size(), q.size()));
    }
    const auto check = [](std::span<const double> h, char name) {
        double total = 0.0;
        for (double v : h) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw PreconditionError(fmt::format("histogram {} has a negative or non-finite bin", name));
            }
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-6) {
            throw PreconditionError(fmt::format("histogram {} sums to {}, not 1", name, total));
        }
    };
    check(p, 'p');
    check(q, 'q');
    double ss = 0.0;
    bool overlap = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        ss += d * d;
        overlap = overlap || (p[i] > 0.0 && q[i] > 0.0);
    }
    // Disjoint supports are exactly 1; the sum form would carry the
    // rounding of the two normalisations.
    if (!overlap) return 1.0;
    return std::min(1.0, std::sqrt(ss / 2.0));
}

std::size_t FeatureHistogram::bin_of(double v) const noexcept {
    const std::size_t b = bins();
    if (!(v > lo)) return 0;
    if (v >= hi) return b - 1;
    const auto idx = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(b));
    return std::min(idx, b - 1);
}

FeatureHistogram histogram_over(std::span<const std::vector<double>> rows, std::size_t feature, double lo, double hi,
                                std::size_t bins) {
    if (bins < 2) throw ConfigError("histograms need at least 2 bins");
    if (rows.empty()) throw PreconditionError("cannot histogram an empty sample");
    FeatureHistogram h{lo, hi, std::vector<double>(bins, 0.0)};
    for (const auto& r : rows) h.probabilities[h.bin_of(r[feature])] += 1.0;
    for (double& p : h.probabilities) p /= static_cast<double>(rows.size());
    return h;
}

std::vector<FeatureHistogram> fit_histograms(const Dataset& data, std::size_t bins) {
    if (data.empty()) throw PreconditionError("cannot fit histograms on an empty dataset");
    std::vector<FeatureHistogram> out;
    for (std::size_t j = 0; j < data.dim(); ++j) {
        double lo = data.features.front()[j];
        double hi = lo;
        for (const auto& r : data.features) {
            lo = std::min(lo, r[j]);
            hi = std::max(hi, r[j]);
        }
        if (!(hi > lo)) {
            // Constant column: give it a unit-width range so bins are defined.
            lo -= 0.5;
            hi += 0.5;
        }
        out.push_back(histogram_over(data.features, j, lo, hi, bins));
    }
    return out;
}

void ReferenceStats::check() const {
    if (histograms.empty()) throw ConfigError("reference stats hold no histograms");
    for (std::size_t j = 0; j < histograms.size(); ++j) {
        const auto& h = histograms[j];
        if (h.bins() < 2) throw ConfigError(fmt::format("histogram {} has fewer than 2 bins", j));
        if (!(h.lo < h.hi)) throw ConfigError(fmt::format("histogram {} has an empty range", j));
        const double total = std::accumulate(h.probabilities.begin(), h.probabilities.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-9) {
            throw ConfigError(fmt::format("histogram {} sums to {}", j, total));
        }
    }
    if (!(drift_threshold >= 0.0 && drift_threshold <= 1.0)) {
        throw ConfigError("drift_threshold must lie in [0, 1]");
    }
    if (window_size == 0) throw ConfigError("window_size must be positive");
    for (const auto& row : background) {
        if (row.size() != histograms.size() || !all_finite(row)) {
            throw ConfigError("background rows must be finite and match the feature count");
        }
    }
}

nlohmann::json reference_stats_to_json(const ReferenceStats& stats) {
    nlohmann::json doc;
    auto hists = nlohmann::json::array();
    for (const auto& h : stats.histograms) {
        hists.push_back({{"lo", h.lo}, {"hi", h.hi}, {"probabilities", h.probabilities}});
    }
    doc["histograms"] = std::move(hists);
    nlohmann::json cal = nlohmann::json::object();
    for (const auto& [d, scores] : stats.calibration_scores) cal[std::string(to_string(d))] = scores;
    doc["calibration_scores"] = std::move(cal);
    nlohmann::json th = nlohmann::json::object();
    for (const auto& t : stats.thresholds.detectors) th[std::string(to_string(t.detector))] = t.min_score;
    doc["thresholds"] = std::move(th);
    doc["policy"] = to_string(stats.thresholds.policy);
    doc["target_tpr"] = stats.target_tpr;
    doc["drift_threshold"] = stats.drift_threshold;
    doc["window_size"] = stats.window_size;
    doc["background"] = stats.background;
    return doc;
}

ReferenceStats reference_stats_from_json(const nlohmann::json& doc) {
    ReferenceStats stats;
    try {
        for (const auto& h : doc.at("histograms")) {
            stats.histograms.push_back(FeatureHistogram{h.at("lo").get<double>(), h.at("hi").get<double>(),
                                                        h.at("probabilities").get<std::vector<double>>()});
        }
        if (doc.contains("calibration_scores")) {
            for (const auto& [name, scores] : doc["calibration_scores"].items()) {
                stats.calibration_scores[ood_detector_from_string(name)] = scores.get<std::vector<double>>();
            }
        }
        if (doc.contains("thresholds")) {
            for (const auto& [name, value] : doc["thresholds"].items()) {
                stats.thresholds.detectors.push_back({ood_detector_from_string(name), value.get<double>()});
            }
        }
        if (doc.contains("policy")) stats.thresholds.policy = vote_policy_from_string(doc["policy"].get<std::string>());
        stats.target_tpr = doc.value("target_tpr", stats.target_tpr);
        stats.drift_threshold = doc.value("drift_threshold", stats.drift_threshold);
        stats.window_size = doc.value("window_size", stats.window_size);
        if (doc.contains("background")) {
            stats.background = doc["background"].get<std::vector<std::vector<double>>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("reference stats: {}", e.what()));
    } catch (const ConfigError& e) {
        throw FormatError(fmt::format("reference stats: {}", e.what()));
    }
    try {
        stats.check();
    } catch (const ConfigError& e) {
        throw FormatError(fmt::format("reference stats: {}", e.what()));
    }
    return stats;
}

void save_reference_stats(const ReferenceStats& stats, const std::filesystem::path& path) {
    write_json_file(reference_stats_to_json(stats), path);
}

ReferenceStats load_reference_stats(const std::filesystem::path& path) {
    try {
        return reference_stats_from_json(read_json_file(path));
    } catch (const FormatError& e) {
        throw FormatError(fmt::format("'{}': {}", path.string(), e.what()));
    }
}

DriftWindow::DriftWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("drift window capacity must be positive");
}

void DriftWindow::ingest(std::vector<double> x) {
    rows_.push_back(std::move(x));
    ++lifetime_;
    while (rows_.size() > capacity_) rows_.pop_front();
}

double drift_score(std::span<const std::vector<double>> rows, const ReferenceStats& ref) {
    double total = 0.0;
    for (std::size_t j = 0; j < ref.histograms.size(); ++j) {
        const auto& h = ref.histograms[j];
        const auto window_hist = histogram_over(rows, j, h.lo, h.hi, h.bins());
        total += hellinger(window_hist.probabilities, h.probabilities);
    }
    return total / static_cast<double>(ref.histograms.size());
}

GuardReport drift_check(const DriftWindow& window, const ReferenceStats& ref) {
    GuardReport report;
    report.guard = GuardName::drift;
    const std::size_t needed = ref.window_size;
    if (window.size() < needed) {
        report.verdict = Verdict::skipped;
        report.internal_detail = fmt::format("warm-up: window holds {} of {} inputs", window.size(), needed);
        return report;
    }
    const std::vector<std::vector<double>> rows(window.rows().end() - static_cast<std::ptrdiff_t>(needed),
                                                window.rows().end());
    const double score = drift_score(rows, ref);
    report.score = score;
    report.threshold = ref.drift_threshold;
    report.verdict = score >= ref.drift_threshold ? Verdict::flag : Verdict::pass;
    report.internal_detail = fmt::format("mean Hellinger distance {:.17g} over {} features (threshold {:.17g})", score,
                                         ref.histograms.size(), ref.drift_threshold);
    report.external_message = report.verdict == Verdict::flag ? "input distribution drift detected" : std::string();
    return report;
}

}  // namespace railgate
