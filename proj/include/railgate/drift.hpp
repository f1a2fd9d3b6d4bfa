#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "railgate/envelope.hpp"
#include "railgate/ood.hpp"
#include "railgate/types.hpp"

namespace railgate {

/// H(p, q) = (1/sqrt 2) * ||sqrt p - sqrt q||_2, in [0, 1].
/// Both histograms must have the same bin count and sum to 1 within 1e-6.
double hellinger(std::span<const double> p, std::span<const double> q);

/// Equal-width bins over [lo, hi]; probabilities sum to one.
struct FeatureHistogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> probabilities;

    std::size_t bins() const noexcept { return probabilities.size(); }
    /// Bin of `v`; values outside [lo, hi] clamp to the edge bins.
    std::size_t bin_of(double v) const noexcept;
};

/// Bins one column of `rows` over the given range.
FeatureHistogram histogram_over(std::span<const std::vector<double>> rows, std::size_t feature, double lo, double hi,
                                std::size_t bins);

/// One histogram per feature over the data's own [min, max].
std::vector<FeatureHistogram> fit_histograms(const Dataset& data, std::size_t bins);

/// Training-time statistics persisted next to a guarded model.
struct ReferenceStats {
    std::vector<FeatureHistogram> histograms;
    std::map<OodDetector, std::vector<double>> calibration_scores;
    OodThresholds thresholds;
    double target_tpr = 0.95;
    double drift_threshold = 0.25;
    std::size_t window_size = 200;
    std::vector<std::vector<double>> background;  // rows for explanations

    /// Throws ConfigError on broken invariants.
    void check() const;
};

nlohmann::json reference_stats_to_json(const ReferenceStats& stats);
ReferenceStats reference_stats_from_json(const nlohmann::json& doc);
void save_reference_stats(const ReferenceStats& stats, const std::filesystem::path& path);
ReferenceStats load_reference_stats(const std::filesystem::path& path);

/// The last `capacity` ingested inputs. Not synchronised; the owner
/// serialises access.
class DriftWindow {
public:
    explicit DriftWindow(std::size_t capacity);

    void ingest(std::vector<double> x);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return rows_.size(); }
    std::size_t lifetime_count() const noexcept { return lifetime_; }
    bool full() const noexcept { return rows_.size() >= capacity_; }
    const std::deque<std::vector<double>>& rows() const noexcept { return rows_; }

private:
    std::size_t capacity_;
    std::size_t lifetime_ = 0;
    std::deque<std::vector<double>> rows_;
};

/// Mean per-feature Hellinger distance between the window and the reference
/// histograms, on the reference bin edges. Skipped until the window is full;
/// flags when the score reaches drift_threshold.
GuardReport drift_check(const DriftWindow& window, const ReferenceStats& ref);

/// Score only; precondition: non-empty window.
double drift_score(std::span<const std::vector<double>> rows, const ReferenceStats& ref);

}  // namespace railgate
