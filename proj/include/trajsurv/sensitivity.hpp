#pragma once

#include "trajsurv/pipeline.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trajsurv {

/// One definitional variant of the pipeline.
struct VariantSpec {
    std::string name;
    double inactivity_window_years = 2.0;
    TimeOrigin time_origin = TimeOrigin::exact_date;
    int exclude_last_k_entry_years = 0;

    void validate() const;
};

/// Per variant, outcome and stratum: the summary and its difference from the
/// baseline. delta_median is +/-inf when exactly one of the two medians is
/// infinite and 0 when both are.
struct VariantRow {
    std::string variant;
    OutcomeId outcome = OutcomeId::A;
    std::string stratum;
    SurvivalSummary summary;
    double delta_median = 0.0;
    std::int64_t delta_events = 0;
    double sup_distance = 0.0;  ///< sup_t |S_variant(t) - S_baseline(t)|
    double sup_distance_at = 0.0;
    std::size_t excluded_students = 0;
    bool stable = true;
};

struct StabilityReport {
    std::string baseline = "baseline";
    double stability_threshold_years = 0.25;
    std::vector<VariantSpec> variants;  ///< baseline included, sorted by name
    std::vector<VariantRow> rows;       ///< variant name, then outcome, then stratum

    [[nodiscard]] const VariantRow* find(std::string_view variant, OutcomeId outcome,
                                         std::string_view stratum) const;
    [[nodiscard]] std::string to_json() const;
};

inline constexpr double kDefaultStabilityThreshold = 0.25;

/// Runs the baseline (`base` as given, named "baseline") plus each variant
/// and reports deltas against the baseline.
StabilityReport run_variants(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                             std::span<const VariantSpec> variants,
                             double stability_threshold = kDefaultStabilityThreshold);

StabilityReport run_window_variants(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                                    std::span<const double> windows = std::vector<double>{1.0, 2.0, 3.0},
                                    double stability_threshold = kDefaultStabilityThreshold);

StabilityReport run_origin_variant(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                                   double stability_threshold = kDefaultStabilityThreshold);

StabilityReport exclude_late_entrants(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                                      int k = 3, double stability_threshold = kDefaultStabilityThreshold);

/// Window {1, 2, 3} years, academic-year origin and last-3-years exclusion
/// in one report.
StabilityReport run_standard_suite(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                                   double stability_threshold = kDefaultStabilityThreshold);

/// sup over the union of both curves' event times of |S_a - S_b|, and where
/// it is attained.
std::pair<double, double> sup_distance(const SurvivalCurve& a, const SurvivalCurve& b);

}  // namespace trajsurv
