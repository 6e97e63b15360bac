#pragma once

#include "trajsurv/estimator.hpp"
#include "trajsurv/ingest.hpp"
#include "trajsurv/outcomes.hpp"
#include "trajsurv/trajectory.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trajsurv {

inline const std::vector<double> kDefaultProbesA{1.0, 3.0, 5.0, 8.0};
inline const std::vector<double> kDefaultProbesB{0.5, 1.0, 2.0, 3.0};

struct AnalysisConfig {
    GapConfig gap;
    OutcomeOptions outcome;
    int exclude_last_k = 0;
    std::vector<double> probes_a = kDefaultProbesA;
    std::vector<double> probes_b = kDefaultProbesB;
    double ci_level = 0.95;
};

struct StratumFit {
    std::string label;  ///< "All" or the entry-period label ("P1".."P4")
    SurvivalCurve curve;
    SurvivalSummary summary;
};

struct OutcomeAnalysis {
    OutcomeDataset dataset;
    StratumFit global;
    std::vector<StratumFit> strata;        ///< entry periods present, P1..P4 order
    std::optional<LogRankResult> log_rank;  ///< when at least two strata exist

    [[nodiscard]] const StratumFit* find(std::string_view label) const;
};

struct Analysis {
    std::vector<StudentHistory> histories;  ///< after late-entrant exclusion
    std::vector<Trajectory> trajectories;
    std::size_t excluded_late_entrants = 0;
    OutcomeAnalysis a;
    OutcomeAnalysis b;
};

struct LateEntrantFilter {
    std::vector<StudentHistory> kept;
    std::size_t excluded = 0;
    int max_entry_year = 0;
};

/// Drops students with entry_year > max_entry_year - k. k = 0 keeps all.
LateEntrantFilter filter_late_entrants(std::span<const StudentHistory> histories, int k);

/// Fits the global curve and one curve per entry period.
OutcomeAnalysis analyze_outcome(OutcomeDataset dataset, std::span<const double> probes);

/// Spells, transitions, both outcome datasets and their fits. Throws
/// ValidationError when no student is left to analyse.
Analysis run_analysis(std::span<const StudentHistory> histories, const AnalysisConfig& config);

}  // namespace trajsurv
