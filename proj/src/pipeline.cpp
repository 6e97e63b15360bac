#include "trajsurv/pipeline.hpp"

#include "trajsurv/error.hpp"

#include <algorithm>
#include <stdexcept>

namespace trajsurv {

const StratumFit* OutcomeAnalysis::find(std::string_view label) const
{
    if (label == global.label) return &global;
    for (const auto& s : strata) {
        if (s.label == label) return &s;
    }
    return nullptr;
}

LateEntrantFilter filter_late_entrants(std::span<const StudentHistory> histories, int k)
{
    if (k < 0) throw std::invalid_argument("exclusion window k must be non-negative");
    LateEntrantFilter out;
    if (histories.empty()) return out;
    out.max_entry_year = std::max_element(histories.begin(), histories.end(), [](const auto& a, const auto& b) {
                             return a.entry_year < b.entry_year;
                         })->entry_year;
    const int cutoff = out.max_entry_year - k;
    for (const auto& h : histories) {
        if (k > 0 && h.entry_year > cutoff) {
            ++out.excluded;
        } else {
            out.kept.push_back(h);
        }
    }
    return out;
}

OutcomeAnalysis analyze_outcome(OutcomeDataset dataset, std::span<const double> probes)
{
    OutcomeAnalysis out;
    out.global.label = std::string(kGlobalStratum);
    out.global.curve = km_fit(dataset.records);
    out.global.summary = summarize(out.global.curve, probes);

    // Entry-period labels sort as P1 < P2 < P3 < P4 in the std::map.
    auto parts = stratify(dataset, StratifyKey::entry_period);
    std::map<std::string, std::vector<SubjectRecord>> groups;
    for (auto& [label, part] : parts) {
        StratumFit fit;
        fit.label = label;
        fit.curve = km_fit(part.records);
        fit.summary = summarize(fit.curve, probes);
        out.strata.push_back(std::move(fit));
        groups.emplace(label, std::move(part.records));
    }
    if (groups.size() >= 2) out.log_rank = log_rank(groups);
    out.dataset = std::move(dataset);
    return out;
}

Analysis run_analysis(std::span<const StudentHistory> histories, const AnalysisConfig& config)
{
    config.gap.validate();
    auto filtered = filter_late_entrants(histories, config.exclude_last_k);
    if (filtered.kept.empty()) throw ValidationError("no students left to analyse");

    Analysis out;
    out.excluded_late_entrants = filtered.excluded;
    out.histories = std::move(filtered.kept);
    out.trajectories = reconstruct_all(out.histories, config.gap);
    auto outcomes = build_outcomes(out.histories, out.trajectories, config.gap, config.outcome);
    out.a = analyze_outcome(std::move(outcomes.a), config.probes_a);
    out.b = analyze_outcome(std::move(outcomes.b), config.probes_b);
    return out;
}

}  // namespace trajsurv
