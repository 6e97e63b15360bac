#include "trajsurv/sensitivity.hpp"

#include "trajsurv/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

namespace trajsurv {

void VariantSpec::validate() const
{
    if (name.empty()) throw std::invalid_argument("variant needs a name");
    if (!std::isfinite(inactivity_window_years) || inactivity_window_years <= 0.0) {
        throw std::invalid_argument("variant '" + name + "': window must be positive");
    }
    if (exclude_last_k_entry_years < 0) {
        throw std::invalid_argument("variant '" + name + "': k must be non-negative");
    }
}

const VariantRow* StabilityReport::find(std::string_view variant, OutcomeId outcome,
                                        std::string_view stratum) const
{
    for (const auto& r : rows) {
        if (r.variant == variant && r.outcome == outcome && r.stratum == stratum) return &r;
    }
    return nullptr;
}

std::pair<double, double> sup_distance(const SurvivalCurve& a, const SurvivalCurve& b)
{
    std::vector<double> grid = a.times;
    grid.insert(grid.end(), b.times.begin(), b.times.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double best = 0.0, at = 0.0;
    for (double t : grid) {
        const double d = std::abs(survival_at(a, t) - survival_at(b, t));
        if (d > best) best = d, at = t;
    }
    return {best, at};
}

namespace {

double median_delta(double variant, double baseline)
{
    if (std::isinf(variant) && std::isinf(baseline)) return 0.0;
    return variant - baseline;
}

void append_rows(StabilityReport& report, const std::string& name, const Analysis& run,
                 const Analysis& base)
{
    for (const auto* pair : {&run.a, &run.b}) {
        const OutcomeAnalysis& variant_out = *pair;
        const OutcomeAnalysis& base_out = pair == &run.a ? base.a : base.b;
        std::vector<const StratumFit*> fits{&variant_out.global};
        for (const auto& s : variant_out.strata) fits.push_back(&s);

        for (const auto* fit : fits) {
            VariantRow row;
            row.variant = name;
            row.outcome = variant_out.dataset.outcome;
            row.stratum = fit->label;
            row.summary = fit->summary;
            row.excluded_students = run.excluded_late_entrants;
            if (const auto* ref = base_out.find(fit->label)) {
                row.delta_median = median_delta(fit->summary.median, ref->summary.median);
                row.delta_events = static_cast<std::int64_t>(fit->summary.n_events) -
                                   static_cast<std::int64_t>(ref->summary.n_events);
                std::tie(row.sup_distance, row.sup_distance_at) = sup_distance(fit->curve, ref->curve);
                row.stable = std::abs(row.delta_median) < report.stability_threshold_years;
            } else {
                row.delta_median = std::numeric_limits<double>::quiet_NaN();
                row.stable = false;
            }
            report.rows.push_back(std::move(row));
        }
    }
}

AnalysisConfig apply(const AnalysisConfig& base, const VariantSpec& v)
{
    AnalysisConfig cfg = base;
    cfg.gap.inactivity_window_years = v.inactivity_window_years;
    cfg.outcome.origin = v.time_origin;
    cfg.exclude_last_k = v.exclude_last_k_entry_years;
    return cfg;
}

nlohmann::ordered_json number_or_text(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

StabilityReport run_variants(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                             std::span<const VariantSpec> variants, double stability_threshold)
{
    StabilityReport report;
    report.stability_threshold_years = stability_threshold;

    VariantSpec baseline{report.baseline, base.gap.inactivity_window_years, base.outcome.origin,
                         base.exclude_last_k};
    report.variants.push_back(baseline);
    for (const auto& v : variants) {
        v.validate();
        if (v.name == report.baseline) throw std::invalid_argument("variant name 'baseline' is reserved");
        for (const auto& seen : report.variants) {
            if (seen.name == v.name) throw std::invalid_argument("duplicate variant '" + v.name + "'");
        }
        report.variants.push_back(v);
    }
    std::sort(report.variants.begin(), report.variants.end(),
              [](const VariantSpec& a, const VariantSpec& b) { return a.name < b.name; });

    const Analysis base_run = run_analysis(histories, base);
    for (const auto& v : report.variants) {
        if (v.name == report.baseline) {
            append_rows(report, v.name, base_run, base_run);
        } else {
            append_rows(report, v.name, run_analysis(histories, apply(base, v)), base_run);
        }
    }
    return report;
}

StabilityReport run_window_variants(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                                    std::span<const double> windows, double stability_threshold)
{
    std::vector<VariantSpec> variants;
    for (double w : windows) {
        std::ostringstream name;
        name << "window_" << csv::fixed(w, 1) << "y";
        variants.push_back({name.str(), w, base.outcome.origin, base.exclude_last_k});
    }
    return run_variants(histories, base, variants, stability_threshold);
}

StabilityReport run_origin_variant(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                                   double stability_threshold)
{
    const VariantSpec v{"origin_academic_year", base.gap.inactivity_window_years,
                        TimeOrigin::academic_year, base.exclude_last_k};
    return run_variants(histories, base, std::span(&v, 1), stability_threshold);
}

StabilityReport exclude_late_entrants(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                                      int k, double stability_threshold)
{
    const VariantSpec v{"exclude_last_" + std::to_string(k), base.gap.inactivity_window_years,
                        base.outcome.origin, k};
    return run_variants(histories, base, std::span(&v, 1), stability_threshold);
}

StabilityReport run_standard_suite(std::span<const StudentHistory> histories, const AnalysisConfig& base,
                                   double stability_threshold)
{
    std::vector<VariantSpec> variants;
    for (double w : {1.0, 2.0, 3.0}) {
        variants.push_back({"window_" + csv::fixed(w, 1) + "y", w, base.outcome.origin, base.exclude_last_k});
    }
    variants.push_back({"origin_academic_year", base.gap.inactivity_window_years, TimeOrigin::academic_year,
                        base.exclude_last_k});
    variants.push_back({"exclude_last_3", base.gap.inactivity_window_years, base.outcome.origin, 3});
    return run_variants(histories, base, variants, stability_threshold);
}

std::string StabilityReport::to_json() const
{
    nlohmann::ordered_json j;
    j["baseline"] = baseline;
    j["stability_threshold_years"] = stability_threshold_years;
    auto& vs = j["variants"] = nlohmann::ordered_json::array();
    for (const auto& v : variants) {
        vs.push_back({{"name", v.name},
                      {"inactivity_window_years", v.inactivity_window_years},
                      {"time_origin", std::string(to_string(v.time_origin))},
                      {"exclude_last_k_entry_years", v.exclude_last_k_entry_years}});
    }
    auto& rs = j["results"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        rs.push_back({{"variant", r.variant},
                      {"outcome", std::string(to_string(r.outcome))},
                      {"stratum", r.stratum},
                      {"n_total", r.summary.n_total},
                      {"n_events", r.summary.n_events},
                      {"n_censored", r.summary.n_censored},
                      {"median", number_or_text(r.summary.median)},
                      {"delta_median", number_or_text(r.delta_median)},
                      {"delta_events", r.delta_events},
                      {"sup_distance", r.sup_distance},
                      {"sup_distance_at", r.sup_distance_at},
                      {"excluded_students", r.excluded_students},
                      {"stable", r.stable}});
    }
    return j.dump(2);
}

}  // namespace trajsurv
