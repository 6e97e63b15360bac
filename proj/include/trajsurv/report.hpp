#pragma once

#include "trajsurv/estimator.hpp"
#include "trajsurv/ingest.hpp"
#include "trajsurv/outcomes.hpp"
#include "trajsurv/trajectory.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajsurv {

/// Raised when a table about to be written violates its accounting
/// identities. Nothing is emitted in that case.
class ReportConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// ---------------------------------------------------------------- mobility

struct MobilityRow {
    int year = 0;
    std::size_t major_switch = 0;
    std::size_t plan_change_same_title = 0;
    std::size_t reentry_same_plan = 0;
    std::size_t total = 0;

    friend bool operator==(const MobilityRow&, const MobilityRow&) = default;
};

struct MobilityTable {
    std::vector<MobilityRow> rows;  ///< ascending year

    /// Throws ReportConsistencyError if any row's total differs from the sum
    /// of its kinds.
    void check() const;
};

MobilityTable mobility_table(std::span<const Transition> transitions);
MobilityTable mobility_table(std::span<const Trajectory> trajectories);

struct PeriodMobilityRow {
    EntryPeriod period = EntryPeriod::P1;
    std::size_t major_switch = 0;
    std::size_t plan_change_same_title = 0;
    std::size_t reentry_same_plan = 0;
    std::size_t total = 0;
};

/// Rolls yearly rows up by the period the transition year falls in.
std::vector<PeriodMobilityRow> mobility_by_period(const MobilityTable& table);

void write_mobility_csv(std::ostream& out, const MobilityTable& table);
std::string mobility_json(const MobilityTable& table);

// ----------------------------------------------------------------- summary

struct SummaryRow {
    OutcomeId outcome = OutcomeId::A;
    std::string stratum;        ///< "Global" or "Entry Period"
    std::string stratum_value;  ///< "All" or e.g. "P4 (2010+)"
    std::size_t n_total = 0;
    std::size_t n_events = 0;
    std::size_t n_censored = 0;
    double median = 0.0;  ///< +inf renders as "inf"
    std::vector<std::pair<double, double>> probes;
};

struct StratumSummary {
    EntryPeriod period = EntryPeriod::P1;
    SurvivalSummary summary;
};

/// One Global row followed by one row per period, in the given order.
/// Verifies the accounting identity on every row and that period totals sum
/// to the Global row (when periods are given).
std::vector<SummaryRow> summary_table(OutcomeId outcome, const SurvivalSummary& global,
                                      std::span<const StratumSummary> periods);

void check_summary_rows(std::span<const SummaryRow> rows);

/// "inf" for +inf, otherwise fixed with `digits` decimals.
std::string format_median(double median, int digits = 2);

/// events/total as a percentage with one decimal, e.g. "39.4%".
std::string format_percent(std::size_t part, std::size_t total);

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
/// Whitespace-aligned text table; medians with two decimals.
std::string summary_text(std::span<const SummaryRow> rows);
std::string summary_json(std::span<const SummaryRow> rows);

/// One line per row giving event and censored shares with their counts,
/// the median, and its difference from the Global median.
std::string narrative_summary(std::span<const SummaryRow> rows,
                              const std::optional<LogRankResult>& test = std::nullopt);

// --------------------------------------------------------------------- svg

struct PlotSeries {
    std::string label;
    std::vector<double> times;
    std::vector<double> survival;
    std::vector<double> lower;  ///< empty when no band
    std::vector<double> upper;
};

PlotSeries plot_series(std::string label, const SurvivalCurve& curve, std::optional<double> ci_level = 0.95);
PlotSeries plot_series(std::string label, std::span<const CurveRow> rows);

/// Vertices of the right-continuous step path in data coordinates, starting
/// at (0, 1) and ending at (x_max, last S).
std::vector<std::pair<double, double>> step_vertices(std::span<const double> times,
                                                     std::span<const double> values, double x_max);

struct SvgOptions {
    int width = 720;
    int height = 480;
    std::string title;
    std::string x_label = "Years since first enrolment";
    std::string y_label = "Survival probability";
    bool show_ci = true;
    std::optional<double> x_max;  ///< defaults to the largest time, rounded up
};

/// SVG 1.1 document. Output depends only on the inputs.
std::string render_svg(std::span<const PlotSeries> series, const SvgOptions& options = {});

// ---------------------------------------------------------------- manifest

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);
std::string sha256_hex(std::string_view bytes);

}  // namespace trajsurv
