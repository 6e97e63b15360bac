#pragma once

#include "trajsurv/outcomes.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trajsurv {

/// Product-limit estimate. Rows exist only at distinct event times.
///
/// Ties: at equal times events are processed before censorings, so a
/// subject censored at t_i is still at risk at t_i. `n_censored[i]` counts
/// censorings in [t_i, t_{i+1}) (the subjects that leave the risk set after
/// t_i without an event) and `n_censored_before_first` those in [0, t_1),
/// so n_risk[i+1] == n_risk[i] - n_event[i] - n_censored[i].
struct SurvivalCurve {
    std::vector<double> times;
    std::vector<std::size_t> n_risk;
    std::vector<std::size_t> n_event;
    std::vector<std::size_t> n_censored;
    std::vector<double> survival;
    std::vector<double> variance;       ///< Greenwood variance of S(t_i)
    std::vector<double> greenwood_sum;  ///< running sum of d/(n(n-d)); +inf once S hits 0
    std::size_t n_censored_before_first = 0;
    std::size_t n_subjects = 0;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] std::size_t total_events() const;
    [[nodiscard]] std::size_t total_censored() const;
};

/// Throws std::invalid_argument on empty input or a negative / non-finite
/// duration.
SurvivalCurve km_fit(std::span<const SubjectRecord> records);
SurvivalCurve km_fit(std::span<const double> durations, std::span<const bool> events);

/// Smallest event time with S(t) <= 0.5, or +inf when the curve never gets
/// there. No interpolation between steps.
double median_survival(const SurvivalCurve& curve);

/// Right-continuous step lookup; 1 before the first event time.
double survival_at(const SurvivalCurve& curve, double t);

struct ConfidenceBand {
    double lower = 1.0;
    double upper = 1.0;
};

/// Pointwise bands from the Greenwood variance on the log(-log S) scale,
/// clipped to [0, 1]. Degenerates to the point value where S is 0 or 1.
std::vector<ConfidenceBand> greenwood_ci(const SurvivalCurve& curve, double level = 0.95);

struct SurvivalSummary {
    std::size_t n_total = 0;
    std::size_t n_events = 0;
    std::size_t n_censored = 0;
    double median = 0.0;
    std::vector<std::pair<double, double>> probes;  ///< (time, S(time))
};

SurvivalSummary summarize(const SurvivalCurve& curve, std::span<const double> probe_times);

struct LogRankResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    std::vector<std::string> labels;
    std::vector<double> observed;
    std::vector<double> expected;
};

/// K-sample log-rank test under the hypergeometric null. The quadratic form
/// drops the last group; a singular covariance (e.g. a group never at risk
/// at any event time) falls back to the pseudo-inverse with df = its rank.
LogRankResult log_rank(const std::map<std::string, std::vector<SubjectRecord>>& groups);

/// Upper tail of the chi-square distribution, Q(df/2, x/2).
double chi_square_sf(double x, double df);

/// Regularized upper incomplete gamma Q(a, x): power series for x < a + 1,
/// Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

void write_curve_csv(std::ostream& out, const SurvivalCurve& curve, double level = 0.95);

/// Row of a curve CSV as read back by read_curve_csv().
struct CurveRow {
    double time = 0.0;
    std::size_t n_risk = 0;
    std::size_t n_events = 0;
    std::size_t n_censored = 0;
    double survival = 1.0;
    double ci_lower = 1.0;
    double ci_upper = 1.0;
};

std::vector<CurveRow> read_curve_csv(std::istream& in);

}  // namespace trajsurv
