#pragma once

#include "trajsurv/date.hpp"
#include "trajsurv/ingest.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace trajsurv {

struct HazardSegment {
    double start = 0.0;  ///< years
    double rate = 0.0;   ///< events per year
};

/// Piecewise-constant hazard; the last segment extends to +inf.
struct HazardSpec {
    std::vector<HazardSegment> segments{{0.0, 0.0}};

    static HazardSpec constant(double rate) { return HazardSpec{{{0.0, rate}}}; }
    static HazardSpec zero() { return constant(0.0); }

    /// Throws std::invalid_argument unless the first start is 0, starts
    /// strictly increase and all rates are finite and non-negative.
    void validate() const;

    /// Integrated hazard over [0, t].
    [[nodiscard]] double cumulative(double t) const;
};

/// Inverse-transform draw: the t with cumulative hazard equal to -ln(u), or
/// +inf when the remaining hazard mass is insufficient. u must lie in (0, 1).
double sample_piecewise_exp(const HazardSpec& hazard, double u);

/// exp(-cumulative(t)).
double true_survival(const HazardSpec& hazard, double t);

struct CohortSpec {
    std::size_t n_students = 1000;
    int entry_year_first = 2000;
    int entry_year_last = 2000;
    HazardSpec dropout_hazard = HazardSpec::constant(0.16);
    HazardSpec switch_hazard = HazardSpec::zero();
    HazardSpec graduation_hazard = HazardSpec::zero();
    HazardSpec plan_change_hazard = HazardSpec::zero();
    int events_per_year = 2;
    Date observation_end = *Date::from_ymd(2019, 12, 31);
    std::uint64_t seed = 42;
    /// Probability that a student has one temporary interruption, with a
    /// length drawn uniformly from [stopout_min_years, stopout_max_years).
    double stopout_probability = 0.0;
    double stopout_min_years = 0.5;
    double stopout_max_years = 3.5;
    std::vector<std::string> majors{"CIV", "ELE", "IND", "MEC", "SIS"};

    void validate() const;
};

CohortSpec cohort_spec_from_json(const std::string& json_text);
CohortSpec cohort_spec_from_file(const std::string& path);
std::string to_json(const CohortSpec& spec);

enum class TerminalCause { dropout, graduation, censored };

/// What the generator did for one student, recorded while emitting events.
struct StudentTruth {
    std::string student_id;
    Date entry_date;
    double dropout_time = 0.0;
    double switch_time = 0.0;
    double graduation_time = 0.0;
    double plan_change_time = 0.0;
    TerminalCause terminal = TerminalCause::censored;
    /// Date of the first emitted event carrying the switched major / new plan.
    std::optional<Date> switch_date;
    std::optional<Date> plan_change_date;
    /// Last event before and first event after the interruption, if any.
    std::optional<std::pair<Date, Date>> stopout_gap;
    std::size_t event_count = 0;
};

struct Cohort {
    std::vector<EventRecord> events;  ///< student order, then date; seq = row index
    std::vector<StudentTruth> truth;
};

/// Draws per student (fixed order, from the student's own sub-stream):
/// entry year, entry day, first major, latent dropout / switch / graduation
/// / plan-change times, then the interruption draws. Regular events are
/// emitted every 1/events_per_year years from entry until the earliest of
/// dropout, graduation and observation_end, plus one event at each latent
/// time that falls inside that window.
Cohort generate_cohort_with_truth(const CohortSpec& spec);
std::vector<EventRecord> generate_cohort(const CohortSpec& spec);

}  // namespace trajsurv
