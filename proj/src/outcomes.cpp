#include "trajsurv/outcomes.hpp"

#include "trajsurv/csv.hpp"
#include "trajsurv/error.hpp"

#include <algorithm>
#include <ostream>

namespace trajsurv {

namespace {

Date last_event_in_scope(const StudentHistory& history)
{
    const auto scope = spell_scope(history);
    if (scope.empty()) {
        throw ValidationError("student " + history.student_id + " has no enrolment event");
    }
    return scope.back().date;
}

void check_observation_end(const StudentHistory& history, const GapConfig& config)
{
    if (!history.events.empty() && history.events.back().date > config.observation_end) {
        throw ValidationError("student " + history.student_id + " has an event on " +
                              history.events.back().date.to_string() +
                              ", after the observation end " +
                              config.observation_end.to_string());
    }
}

SubjectRecord make_record(const StudentHistory& h, Date origin, Date at, Status status)
{
    return SubjectRecord{h.student_id, std::max(0.0, years_between(origin, at)), status,
                         std::string(to_string(h.entry_period))};
}

}  // namespace

std::string_view to_string(Status s) { return s == Status::event ? "event" : "censored"; }

std::string_view to_string(OutcomeId id) { return id == OutcomeId::A ? "A" : "B"; }

std::size_t OutcomeDataset::n_events() const
{
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const auto& r) { return r.is_event(); }));
}

std::size_t OutcomeDataset::n_censored() const { return n_total() - n_events(); }

std::string_view to_string(TimeOrigin o)
{
    return o == TimeOrigin::exact_date ? "exact" : "academic-year";
}

std::optional<TimeOrigin> parse_time_origin(std::string_view text)
{
    if (text == "exact" || text == "exact_date") return TimeOrigin::exact_date;
    if (text == "academic-year" || text == "academic_year") return TimeOrigin::academic_year;
    return std::nullopt;
}

Date time_origin(const StudentHistory& history, const OutcomeOptions& options)
{
    if (options.origin == TimeOrigin::academic_year) {
        return academic_year_start(history.first_enrolment_date,
                                   options.academic_year_start_month);
    }
    return history.first_enrolment_date;
}

bool is_definitive_dropout(const StudentHistory& history, const GapConfig& config)
{
    if (history.graduated_on) return false;
    return gap_exceeds(last_event_in_scope(history), config.observation_end,
                       config.inactivity_window_years);
}

SubjectRecord build_outcome_a(const StudentHistory& history, std::span<const Spell> spells,
                              const GapConfig& config, const OutcomeOptions& options)
{
    config.validate();
    check_observation_end(history, config);
    const Date origin = time_origin(history, options);

    if (history.graduated_on) return make_record(history, origin, *history.graduated_on, Status::censored);

    const Date last = spells.empty() ? last_event_in_scope(history) : spells.back().end_date;
    if (gap_exceeds(last, config.observation_end, config.inactivity_window_years)) {
        return make_record(history, origin, last, Status::event);
    }
    return make_record(history, origin, config.observation_end, Status::censored);
}

SubjectRecord build_outcome_b(const StudentHistory& history,
                              std::span<const Transition> transitions, const GapConfig& config,
                              const OutcomeOptions& options)
{
    config.validate();
    check_observation_end(history, config);
    const Date origin = time_origin(history, options);

    if (const auto sw = first_major_switch(transitions)) {
        return make_record(history, origin, *sw, Status::event);
    }
    if (history.graduated_on) return make_record(history, origin, *history.graduated_on, Status::censored);
    if (is_definitive_dropout(history, config)) {
        return make_record(history, origin, last_event_in_scope(history), Status::censored);
    }
    return make_record(history, origin, config.observation_end, Status::censored);
}

OutcomePair build_outcomes(std::span<const StudentHistory> histories,
                           std::span<const Trajectory> trajectories, const GapConfig& config,
                           const OutcomeOptions& options)
{
    if (histories.size() != trajectories.size()) {
        throw std::invalid_argument("histories and trajectories differ in length");
    }
    OutcomePair out;
    out.a.records.reserve(histories.size());
    out.b.records.reserve(histories.size());
    for (std::size_t i = 0; i < histories.size(); ++i) {
        out.a.records.push_back(build_outcome_a(histories[i], trajectories[i].spells, config, options));
        out.b.records.push_back(
            build_outcome_b(histories[i], trajectories[i].transitions, config, options));
    }
    return out;
}

std::map<std::string, OutcomeDataset> stratify(const OutcomeDataset& dataset, StratifyKey key)
{
    std::map<std::string, OutcomeDataset> out;
    if (key == StratifyKey::none) {
        out.emplace(std::string(kGlobalStratum), dataset);
        return out;
    }
    for (const auto& r : dataset.records) {
        auto [it, inserted] = out.try_emplace(r.stratum, OutcomeDataset{dataset.outcome, {}});
        it->second.records.push_back(r);
    }
    return out;
}

void write_outcome_csv(std::ostream& out, const OutcomeDataset& dataset)
{
    out << "student_id,duration_years,status,stratum\n";
    for (const auto& r : dataset.records) {
        out << csv::escape(r.student_id) << ',' << csv::fixed(r.duration_years, 6) << ','
            << to_string(r.status) << ',' << csv::escape(r.stratum) << '\n';
    }
}

}  // namespace trajsurv
