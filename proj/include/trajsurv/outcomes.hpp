#pragma once

#include "trajsurv/date.hpp"
#include "trajsurv/ingest.hpp"
#include "trajsurv/trajectory.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trajsurv {

enum class Status { event, censored };

std::string_view to_string(Status s);

/// One subject's (duration, event flag, stratum) triple.
struct SubjectRecord {
    std::string student_id;
    double duration_years = 0.0;
    Status status = Status::censored;
    std::string stratum;

    [[nodiscard]] bool is_event() const { return status == Status::event; }
    friend bool operator==(const SubjectRecord&, const SubjectRecord&) = default;
};

/// A: time to definitive dropout. B: time to first major switch.
enum class OutcomeId { A, B };

std::string_view to_string(OutcomeId id);

struct OutcomeDataset {
    OutcomeId outcome = OutcomeId::A;
    std::vector<SubjectRecord> records;

    [[nodiscard]] std::size_t n_total() const { return records.size(); }
    [[nodiscard]] std::size_t n_events() const;
    [[nodiscard]] std::size_t n_censored() const;
};

enum class TimeOrigin { exact_date, academic_year };

std::string_view to_string(TimeOrigin o);
std::optional<TimeOrigin> parse_time_origin(std::string_view text);

struct OutcomeOptions {
    TimeOrigin origin = TimeOrigin::exact_date;
    unsigned academic_year_start_month = 1;
};

/// Date from which durations are measured.
Date time_origin(const StudentHistory& history, const OutcomeOptions& options = {});

/// True when the student has not graduated and the observation window ends
/// more than one inactivity window after the last event in scope.
bool is_definitive_dropout(const StudentHistory& history, const GapConfig& config);

/// Graduates are censored at graduation; definitive dropouts are events at
/// their last recorded event; everyone else is censored at observation_end.
SubjectRecord build_outcome_a(const StudentHistory& history, std::span<const Spell> spells,
                              const GapConfig& config, const OutcomeOptions& options = {});

/// Event at the first major switch; otherwise censored at graduation, at the
/// last event for dropouts, or at observation_end.
SubjectRecord build_outcome_b(const StudentHistory& history,
                              std::span<const Transition> transitions, const GapConfig& config,
                              const OutcomeOptions& options = {});

struct OutcomePair {
    OutcomeDataset a{OutcomeId::A, {}};
    OutcomeDataset b{OutcomeId::B, {}};
};

/// `trajectories[i]` must be the reconstruction of `histories[i]`.
OutcomePair build_outcomes(std::span<const StudentHistory> histories,
                           std::span<const Trajectory> trajectories, const GapConfig& config,
                           const OutcomeOptions& options = {});

enum class StratifyKey { entry_period, none };

inline constexpr std::string_view kGlobalStratum = "All";

/// Partition by the records' stratum label; key=none yields a single "All"
/// stratum equal to the input.
std::map<std::string, OutcomeDataset> stratify(const OutcomeDataset& dataset, StratifyKey key);

void write_outcome_csv(std::ostream& out, const OutcomeDataset& dataset);

}  // namespace trajsurv
