#pragma once

#include "trajsurv/date.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trajsurv {

enum class EventKind { enrolment, exam, status_update, plan_change, graduation };

std::optional<EventKind> parse_event_kind(std::string_view text);
std::string_view to_string(EventKind kind);

/// One administrative event for one student.
struct EventRecord {
    std::string student_id;
    Date date;
    EventKind kind = EventKind::enrolment;
    std::string major_code;
    std::string plan_code;
    std::size_t seq = 0;  ///< source data-row ordinal, 0-based

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// A row that could not be used. `row` is the 0-based data-row ordinal (the
/// same numbering as EventRecord::seq); skip-list entries produced by
/// build_histories() have no row.
struct RecordError {
    std::optional<std::size_t> row;
    std::optional<std::string> student_id;
    std::string reason;

    friend bool operator==(const RecordError&, const RecordError&) = default;
};

/// Serialises as one JSON line `{"row":..,"student_id":..,"reason":..}`.
std::string to_json_line(const RecordError& err);

struct ParseResult {
    std::vector<EventRecord> events;
    std::vector<RecordError> errors;
    std::vector<std::string> warnings;
    std::size_t data_rows = 0;
};

inline constexpr std::string_view kEventCsvHeader = "student_id,date,kind,major_code,plan_code";

/// Parses the event CSV. Malformed rows become RecordError entries; an
/// unreadable stream or a wrong header throws InputError.
ParseResult parse_events(std::istream& source);
ParseResult parse_events_file(const std::string& path);

void write_events_csv(std::ostream& out, const std::vector<EventRecord>& events);

enum class EntryPeriod { P1, P2, P3, P4 };

inline constexpr int kFirstSupportedEntryYear = 1980;

/// 1980-1989 -> P1, 1990-1999 -> P2, 2000-2009 -> P3, 2010+ -> P4.
/// Throws ValidationError (naming `student_id` when given) for years < 1980.
EntryPeriod assign_entry_period(int entry_year, std::string_view student_id = {});

std::string_view to_string(EntryPeriod p);               ///< "P1"
std::string_view period_display_name(EntryPeriod p);     ///< "P1 (1980-1989)"
std::optional<EntryPeriod> parse_entry_period(std::string_view label);

struct StudentHistory {
    std::string student_id;
    std::vector<EventRecord> events;  ///< sorted by (date, seq)
    Date first_enrolment_date;
    int entry_year = 0;
    EntryPeriod entry_period = EntryPeriod::P1;
    std::string first_major;
    std::optional<Date> graduated_on;

    friend bool operator==(const StudentHistory&, const StudentHistory&) = default;
};

struct HistoriesResult {
    std::vector<StudentHistory> histories;  ///< ordered by student_id
    std::vector<RecordError> skipped;
};

/// Groups events by student and derives the baseline covariates from the
/// first enrolment event only. Students without an enrolment event, or
/// entering before 1980, go to the skip list.
HistoriesResult build_histories(std::vector<EventRecord> events);

}  // namespace trajsurv
