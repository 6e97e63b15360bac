#include "trajsurv/ingest.hpp"

#include "trajsurv/csv.hpp"
#include "trajsurv/error.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

namespace trajsurv {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 5> kKindNames{{
    {EventKind::enrolment, "enrolment"},
    {EventKind::exam, "exam"},
    {EventKind::status_update, "status_update"},
    {EventKind::plan_change, "plan_change"},
    {EventKind::graduation, "graduation"},
}};

constexpr std::array<std::string_view, 5> kHeaderColumns{"student_id", "date", "kind",
                                                          "major_code", "plan_code"};

bool is_blank(std::string_view line)
{
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

std::optional<EventKind> parse_event_kind(std::string_view text)
{
    for (const auto& [kind, name] : kKindNames) {
        if (name == text) return kind;
    }
    return std::nullopt;
}

std::string_view to_string(EventKind kind)
{
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::string to_json_line(const RecordError& err)
{
    nlohmann::ordered_json j;
    j["row"] = err.row ? nlohmann::ordered_json(*err.row) : nlohmann::ordered_json(nullptr);
    if (err.student_id) j["student_id"] = *err.student_id;
    j["reason"] = err.reason;
    return j.dump();
}

ParseResult parse_events(std::istream& source)
{
    if (!source) throw InputError("event source is not readable");

    ParseResult result;
    std::string line;
    if (!std::getline(source, line)) throw InputError("event source is empty (missing header row)");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = csv::split_line(line);
    if (header.size() < kHeaderColumns.size() ||
        !std::equal(kHeaderColumns.begin(), kHeaderColumns.end(), header.begin())) {
        throw InputError("unexpected header '" + line + "' (expected '" +
                         std::string(kEventCsvHeader) + "')");
    }
    if (header.size() > kHeaderColumns.size()) {
        std::string extra;
        for (std::size_t i = kHeaderColumns.size(); i < header.size(); ++i) {
            if (!extra.empty()) extra += ",";
            extra += header[i];
        }
        result.warnings.push_back("ignoring extra columns: " + extra);
    }

    std::size_t row = 0;
    while (std::getline(source, line)) {
        if (is_blank(line)) continue;
        const std::size_t this_row = row++;
        auto fail = [&](std::optional<std::string> sid, std::string reason) {
            result.errors.push_back({this_row, std::move(sid), std::move(reason)});
        };

        auto fields = csv::split_line(line);
        if (fields.size() < kHeaderColumns.size()) {
            fail(fields.empty() || fields[0].empty() ? std::nullopt
                                                     : std::optional<std::string>(fields[0]),
                 "expected 5 fields, found " + std::to_string(fields.size()));
            continue;
        }
        std::optional<std::string> sid;
        if (!fields[0].empty()) sid = fields[0];
        if (!sid) {
            fail(std::nullopt, "empty student_id");
            continue;
        }
        const auto date = Date::parse(fields[1]);
        if (!date) {
            fail(sid, "invalid date '" + fields[1] + "'");
            continue;
        }
        const auto kind = parse_event_kind(fields[2]);
        if (!kind) {
            fail(sid, "unknown kind '" + fields[2] + "'");
            continue;
        }
        if (*kind != EventKind::graduation) {
            if (fields[3].empty()) {
                fail(sid, "missing major_code");
                continue;
            }
            if (fields[4].empty()) {
                fail(sid, "missing plan_code");
                continue;
            }
        }
        result.events.push_back(EventRecord{std::move(fields[0]), *date, *kind,
                                            std::move(fields[3]), std::move(fields[4]),
                                            this_row});
    }
    if (source.bad()) throw InputError("read error while parsing event source");
    result.data_rows = row;
    return result;
}

ParseResult parse_events_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return parse_events(in);
}

void write_events_csv(std::ostream& out, const std::vector<EventRecord>& events)
{
    out << kEventCsvHeader << '\n';
    for (const auto& e : events) {
        out << csv::escape(e.student_id) << ',' << e.date.to_string() << ',' << to_string(e.kind)
            << ',' << csv::escape(e.major_code) << ',' << csv::escape(e.plan_code) << '\n';
    }
}

EntryPeriod assign_entry_period(int entry_year, std::string_view student_id)
{
    if (entry_year < kFirstSupportedEntryYear) {
        std::string msg = "entry year " + std::to_string(entry_year) + " precedes " +
                          std::to_string(kFirstSupportedEntryYear);
        if (!student_id.empty()) msg = "student " + std::string(student_id) + ": " + msg;
        throw ValidationError(msg);
    }
    if (entry_year < 1990) return EntryPeriod::P1;
    if (entry_year < 2000) return EntryPeriod::P2;
    if (entry_year < 2010) return EntryPeriod::P3;
    return EntryPeriod::P4;
}

std::string_view to_string(EntryPeriod p)
{
    switch (p) {
    case EntryPeriod::P1: return "P1";
    case EntryPeriod::P2: return "P2";
    case EntryPeriod::P3: return "P3";
    case EntryPeriod::P4: return "P4";
    }
    return "?";
}

std::string_view period_display_name(EntryPeriod p)
{
    switch (p) {
    case EntryPeriod::P1: return "P1 (1980-1989)";
    case EntryPeriod::P2: return "P2 (1990-1999)";
    case EntryPeriod::P3: return "P3 (2000-2009)";
    case EntryPeriod::P4: return "P4 (2010+)";
    }
    return "?";
}

std::optional<EntryPeriod> parse_entry_period(std::string_view label)
{
    for (auto p : {EntryPeriod::P1, EntryPeriod::P2, EntryPeriod::P3, EntryPeriod::P4}) {
        if (label == to_string(p) || label == period_display_name(p)) return p;
    }
    return std::nullopt;
}

HistoriesResult build_histories(std::vector<EventRecord> events)
{
    std::map<std::string, std::vector<EventRecord>> by_student;
    for (auto& e : events) by_student[e.student_id].push_back(std::move(e));

    HistoriesResult result;
    for (auto& [sid, evs] : by_student) {
        std::stable_sort(evs.begin(), evs.end(), [](const EventRecord& a, const EventRecord& b) {
            return a.date != b.date ? a.date < b.date : a.seq < b.seq;
        });
        const auto first_enrol = std::find_if(evs.begin(), evs.end(), [](const EventRecord& e) {
            return e.kind == EventKind::enrolment;
        });
        if (first_enrol == evs.end()) {
            result.skipped.push_back({std::nullopt, sid, "no enrolment event"});
            continue;
        }

        StudentHistory h;
        h.student_id = sid;
        h.first_enrolment_date = first_enrol->date;
        h.entry_year = first_enrol->date.year();
        h.first_major = first_enrol->major_code;
        try {
            h.entry_period = assign_entry_period(h.entry_year, sid);
        } catch (const ValidationError& err) {
            result.skipped.push_back({std::nullopt, sid, err.what()});
            continue;
        }
        // Graduation records dated before the first enrolment are ignored.
        for (auto it = first_enrol; it != evs.end(); ++it) {
            if (it->kind == EventKind::graduation) {
                h.graduated_on = it->date;
                break;
            }
        }
        h.events = std::move(evs);
        result.histories.push_back(std::move(h));
    }
    return result;
}

}  // namespace trajsurv
